#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace erfr::zip {

using Archive = std::map<std::string, std::vector<std::uint8_t>>;

/// Reads every member of a ZIP archive. Stored and deflated members are
/// supported; CRCs are verified. Throws XlsxError(NotZip) on any damage.
Archive read(std::span<const std::uint8_t> bytes);

/// Deflates members in the given order with fixed timestamps, so equal
/// input gives equal bytes.
std::vector<std::uint8_t> write(const std::vector<std::pair<std::string, std::string>>& members);

}  // namespace erfr::zip
