#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace erfr {

inline constexpr int kMaxRows = 1048576;
inline constexpr int kMaxCols = 16384;
inline constexpr std::string_view kDefaultSheet = "Sheet1";

// 1 -> "A", 26 -> "Z", 27 -> "AA".
std::string column_name(int col);
// Inverse of column_name; nullopt for empty or non-letter input.
std::optional<int> column_index(std::string_view letters);

/// A cell position. Ordering is row-major within a sheet.
struct CellAddr {
    std::string sheet{kDefaultSheet};
    int col = 1;
    int row = 1;

    CellAddr() = default;
    CellAddr(std::string sheet_name, int c, int r) : sheet(std::move(sheet_name)), col(c), row(r) {}

    std::string a1() const;
    std::string qualified() const;
    bool in_bounds() const { return col >= 1 && row >= 1 && col <= kMaxCols && row <= kMaxRows; }

    /// Parses "B12" (optionally with '$' markers) on the given sheet.
    static std::optional<CellAddr> parse(std::string_view a1_text, std::string_view sheet = kDefaultSheet);

    friend bool operator==(const CellAddr&, const CellAddr&) = default;
    friend std::strong_ordering operator<=>(const CellAddr& a, const CellAddr& b) {
        if (auto c = a.sheet <=> b.sheet; c != 0) return c;
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.col <=> b.col;
    }
};

// Convenience for tests and builders: addr("B2") on Sheet1.
CellAddr addr(std::string_view a1_text, std::string_view sheet = kDefaultSheet);

}  // namespace erfr
