#include "zip.hpp"

#include "erfr/workbook.hpp"

#include <zlib.h>

#include <cstring>
#include <limits>

namespace erfr::zip {
namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::size_t kEndOfCentralDirSize = 22;
// Largest member we are willing to inflate; workbook parts are small.
constexpr std::size_t kMaxMemberSize = 256u << 20;
// 1980-01-01 00:00, the DOS epoch.
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;
constexpr std::uint16_t kDosTime = 0;

[[noreturn]] void corrupt(const std::string& what) { throw XlsxError(XlsxErrorKind::NotZip, what); }

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    std::uint16_t u16(std::size_t at) const {
        need(at, 2);
        return static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8));
    }
    std::uint32_t u32(std::size_t at) const {
        need(at, 4);
        return static_cast<std::uint32_t>(bytes_[at]) | (static_cast<std::uint32_t>(bytes_[at + 1]) << 8) |
               (static_cast<std::uint32_t>(bytes_[at + 2]) << 16) |
               (static_cast<std::uint32_t>(bytes_[at + 3]) << 24);
    }
    std::span<const std::uint8_t> slice(std::size_t at, std::size_t n) const {
        need(at, n);
        return bytes_.subspan(at, n);
    }
    std::size_t size() const { return bytes_.size(); }

private:
    void need(std::size_t at, std::size_t n) const {
        if (at > bytes_.size() || n > bytes_.size() - at) corrupt("unexpected end of archive");
    }
    std::span<const std::uint8_t> bytes_;
};

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> in, std::size_t expected) {
    if (expected > kMaxMemberSize) corrupt("member too large");
    std::vector<std::uint8_t> out(expected == 0 ? 1 : expected);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) corrupt("inflate init failed");
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected) corrupt("deflate stream damaged");
    out.resize(expected);
    return out;
}

std::vector<std::uint8_t> deflate_raw(const std::string& in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw std::runtime_error("deflate init failed");
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw std::runtime_error("deflate failed");
    return out;
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

Archive read(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (bytes.size() < kEndOfCentralDirSize) corrupt("too short for a ZIP archive");

    // The end record sits in the last 22 + 65535 bytes (trailing comment).
    std::size_t lowest = bytes.size() > kEndOfCentralDirSize + 0xFFFF ? bytes.size() - kEndOfCentralDirSize - 0xFFFF : 0;
    std::size_t eocd = std::numeric_limits<std::size_t>::max();
    for (std::size_t at = bytes.size() - kEndOfCentralDirSize + 1; at-- > lowest;) {
        if (r.u32(at) == kEndOfCentralDirSig && at + kEndOfCentralDirSize + r.u16(at + 20) == bytes.size()) {
            eocd = at;
            break;
        }
    }
    if (eocd == std::numeric_limits<std::size_t>::max()) corrupt("end of central directory not found");

    std::size_t entries = r.u16(eocd + 10);
    std::size_t cd_size = r.u32(eocd + 12);
    std::size_t cd_offset = r.u32(eocd + 16);
    if (cd_offset > eocd || cd_size > eocd - cd_offset) corrupt("central directory out of range");

    Archive out;
    std::size_t at = cd_offset;
    for (std::size_t i = 0; i < entries; ++i) {
        if (r.u32(at) != kCentralHeaderSig) corrupt("bad central directory entry");
        std::uint16_t flags = r.u16(at + 8);
        std::uint16_t method = r.u16(at + 10);
        std::uint32_t crc = r.u32(at + 16);
        std::size_t csize = r.u32(at + 20);
        std::size_t usize = r.u32(at + 24);
        std::size_t name_len = r.u16(at + 28);
        std::size_t extra_len = r.u16(at + 30);
        std::size_t comment_len = r.u16(at + 32);
        std::size_t local = r.u32(at + 42);
        auto name_bytes = r.slice(at + 46, name_len);
        std::string name(name_bytes.begin(), name_bytes.end());
        at += 46 + name_len + extra_len + comment_len;

        if (flags & 0x1) corrupt("encrypted member: " + name);
        if (r.u32(local) != kLocalHeaderSig) corrupt("bad local header: " + name);
        std::size_t data_at = local + 30 + r.u16(local + 26) + r.u16(local + 28);
        auto raw = r.slice(data_at, csize);

        std::vector<std::uint8_t> data;
        if (method == 0) {
            if (csize != usize) corrupt("stored member size mismatch: " + name);
            data.assign(raw.begin(), raw.end());
        } else if (method == 8) {
            data = inflate_raw(raw, usize);
        } else {
            corrupt("unsupported compression method in " + name);
        }
        uLong actual = crc32(0L, Z_NULL, 0);
        if (!data.empty()) actual = crc32(actual, data.data(), static_cast<uInt>(data.size()));
        if (actual != crc) corrupt("CRC mismatch: " + name);
        out.insert_or_assign(std::move(name), std::move(data));
    }
    return out;
}

std::vector<std::uint8_t> write(const std::vector<std::pair<std::string, std::string>>& members) {
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> central;
    for (const auto& [name, content] : members) {
        auto packed = deflate_raw(content);
        uLong crc = crc32(0L, Z_NULL, 0);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(content.data()), static_cast<uInt>(content.size()));
        auto offset = static_cast<std::uint32_t>(out.size());

        put32(out, kLocalHeaderSig);
        put16(out, 20);
        put16(out, 0);
        put16(out, 8);
        put16(out, kDosTime);
        put16(out, kDosDate);
        put32(out, static_cast<std::uint32_t>(crc));
        put32(out, static_cast<std::uint32_t>(packed.size()));
        put32(out, static_cast<std::uint32_t>(content.size()));
        put16(out, static_cast<std::uint16_t>(name.size()));
        put16(out, 0);
        out.insert(out.end(), name.begin(), name.end());
        out.insert(out.end(), packed.begin(), packed.end());

        put32(central, kCentralHeaderSig);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, 8);
        put16(central, kDosTime);
        put16(central, kDosDate);
        put32(central, static_cast<std::uint32_t>(crc));
        put32(central, static_cast<std::uint32_t>(packed.size()));
        put32(central, static_cast<std::uint32_t>(content.size()));
        put16(central, static_cast<std::uint16_t>(name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, offset);
        central.insert(central.end(), name.begin(), name.end());
    }
    auto cd_offset = static_cast<std::uint32_t>(out.size());
    out.insert(out.end(), central.begin(), central.end());
    put32(out, kEndOfCentralDirSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(members.size()));
    put16(out, static_cast<std::uint16_t>(members.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

}  // namespace erfr::zip
