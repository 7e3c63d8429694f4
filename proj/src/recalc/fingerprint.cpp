#include "erfr/recalc.hpp"

#include <fmt/format.h>

namespace erfr {
namespace {

std::string kind_and_content(const Cell& cell) {
    if (const Formula* f = cell.formula()) return "F\t" + f->canonical();
    const CellValue& v = *cell.constant();
    if (auto* d = std::get_if<double>(&v)) return "N\t" + format_number(*d);
    if (auto* s = std::get_if<std::string>(&v)) {
        // Keep one line per cell.
        std::string esc;
        for (char c : *s) {
            if (c == '\\') esc += "\\\\";
            else if (c == '\n') esc += "\\n";
            else if (c == '\t') esc += "\\t";
            else if (c == '\r') esc += "\\r";
            else esc.push_back(c);
        }
        return "T\t" + esc;
    }
    if (auto* b = std::get_if<bool>(&v)) return std::string("L\t") + (*b ? "TRUE" : "FALSE");
    if (auto* e = std::get_if<ErrorValue>(&v)) return "E\t" + e->code;
    return "B\t";
}

}  // namespace

std::string Fingerprint::hex() const { return fmt::format("{:016x}", digest); }

Fingerprint fingerprint(const Workbook& wb) {
    std::map<CellAddr, std::string> lines;
    for (const Cell* c : wb.cells()) lines[c->addr] = c->addr.qualified() + "\t" + kind_and_content(*c);

    Fingerprint fp;
    for (const auto& [_, line] : lines) fp.dump += line + "\n";
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : fp.dump) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    fp.digest = h;
    return fp;
}

}  // namespace erfr
