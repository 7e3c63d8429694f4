#include "erfr/audit.hpp"

#include <set>

namespace erfr {
namespace {

constexpr int kMinBodyRows = 3;
constexpr double kUniformity = 0.8;

enum class Slot { Empty, Text, Number, Formula, Other };

Slot slot(const Sheet& s, int col, int row) {
    auto it = s.cells.find(CellAddr{s.name, col, row});
    if (it == s.cells.end()) return Slot::Empty;
    if (it->second.is_formula()) return Slot::Formula;
    const CellValue& v = *it->second.constant();
    if (is_blank(v)) return Slot::Empty;
    if (const auto* t = std::get_if<std::string>(&v)) return label_tokens(*t).empty() ? Slot::Empty : Slot::Text;
    if (is_number(v)) return Slot::Number;
    return Slot::Other;
}

std::string text_of(const Sheet& s, int col, int row) {
    auto it = s.cells.find(CellAddr{s.name, col, row});
    if (it == s.cells.end() || it->second.is_formula()) return {};
    const auto* t = std::get_if<std::string>(it->second.constant());
    return t ? *t : std::string();
}

}  // namespace

const TableRegion::Column* TableRegion::column(int col) const {
    for (const auto& c : columns)
        if (c.col == col) return &c;
    return nullptr;
}

bool TableRegion::contains_body(const CellAddr& a) const {
    return a.sheet == sheet && a.row >= first_row && a.row <= last_row && column(a.col) != nullptr;
}

std::vector<TableRegion> detect_tables(const Workbook& wb) {
    std::vector<TableRegion> out;
    for (const Sheet& s : wb.sheets()) {
        if (s.cells.empty()) continue;
        int max_row = 0, max_col = 0;
        for (const auto& [a, _] : s.cells) {
            max_row = std::max(max_row, a.row);
            max_col = std::max(max_col, a.col);
        }
        std::set<int> rows_with_cells;
        for (const auto& [a, _] : s.cells) rows_with_cells.insert(a.row);

        int covered_until = 0;  // rows already inside a detected table
        for (int row : rows_with_cells) {
            if (row <= covered_until) continue;
            // Runs of at least two adjacent Text cells.
            for (int col = 1; col <= max_col;) {
                if (slot(s, col, row) != Slot::Text) {
                    ++col;
                    continue;
                }
                int start = col;
                while (col <= max_col && slot(s, col, row) == Slot::Text) ++col;
                int end = col - 1;
                if (end - start + 1 < 2) continue;

                int last = row;
                for (int r = row + 1; r <= max_row; ++r) {
                    bool any = false;
                    for (int c = start; c <= end && !any; ++c) any = slot(s, c, r) != Slot::Empty;
                    if (!any) break;
                    last = r;
                }
                int body = last - row;
                if (body < kMinBodyRows) continue;

                auto filled = [&](int c) {
                    int n = 0;
                    for (int r = row + 1; r <= last; ++r) n += slot(s, c, r) != Slot::Empty;
                    return n;
                };
                // Unheaded neighbours that are populated alongside the body belong to it.
                int lo = start, hi = end;
                while (lo > 1 && slot(s, lo - 1, row) == Slot::Empty && filled(lo - 1) >= kUniformity * body) --lo;
                while (hi < max_col && slot(s, hi + 1, row) == Slot::Empty && filled(hi + 1) >= kUniformity * body)
                    ++hi;

                TableRegion t;
                t.sheet = s.name;
                t.header_row = row;
                t.first_row = row + 1;
                t.last_row = last;
                bool has_values = false;
                for (int c = lo; c <= hi; ++c) {
                    int formulas = 0, constants = 0;
                    for (int r = row + 1; r <= last; ++r) {
                        Slot k = slot(s, c, r);
                        if (k == Slot::Formula) ++formulas;
                        else ++constants;
                        has_values = has_values || k == Slot::Formula || k == Slot::Number;
                    }
                    TableRegion::Column column;
                    column.col = c;
                    column.header = text_of(s, c, row);
                    if (formulas >= kUniformity * body) column.kind = TableRegion::ColumnKind::Formula;
                    else if (constants >= kUniformity * body) column.kind = TableRegion::ColumnKind::Constant;
                    t.columns.push_back(column);
                }
                if (!has_values) continue;
                out.push_back(std::move(t));
                covered_until = last;
            }
        }
    }
    return out;
}

}  // namespace erfr
