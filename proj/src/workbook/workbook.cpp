#include "erfr/workbook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

namespace erfr {

std::string Formula::canonical() const {
    if (tree) return print_formula(*tree);
    return source;
}

Formula Formula::parse(std::string source) {
    Formula f;
    f.source = std::move(source);
    try {
        f.tree = parse_formula(f.source);
    } catch (const FormulaError& e) {
        f.parse_error = e.what();
    }
    return f;
}

const CellValue* Cell::constant() const {
    if (auto* c = std::get_if<Constant>(&content)) return &c->value;
    return nullptr;
}

bool same_content(const Cell& a, const Cell& b) {
    if (!(a.addr == b.addr) || a.content.index() != b.content.index()) return false;
    if (auto* ca = a.constant()) return identical(*ca, *b.constant());
    return a.formula()->canonical() == b.formula()->canonical();
}

std::size_t Workbook::add_sheet(std::string name) {
    if (name.empty()) throw std::invalid_argument("sheet name must be nonempty");
    if (has_sheet(name)) throw std::invalid_argument("duplicate sheet name: " + name);
    sheets_.push_back(Sheet{std::move(name), {}});
    return sheets_.size() - 1;
}

const Sheet* Workbook::sheet(std::string_view name) const {
    for (const auto& s : sheets_)
        if (s.name == name) return &s;
    return nullptr;
}

Sheet& Workbook::sheet_for(const std::string& name) {
    for (auto& s : sheets_)
        if (s.name == name) return s;
    add_sheet(name);
    return sheets_.back();
}

void Workbook::set(Cell cell) {
    if (!cell.addr.in_bounds()) throw std::out_of_range("cell address out of bounds: " + cell.addr.qualified());
    if (const CellValue* v = cell.constant(); v && is_number(*v) && !std::isfinite(std::get<double>(*v)))
        throw std::invalid_argument("non-finite number at " + cell.addr.qualified());
    auto& s = sheet_for(cell.addr.sheet);
    CellAddr key = cell.addr;
    s.cells.insert_or_assign(key, std::move(cell));
}

void Workbook::set_number(const CellAddr& a, double v) { set(Cell{a, Constant{v}}); }
void Workbook::set_text(const CellAddr& a, std::string v) { set(Cell{a, Constant{std::move(v)}}); }
void Workbook::set_blank(const CellAddr& a) { set(Cell{a, Constant{Blank{}}}); }
void Workbook::set_value(const CellAddr& a, CellValue v) { set(Cell{a, Constant{std::move(v)}}); }
void Workbook::set_formula(const CellAddr& a, std::string source) { set(Cell{a, Formula::parse(std::move(source))}); }

void Workbook::erase(const CellAddr& a) {
    for (auto& s : sheets_)
        if (s.name == a.sheet) s.cells.erase(a);
}

const Cell* Workbook::find(const CellAddr& a) const {
    const Sheet* s = sheet(a.sheet);
    if (!s) return nullptr;
    auto it = s->cells.find(a);
    return it == s->cells.end() ? nullptr : &it->second;
}

CellValue Workbook::constant_at(const CellAddr& a) const {
    const Cell* c = find(a);
    if (!c || c->is_formula()) return Blank{};
    return *c->constant();
}

std::size_t Workbook::cell_count() const {
    std::size_t n = 0;
    for (const auto& s : sheets_) n += s.cells.size();
    return n;
}

std::vector<const Cell*> Workbook::cells() const {
    std::vector<const Cell*> out;
    for (const auto& s : sheets_)
        for (const auto& [_, c] : s.cells) out.push_back(&c);
    return out;
}

std::vector<const Cell*> Workbook::formula_cells() const {
    std::vector<const Cell*> out;
    for (const auto* c : cells())
        if (c->is_formula()) out.push_back(c);
    return out;
}

bool operator==(const Workbook& a, const Workbook& b) {
    if (a.sheets_.size() != b.sheets_.size()) return false;
    for (std::size_t i = 0; i < a.sheets_.size(); ++i) {
        const auto& sa = a.sheets_[i];
        const auto& sb = b.sheets_[i];
        if (sa.name != sb.name || sa.cells.size() != sb.cells.size()) return false;
        auto ib = sb.cells.begin();
        for (const auto& [k, ca] : sa.cells) {
            if (!(k == ib->first) || !same_content(ca, ib->second)) return false;
            ++ib;
        }
    }
    return true;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace erfr
