#pragma once

#include "erfr/address.hpp"
#include "erfr/formula.hpp"
#include "erfr/value.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace erfr {

struct Constant {
    CellValue value;
};

/// Formula cell. `tree` is null when the source did not parse; the reason is
/// kept in `parse_error` so audits can report it instead of failing.
struct Formula {
    std::string source;  // begins with '='
    ExprPtr tree;
    std::string parse_error;
    std::optional<CellValue> cached;  // advisory; recalc is authoritative

    /// Canonical text when parsed, raw source otherwise.
    std::string canonical() const;
    static Formula parse(std::string source);
};

struct Cell {
    CellAddr addr;
    std::variant<Constant, Formula> content;

    bool is_formula() const { return std::holds_alternative<Formula>(content); }
    const Formula* formula() const { return std::get_if<Formula>(&content); }
    /// Stored constant, or nullptr for formula cells.
    const CellValue* constant() const;
};

/// Content equality used by round-trip checks: same kind, bit-equal
/// constants, same canonical formula text. Cached values are ignored.
bool same_content(const Cell& a, const Cell& b);

struct Sheet {
    std::string name;
    std::map<CellAddr, Cell> cells;
};

class Workbook {
public:
    Workbook() = default;

    /// Appends a sheet and returns its index. Names must be unique.
    std::size_t add_sheet(std::string name);
    const std::vector<Sheet>& sheets() const { return sheets_; }
    const Sheet* sheet(std::string_view name) const;
    bool has_sheet(std::string_view name) const { return sheet(name) != nullptr; }

    /// Stores a cell; the sheet is created on first use.
    void set(Cell cell);
    void set_number(const CellAddr& a, double v);
    void set_text(const CellAddr& a, std::string v);
    void set_blank(const CellAddr& a);
    void set_value(const CellAddr& a, CellValue v);
    /// Parses `source` ("=..."). Unparseable text is kept with its error.
    void set_formula(const CellAddr& a, std::string source);
    void erase(const CellAddr& a);

    const Cell* find(const CellAddr& a) const;
    /// Stored value for constants, Blank for formulas and missing cells.
    CellValue constant_at(const CellAddr& a) const;

    std::size_t cell_count() const;
    /// All cells, sheet order then row-major.
    std::vector<const Cell*> cells() const;
    std::vector<const Cell*> formula_cells() const;

    friend bool operator==(const Workbook& a, const Workbook& b);

private:
    Sheet& sheet_for(const std::string& name);
    std::vector<Sheet> sheets_;
};

// ---- XLSX ------------------------------------------------------------------

enum class XlsxErrorKind { NotZip, MissingWorkbookPart, MalformedSheetXml, UnencodableText };
std::string_view to_string(XlsxErrorKind k);

class XlsxError : public std::runtime_error {
public:
    XlsxError(XlsxErrorKind kind, const std::string& detail);
    XlsxErrorKind kind() const { return kind_; }
    /// File-reliability finding code, e.g. "FILE_CORRUPT_NOT_ZIP".
    std::string finding_code() const;

private:
    XlsxErrorKind kind_;
};

Workbook read_workbook(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_workbook(const Workbook& wb);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace erfr
