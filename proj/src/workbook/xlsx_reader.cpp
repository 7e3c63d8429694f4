#include "erfr/workbook.hpp"

#include "zip.hpp"

#include <expat.h>

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

namespace erfr {

std::string_view to_string(XlsxErrorKind k) {
    switch (k) {
        case XlsxErrorKind::NotZip: return "NotZip";
        case XlsxErrorKind::MissingWorkbookPart: return "MissingWorkbookPart";
        case XlsxErrorKind::MalformedSheetXml: return "MalformedSheetXml";
        case XlsxErrorKind::UnencodableText: return "UnencodableText";
    }
    return "?";
}

XlsxError::XlsxError(XlsxErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string XlsxError::finding_code() const {
    switch (kind_) {
        case XlsxErrorKind::NotZip: return "FILE_CORRUPT_NOT_ZIP";
        case XlsxErrorKind::MissingWorkbookPart: return "FILE_CORRUPT_MISSING_PART";
        case XlsxErrorKind::MalformedSheetXml: return "FILE_CORRUPT_MALFORMED_XML";
        case XlsxErrorKind::UnencodableText: return "FILE_UNENCODABLE_TEXT";
    }
    return "FILE_CORRUPT";
}

namespace {

using Attrs = std::map<std::string, std::string>;

std::string_view local_name(const XML_Char* name) {
    std::string_view n(name);
    auto colon = n.rfind(':');
    return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

/// Thin SAX wrapper over expat: element start/end callbacks plus text.
class SaxParser {
public:
    std::function<void(std::string_view, const Attrs&)> on_start;
    std::function<void(std::string_view)> on_end;
    std::function<void(std::string_view)> on_text;

    void parse(const std::vector<std::uint8_t>& doc, const std::string& part) {
        XML_Parser p = XML_ParserCreate("UTF-8");
        if (!p) throw std::bad_alloc();
        XML_SetUserData(p, this);
        XML_SetElementHandler(p, &SaxParser::start_cb, &SaxParser::end_cb);
        XML_SetCharacterDataHandler(p, &SaxParser::text_cb);
        auto rc = XML_Parse(p, reinterpret_cast<const char*>(doc.data()), static_cast<int>(doc.size()), 1);
        std::string err;
        if (rc != XML_STATUS_OK) {
            err = part + ": " + XML_ErrorString(XML_GetErrorCode(p)) + " at line " +
                  std::to_string(XML_GetCurrentLineNumber(p));
        }
        XML_ParserFree(p);
        if (!error_.empty()) throw XlsxError(XlsxErrorKind::MalformedSheetXml, part + ": " + error_);
        if (!err.empty()) throw XlsxError(XlsxErrorKind::MalformedSheetXml, err);
    }

private:
    static void start_cb(void* self, const XML_Char* name, const XML_Char** atts) {
        auto* s = static_cast<SaxParser*>(self);
        if (!s->on_start || !s->error_.empty()) return;
        Attrs a;
        for (int i = 0; atts[i]; i += 2) a.emplace(std::string(local_name(atts[i])), atts[i + 1]);
        s->guard([&] { s->on_start(local_name(name), a); });
    }
    static void end_cb(void* self, const XML_Char* name) {
        auto* s = static_cast<SaxParser*>(self);
        if (s->on_end && s->error_.empty()) s->guard([&] { s->on_end(local_name(name)); });
    }
    static void text_cb(void* self, const XML_Char* text, int len) {
        auto* s = static_cast<SaxParser*>(self);
        if (s->on_text && s->error_.empty()) s->guard([&] { s->on_text(std::string_view(text, len)); });
    }
    // Exceptions must not unwind through expat's C frames.
    template <typename Fn>
    void guard(Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            error_ = e.what();
        }
    }
    std::string error_;
};

[[noreturn]] void malformed(const std::string& what) { throw XlsxError(XlsxErrorKind::MalformedSheetXml, what); }

double parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        malformed("bad numeric value '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> read_shared_strings(const zip::Archive& ar) {
    std::vector<std::string> out;
    auto it = ar.find("xl/sharedStrings.xml");
    if (it == ar.end()) return out;
    SaxParser sax;
    bool in_si = false;
    bool in_t = false;
    int phonetic_depth = 0;
    std::string current;
    sax.on_start = [&](std::string_view n, const Attrs&) {
        if (n == "si") {
            in_si = true;
            current.clear();
        } else if (n == "rPh") {
            ++phonetic_depth;
        } else if (n == "t" && in_si && phonetic_depth == 0) {
            in_t = true;
        }
    };
    sax.on_end = [&](std::string_view n) {
        if (n == "si") {
            out.push_back(current);
            in_si = false;
        } else if (n == "rPh") {
            --phonetic_depth;
        } else if (n == "t") {
            in_t = false;
        }
    };
    sax.on_text = [&](std::string_view t) {
        if (in_t) current.append(t);
    };
    sax.parse(it->second, "xl/sharedStrings.xml");
    return out;
}

struct SheetRef {
    std::string name;
    std::string rel_id;
};

std::vector<SheetRef> read_sheet_list(const zip::Archive& ar) {
    auto it = ar.find("xl/workbook.xml");
    if (it == ar.end()) throw XlsxError(XlsxErrorKind::MissingWorkbookPart, "xl/workbook.xml not found");
    std::vector<SheetRef> out;
    SaxParser sax;
    sax.on_start = [&](std::string_view n, const Attrs& a) {
        if (n != "sheet") return;
        SheetRef s;
        if (auto f = a.find("name"); f != a.end()) s.name = f->second;
        if (auto f = a.find("id"); f != a.end()) s.rel_id = f->second;
        if (s.name.empty()) malformed("sheet without a name");
        out.push_back(std::move(s));
    };
    sax.parse(it->second, "xl/workbook.xml");
    return out;
}

std::map<std::string, std::string> read_relationships(const zip::Archive& ar) {
    std::map<std::string, std::string> out;
    auto it = ar.find("xl/_rels/workbook.xml.rels");
    if (it == ar.end()) return out;
    SaxParser sax;
    sax.on_start = [&](std::string_view n, const Attrs& a) {
        if (n != "Relationship") return;
        auto id = a.find("Id");
        auto target = a.find("Target");
        if (id == a.end() || target == a.end()) return;
        std::string t = target->second;
        if (!t.empty() && t.front() == '/') t = t.substr(1);
        else t = "xl/" + t;
        out[id->second] = t;
    };
    sax.parse(it->second, "xl/_rels/workbook.xml.rels");
    return out;
}

struct SharedFormulaMaster {
    CellAddr anchor;
    ExprPtr tree;
};

void read_sheet(const std::vector<std::uint8_t>& xml, const std::string& part, const std::string& sheet_name,
                const std::vector<std::string>& shared, Workbook& wb) {
    SaxParser sax;
    std::map<std::string, SharedFormulaMaster> masters;

    int current_row = 0;
    int next_col = 1;
    // Per-cell state.
    bool in_cell = false;
    CellAddr cell_addr;
    std::string cell_type;
    std::string value_text;
    std::string formula_text;
    std::string inline_text;
    bool has_value = false;
    bool has_formula = false;
    bool has_inline = false;
    std::string formula_kind;
    std::string shared_index;
    std::string shared_ref;
    enum class Capture { None, Value, Formula, Inline } capture = Capture::None;
    int phonetic_depth = 0;

    auto finish_cell = [&] {
        std::optional<CellValue> value;
        if (has_inline) {
            value = inline_text;
        } else if (has_value) {
            if (cell_type == "s") {
                double idx = parse_number(value_text);
                if (idx < 0 || idx >= static_cast<double>(shared.size()) || idx != std::floor(idx))
                    malformed("shared string index out of range at " + cell_addr.a1());
                value = shared[static_cast<std::size_t>(idx)];
            } else if (cell_type == "str" || cell_type == "inlineStr") {
                value = value_text;
            } else if (cell_type == "b") {
                value = parse_number(value_text) != 0;
            } else if (cell_type == "e") {
                value = ErrorValue{value_text};
            } else {
                value = parse_number(value_text);
            }
        }

        if (has_formula && formula_kind == "shared" && !shared_index.empty()) {
            if (!formula_text.empty()) {
                auto f = Formula::parse("=" + formula_text);
                masters[shared_index] = {cell_addr, f.tree};
                f.cached = value;
                wb.set(Cell{cell_addr, std::move(f)});
                return;
            }
            auto m = masters.find(shared_index);
            if (m == masters.end()) malformed("shared formula " + shared_index + " used before definition");
            Formula f;
            if (m->second.tree) {
                f.tree = shift_references(m->second.tree, cell_addr.row - m->second.anchor.row,
                                          cell_addr.col - m->second.anchor.col);
                f.source = print_formula(*f.tree);
            } else {
                f.source = "=#REF!";
                f.parse_error = "shared formula master did not parse";
            }
            f.cached = value;
            wb.set(Cell{cell_addr, std::move(f)});
            return;
        }
        if (has_formula && !formula_text.empty()) {
            auto f = Formula::parse("=" + formula_text);
            f.cached = value;
            wb.set(Cell{cell_addr, std::move(f)});
            return;
        }
        wb.set(Cell{cell_addr, Constant{value ? *value : CellValue{Blank{}}}});
    };

    sax.on_start = [&](std::string_view n, const Attrs& a) {
        if (n == "row") {
            if (auto r = a.find("r"); r != a.end()) current_row = static_cast<int>(parse_number(r->second));
            else ++current_row;
            if (current_row < 1 || current_row > kMaxRows) malformed("row index out of range");
            next_col = 1;
        } else if (n == "c") {
            if (in_cell) malformed("nested cell element");
            in_cell = true;
            has_value = has_formula = has_inline = false;
            value_text.clear();
            formula_text.clear();
            inline_text.clear();
            formula_kind.clear();
            shared_index.clear();
            shared_ref.clear();
            cell_type.clear();
            if (auto t = a.find("t"); t != a.end()) cell_type = t->second;
            if (auto r = a.find("r"); r != a.end()) {
                auto parsed = CellAddr::parse(r->second, sheet_name);
                if (!parsed || !parsed->in_bounds()) malformed("bad cell reference '" + r->second + "'");
                cell_addr = *parsed;
            } else {
                if (current_row < 1) malformed("cell outside a row");
                cell_addr = CellAddr{sheet_name, next_col, current_row};
            }
            if (!cell_addr.in_bounds()) malformed("cell out of bounds");
            next_col = cell_addr.col + 1;
        } else if (n == "v" && in_cell) {
            capture = Capture::Value;
            has_value = true;
        } else if (n == "f" && in_cell) {
            capture = Capture::Formula;
            has_formula = true;
            if (auto t = a.find("t"); t != a.end()) formula_kind = t->second;
            if (auto si = a.find("si"); si != a.end()) shared_index = si->second;
            if (auto ref = a.find("ref"); ref != a.end()) shared_ref = ref->second;
        } else if (n == "is" && in_cell) {
            has_inline = true;
        } else if (n == "rPh") {
            ++phonetic_depth;
        } else if (n == "t" && in_cell && has_inline && phonetic_depth == 0) {
            capture = Capture::Inline;
        }
    };
    sax.on_end = [&](std::string_view n) {
        if (n == "c") {
            finish_cell();
            in_cell = false;
        } else if (n == "v" || n == "f" || n == "t") {
            capture = Capture::None;
        } else if (n == "rPh") {
            --phonetic_depth;
        }
    };
    sax.on_text = [&](std::string_view t) {
        switch (capture) {
            case Capture::Value: value_text.append(t); break;
            case Capture::Formula: formula_text.append(t); break;
            case Capture::Inline: inline_text.append(t); break;
            case Capture::None: break;
        }
    };
    sax.parse(xml, part);
}

}  // namespace

Workbook read_workbook(std::span<const std::uint8_t> bytes) {
    zip::Archive ar = zip::read(bytes);
    if (!ar.contains("[Content_Types].xml"))
        throw XlsxError(XlsxErrorKind::MissingWorkbookPart, "[Content_Types].xml not found");
    auto sheets = read_sheet_list(ar);
    auto rels = read_relationships(ar);
    auto shared = read_shared_strings(ar);

    Workbook wb;
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        std::string part;
        if (auto r = rels.find(sheets[i].rel_id); r != rels.end()) part = r->second;
        else part = "xl/worksheets/sheet" + std::to_string(i + 1) + ".xml";
        auto it = ar.find(part);
        if (it == ar.end()) throw XlsxError(XlsxErrorKind::MissingWorkbookPart, part + " not found");
        if (wb.has_sheet(sheets[i].name)) malformed("duplicate sheet name " + sheets[i].name);
        wb.add_sheet(sheets[i].name);
        read_sheet(it->second, part, sheets[i].name, shared, wb);
    }
    if (wb.sheets().empty()) throw XlsxError(XlsxErrorKind::MissingWorkbookPart, "workbook declares no sheets");
    return wb;
}

}  // namespace erfr
