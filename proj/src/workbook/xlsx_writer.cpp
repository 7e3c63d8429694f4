#include "erfr/workbook.hpp"

#include "zip.hpp"

#include <fmt/format.h>

#include <map>

namespace erfr {
namespace {

constexpr std::string_view kXmlDecl = R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)";
constexpr std::string_view kMainNs = "http://schemas.openxmlformats.org/spreadsheetml/2006/main";
constexpr std::string_view kRelNs = "http://schemas.openxmlformats.org/officeDocument/2006/relationships";

// Rejects control characters and invalid UTF-8; both make Excel refuse the file.
void check_encodable(std::string_view s, const std::string& where) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r')
            throw XlsxError(XlsxErrorKind::UnencodableText, "control character in " + where);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size())
            throw XlsxError(XlsxErrorKind::UnencodableText, "invalid UTF-8 in " + where);
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2)
                throw XlsxError(XlsxErrorKind::UnencodableText, "invalid UTF-8 in " + where);
        i += len;
    }
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\r': out += "&#13;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

bool needs_preserve(std::string_view s) {
    return !s.empty() && (s.front() == ' ' || s.back() == ' ' || s.find('\n') != std::string_view::npos ||
                          s.find('\t') != std::string_view::npos);
}

class SharedStrings {
public:
    std::size_t index(const std::string& s) {
        auto [it, inserted] = lookup_.emplace(s, order_.size());
        if (inserted) order_.push_back(s);
        return it->second;
    }
    bool empty() const { return order_.empty(); }
    std::string xml() const {
        std::string out(kXmlDecl);
        out += "\n<sst xmlns=\"" + std::string(kMainNs) + "\" count=\"" + std::to_string(order_.size()) +
               "\" uniqueCount=\"" + std::to_string(order_.size()) + "\">";
        for (const auto& s : order_) {
            out += needs_preserve(s) ? "<si><t xml:space=\"preserve\">" : "<si><t>";
            out += escape(s) + "</t></si>";
        }
        return out + "</sst>";
    }

private:
    std::map<std::string, std::size_t> lookup_;
    std::vector<std::string> order_;
};

std::string cell_xml(const Cell& cell, SharedStrings& sst) {
    std::string ref = cell.addr.a1();
    if (const Formula* f = cell.formula()) {
        std::string body = f->canonical().substr(1);
        check_encodable(body, cell.addr.qualified());
        return "<c r=\"" + ref + "\"><f>" + escape(body) + "</f></c>";
    }
    const CellValue& v = *cell.constant();
    struct {
        const std::string& ref;
        SharedStrings& sst;
        const CellAddr& where;
        std::string operator()(Blank) const { return "<c r=\"" + ref + "\"/>"; }
        // Not format_number: a stored -0 must survive the round trip.
        std::string operator()(double d) const { return "<c r=\"" + ref + "\"><v>" + fmt::format("{}", d) + "</v></c>"; }
        std::string operator()(bool b) const {
            return "<c r=\"" + ref + "\" t=\"b\"><v>" + (b ? "1" : "0") + "</v></c>";
        }
        std::string operator()(const std::string& s) const {
            check_encodable(s, where.qualified());
            return "<c r=\"" + ref + "\" t=\"s\"><v>" + std::to_string(sst.index(s)) + "</v></c>";
        }
        std::string operator()(const ErrorValue& e) const {
            return "<c r=\"" + ref + "\" t=\"e\"><v>" + escape(e.code) + "</v></c>";
        }
    } visitor{ref, sst, cell.addr};
    return std::visit(visitor, v);
}

std::string sheet_xml(const Sheet& sheet, SharedStrings& sst) {
    std::string out(kXmlDecl);
    out += "\n<worksheet xmlns=\"" + std::string(kMainNs) + "\" xmlns:r=\"" + std::string(kRelNs) + "\">";
    out += "<sheetData>";
    int open_row = 0;
    for (const auto& [a, cell] : sheet.cells) {
        if (a.row != open_row) {
            if (open_row) out += "</row>";
            out += "<row r=\"" + std::to_string(a.row) + "\">";
            open_row = a.row;
        }
        out += cell_xml(cell, sst);
    }
    if (open_row) out += "</row>";
    out += "</sheetData></worksheet>";
    return out;
}

}  // namespace

std::vector<std::uint8_t> write_workbook(const Workbook& wb) {
    if (wb.sheets().empty()) {
        Workbook single;
        single.add_sheet(std::string(kDefaultSheet));
        return write_workbook(single);
    }
    SharedStrings sst;
    std::vector<std::string> sheet_parts;
    for (const auto& s : wb.sheets()) {
        check_encodable(s.name, "sheet name");
        sheet_parts.push_back(sheet_xml(s, sst));
    }

    std::string content_types(kXmlDecl);
    content_types +=
        "\n<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
        "<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
        "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
        "<Override PartName=\"/xl/workbook.xml\" "
        "ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml\"/>";
    for (std::size_t i = 0; i < sheet_parts.size(); ++i)
        content_types += "<Override PartName=\"/xl/worksheets/sheet" + std::to_string(i + 1) +
                         ".xml\" ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml."
                         "worksheet+xml\"/>";
    if (!sst.empty())
        content_types +=
            "<Override PartName=\"/xl/sharedStrings.xml\" "
            "ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.sharedStrings+xml\"/>";
    content_types += "</Types>";

    std::string root_rels(kXmlDecl);
    root_rels +=
        "\n<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
        "<Relationship Id=\"rId1\" "
        "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument\" "
        "Target=\"xl/workbook.xml\"/></Relationships>";

    std::string workbook(kXmlDecl);
    workbook += "\n<workbook xmlns=\"" + std::string(kMainNs) + "\" xmlns:r=\"" + std::string(kRelNs) + "\"><sheets>";
    std::string wb_rels(kXmlDecl);
    wb_rels += "\n<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">";
    for (std::size_t i = 0; i < sheet_parts.size(); ++i) {
        std::string n = std::to_string(i + 1);
        workbook += "<sheet name=\"" + escape(wb.sheets()[i].name) + "\" sheetId=\"" + n + "\" r:id=\"rId" + n + "\"/>";
        wb_rels += "<Relationship Id=\"rId" + n +
                   "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet\" "
                   "Target=\"worksheets/sheet" + n + ".xml\"/>";
    }
    // Formula cells carry no cached values, so ask the application to recalculate.
    workbook += "</sheets><calcPr fullCalcOnLoad=\"1\"/></workbook>";
    if (!sst.empty())
        wb_rels += "<Relationship Id=\"rId" + std::to_string(sheet_parts.size() + 1) +
                   "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/sharedStrings\" "
                   "Target=\"sharedStrings.xml\"/>";
    wb_rels += "</Relationships>";

    std::vector<std::pair<std::string, std::string>> members;
    members.emplace_back("[Content_Types].xml", std::move(content_types));
    members.emplace_back("_rels/.rels", std::move(root_rels));
    members.emplace_back("xl/workbook.xml", std::move(workbook));
    members.emplace_back("xl/_rels/workbook.xml.rels", std::move(wb_rels));
    for (std::size_t i = 0; i < sheet_parts.size(); ++i)
        members.emplace_back("xl/worksheets/sheet" + std::to_string(i + 1) + ".xml", std::move(sheet_parts[i]));
    if (!sst.empty()) members.emplace_back("xl/sharedStrings.xml", sst.xml());
    return zip::write(members);
}

}  // namespace erfr
