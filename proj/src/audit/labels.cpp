#include "erfr/audit.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace erfr {

std::vector<std::string> label_tokens(std::string_view text) {
    std::string cleaned;
    int depth = 0;
    for (char ch : text) {
        if (ch == '(' || ch == '[') {
            ++depth;
            cleaned.push_back(' ');
            continue;
        }
        if ((ch == ')' || ch == ']') && depth > 0) {
            --depth;
            cleaned.push_back(' ');
            continue;
        }
        if (depth > 0) continue;
        auto u = static_cast<unsigned char>(ch);
        // Bytes of multi-byte UTF-8 sequences are kept as word characters.
        cleaned.push_back(std::isalnum(u) || u >= 0x80 ? static_cast<char>(std::tolower(u)) : ' ');
    }
    std::vector<std::string> out;
    std::string word;
    for (char ch : cleaned + " ") {
        if (ch == ' ') {
            if (!word.empty()) out.push_back(std::move(word));
            word.clear();
        } else {
            word.push_back(ch);
        }
    }
    return out;
}

std::vector<std::string> CellLabel::all() const {
    std::vector<std::string> out = row;
    for (const auto& w : column)
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    return out;
}

namespace {

const std::string* text_at(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    if (!c) return nullptr;
    const CellValue* v = c->constant();
    if (!v) return nullptr;
    auto* s = std::get_if<std::string>(v);
    return s && !label_tokens(*s).empty() ? s : nullptr;
}

bool empty_at(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    if (!c) return true;
    const CellValue* v = c->constant();
    return v && is_blank(*v);
}

}  // namespace

CellLabel label_of(const Workbook& wb, const CellAddr& a, const std::vector<TableRegion>& tables) {
    CellLabel label;
    for (int col = a.col - 1; col >= 1; --col) {
        if (const std::string* s = text_at(wb, CellAddr{a.sheet, col, a.row})) {
            label.row = label_tokens(*s);
            break;
        }
    }
    for (const auto& t : tables) {
        if (!t.contains_body(a)) continue;
        if (const auto* c = t.column(a.col)) label.column = label_tokens(c->header);
        return label;
    }
    for (int row = a.row - 1; row >= 1; --row) {
        CellAddr up{a.sheet, a.col, row};
        if (const std::string* s = text_at(wb, up)) {
            label.column = label_tokens(*s);
            break;
        }
        if (empty_at(wb, up)) break;
    }
    return label;
}

std::optional<MatchScore> match_label(const std::vector<std::string>& pattern, const CellLabel& label) {
    if (pattern.empty()) return std::nullopt;
    auto words = label.all();
    for (const auto& w : pattern)
        if (std::find(words.begin(), words.end(), w) == words.end()) return std::nullopt;
    auto same_set = [&](const std::vector<std::string>& part) {
        std::set<std::string> a(pattern.begin(), pattern.end()), b(part.begin(), part.end());
        return !part.empty() && a == b;
    };
    MatchScore s;
    s.exact_part = same_set(label.row) || same_set(label.column);
    std::set<std::string> uniq(pattern.begin(), pattern.end());
    s.coverage = static_cast<double>(uniq.size()) / static_cast<double>(words.size());
    return s;
}

}  // namespace erfr
