#include "erfr/address.hpp"

#include <cctype>
#include <stdexcept>

namespace erfr {

std::string column_name(int col) {
    std::string out;
    while (col > 0) {
        int rem = (col - 1) % 26;
        out.insert(out.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return out;
}

std::optional<int> column_index(std::string_view letters) {
    if (letters.empty() || letters.size() > 7) return std::nullopt;
    long value = 0;
    for (char c : letters) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
        value = value * 26 + (std::toupper(static_cast<unsigned char>(c)) - 'A' + 1);
    }
    return static_cast<int>(value);
}

std::string CellAddr::a1() const { return column_name(col) + std::to_string(row); }

std::string CellAddr::qualified() const { return sheet + "!" + a1(); }

std::optional<CellAddr> CellAddr::parse(std::string_view text, std::string_view sheet) {
    std::size_t i = 0;
    if (i < text.size() && text[i] == '$') ++i;
    std::size_t letters_begin = i;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    auto col = column_index(text.substr(letters_begin, i - letters_begin));
    if (!col) return std::nullopt;
    if (i < text.size() && text[i] == '$') ++i;
    std::size_t digits_begin = i;
    long row = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        row = row * 10 + (text[i] - '0');
        if (row > 100000000) return std::nullopt;
        ++i;
    }
    if (i == digits_begin || i != text.size() || row < 1) return std::nullopt;
    return CellAddr{std::string(sheet), *col, static_cast<int>(row)};
}

CellAddr addr(std::string_view a1_text, std::string_view sheet) {
    auto a = CellAddr::parse(a1_text, sheet);
    if (!a) throw std::invalid_argument("bad cell address: " + std::string(a1_text));
    return *a;
}

}  // namespace erfr
