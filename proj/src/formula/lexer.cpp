#include "lexer.hpp"

#include "erfr/formula.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace erfr::detail {
namespace {

constexpr std::array<std::string_view, 8> kErrorCodes = {
    "#DIV/0!", "#N/A", "#NAME?", "#NULL!", "#NUM!", "#REF!", "#VALUE!", "#CYCLE!",
};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

}  // namespace

std::vector<Token> lex(std::string_view text, std::size_t offset) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](std::size_t at, const std::string& what) {
        throw FormulaError(ParseErrorKind::LexError, offset + at, what);
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    i = j;
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                }
            }
            // A digit run glued to letters is a word such as a row-less name; reject.
            if (i < text.size() && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                fail(i, "malformed number");
            std::string_view lit = text.substr(start, i - start);
            double v = 0;
            auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
            if (ec != std::errc() || ptr != lit.data() + lit.size()) fail(start, "malformed number");
            out.push_back({Tok::Number, std::string(lit), offset + start, v});
            continue;
        }
        if (c == '"') {
            std::string value;
            ++i;
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        value.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                value.push_back(text[i++]);
            }
            if (!closed) fail(start, "unterminated string");
            out.push_back({Tok::String, std::move(value), offset + start});
            continue;
        }
        if (c == '\'') {
            std::string value;
            ++i;
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '\'') {
                    if (i + 1 < text.size() && text[i + 1] == '\'') {
                        value.push_back('\'');
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                value.push_back(text[i++]);
            }
            if (!closed || value.empty()) fail(start, "unterminated sheet name");
            out.push_back({Tok::QuotedName, std::move(value), offset + start});
            continue;
        }
        if (c == '#') {
            bool matched = false;
            for (auto code : kErrorCodes) {
                if (text.substr(i, code.size()).size() == code.size()) {
                    std::string upper;
                    for (char ch : text.substr(i, code.size()))
                        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
                    if (upper == code) {
                        out.push_back({Tok::Error, upper, offset + start});
                        i += code.size();
                        matched = true;
                        break;
                    }
                }
            }
            if (!matched) fail(start, "unknown error literal");
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            while (i < text.size() && is_word_char(text[i])) ++i;
            out.push_back({Tok::Word, std::string(text.substr(start, i - start)), offset + start});
            continue;
        }
        switch (c) {
            case '(':
                out.push_back({Tok::LParen, "(", offset + start});
                ++i;
                continue;
            case ')':
                out.push_back({Tok::RParen, ")", offset + start});
                ++i;
                continue;
            case ',':
                out.push_back({Tok::Comma, ",", offset + start});
                ++i;
                continue;
            case ':':
                out.push_back({Tok::Colon, ":", offset + start});
                ++i;
                continue;
            case '!':
                out.push_back({Tok::Bang, "!", offset + start});
                ++i;
                continue;
            case '+':
            case '-':
            case '*':
            case '/':
            case '^':
            case '&':
            case '=':
            case '%':
                out.push_back({Tok::Op, std::string(1, c), offset + start});
                ++i;
                continue;
            case '<':
                if (i + 1 < text.size() && (text[i + 1] == '=' || text[i + 1] == '>')) {
                    out.push_back({Tok::Op, std::string(text.substr(i, 2)), offset + start});
                    i += 2;
                } else {
                    out.push_back({Tok::Op, "<", offset + start});
                    ++i;
                }
                continue;
            case '>':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    out.push_back({Tok::Op, ">=", offset + start});
                    i += 2;
                } else {
                    out.push_back({Tok::Op, ">", offset + start});
                    ++i;
                }
                continue;
            default:
                fail(start, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", offset + text.size()});
    return out;
}

}  // namespace erfr::detail
