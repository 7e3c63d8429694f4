#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace erfr::detail {

enum class Tok {
    Number,
    String,
    Error,      // #REF! and friends
    Word,       // identifiers, cell references, TRUE/FALSE
    QuotedName, // 'Sheet name'
    Op,         // + - * / ^ & = <> < <= > >= %
    LParen,
    RParen,
    Comma,
    Colon,
    Bang,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;  // offset into the original text
    double number = 0;
};

/// Splits formula text (without the leading '=') into tokens. Whitespace is
/// dropped. `offset` is added to every reported position.
std::vector<Token> lex(std::string_view text, std::size_t offset);

}  // namespace erfr::detail
