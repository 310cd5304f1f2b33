#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "microproof/syntax/source.h"

namespace microproof::syntax {

enum class TokenKind { Identifier, Keyword, Symbol, Numeral, StringLit, Invalid, Eof };

std::string_view to_string(TokenKind k);

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;
    Span span;
    /// No other token precedes this one on its line; drives layout decisions.
    bool first_on_line = false;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_symbol(std::string_view t) const { return is(TokenKind::Symbol, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string message, Span span, std::vector<std::string> expected = {})
        : std::runtime_error(std::move(message)), span_(span), expected_(std::move(expected)) {}
    const Span& span() const { return span_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    Span span_;
    std::vector<std::string> expected_;
};

/// Tokenizes the whole source, ending with an Eof token. Comments are skipped.
/// Throws SyntaxError on a character outside the grammar.
std::vector<Token> tokenize(std::string_view source);

/// Same, but reports bad characters as Invalid tokens instead of throwing.
std::vector<Token> tokenize_lenient(std::string_view source);

bool is_command_keyword(std::string_view word);

}  // namespace microproof::syntax
