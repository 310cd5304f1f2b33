#include <array>
#include <cstdint>

#include <fmt/format.h>

#include "microproof/syntax/token.h"

namespace microproof::syntax {

std::string_view to_string(TokenKind k) {
    switch (k) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Symbol: return "symbol";
        case TokenKind::Numeral: return "numeral";
        case TokenKind::StringLit: return "string";
        case TokenKind::Invalid: return "invalid";
        case TokenKind::Eof: return "end of input";
    }
    return "?";
}

namespace {

constexpr std::array kKeywords = {"import", "variable", "example", "theorem", "lemma", "def",  "axiom",
                                  "opaque", "class",    "instance", "attribute", "fun", "by", "calc",
                                  "have",   "Type",     "Prop"};

constexpr std::array kCommandKeywords = {"import", "variable", "example", "theorem", "lemma",
                                         "def",    "axiom",    "opaque",  "class",   "instance",
                                         "attribute"};

// Longest match first; ASCII spellings are normalized to the Unicode symbol.
struct SymbolSpelling {
    std::string_view spelling;
    std::string_view symbol;
};
constexpr SymbolSpelling kSymbols[] = {
    {"→ₗ[", "→ₗ["}, {"<->", "↔"}, {":=", ":="}, {"=>", "=>"}, {"@[", "@["},
    {"->", "→"},    {"<-", "←"},   {"!=", "≠"},  {"←", "←"},   {"→", "→"},   {"↔", "↔"},
    {"∧", "∧"},     {"∨", "∨"},    {"¬", "¬"},   {"≠", "≠"},   {"∈", "∈"},   {"∀", "∀"},
    {"•", "•"},     {"·", "·"},    {"⊢", "⊢"},   {"⟨", "⟨"},   {"⟩", "⟩"},   {"=", "="},
    {"+", "+"},     {"-", "-"},    {"*", "*"},   {"(", "("},   {")", ")"},   {"{", "{"},
    {"}", "}"},     {"[", "["},    {"]", "]"},   {"@", "@"},   {":", ":"},   {",", ","},
    {";", ";"},     {"_", "_"},    {"|", "|"},
};

struct Decoded {
    char32_t cp = 0;
    std::uint32_t len = 0;  // 0 on malformed input
};

Decoded decode(std::string_view s, std::size_t i) {
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char c = byte(i);
    if (c < 0x80) return {c, 1};
    std::uint32_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || i + len > s.size()) return {0, 0};
    char32_t cp = c & (0xFF >> (len + 1));
    for (std::uint32_t k = 1; k < len; ++k) {
        if ((byte(i + k) & 0xC0) != 0x80) return {0, 0};
        cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    return {cp, len};
}

bool is_greek_letter(char32_t c) {
    if (c == U'λ' || c == U'Π' || c == U'Σ') return false;
    return (c >= 0x391 && c <= 0x3A9) || (c >= 0x3B1 && c <= 0x3C9) || (c >= 0x3CA && c <= 0x3FB);
}

bool is_letter_like(char32_t c) { return (c >= 0x2100 && c <= 0x214F) || (c >= 0x1D400 && c <= 0x1D7FF); }

bool is_subscript(char32_t c) { return (c >= 0x2080 && c <= 0x209C) || (c >= 0x1D62 && c <= 0x1D6A); }

bool is_ident_start(char32_t c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || is_greek_letter(c) ||
           is_letter_like(c);
}

bool is_ident_rest(char32_t c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\'' || is_subscript(c) ||
           c == U'✝';
}

bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            Token t = next();
            out.push_back(t);
            if (t.kind == TokenKind::Eof) break;
        }
        return out;
    }

private:
    Position here() const { return pos_; }

    char32_t peek(std::size_t ahead = 0) const {
        std::size_t i = pos_.offset;
        for (std::size_t k = 0; k <= ahead; ++k) {
            if (i >= src_.size()) return 0;
            Decoded d = decode(src_, i);
            if (d.len == 0) return 0xFFFD;
            if (k == ahead) return d.cp;
            i += d.len;
        }
        return 0;
    }

    void advance() {
        if (pos_.offset >= src_.size()) return;
        Decoded d = decode(src_, pos_.offset);
        std::uint32_t len = d.len == 0 ? 1 : d.len;
        if (src_[pos_.offset] == '\n') {
            ++pos_.line;
            pos_.col = 0;
            line_has_token_ = false;
        } else {
            ++pos_.col;
        }
        pos_.offset += len;
    }

    bool starts_with(std::string_view s) const { return src_.substr(pos_.offset, s.size()) == s; }

    void skip_trivia() {
        while (pos_.offset < src_.size()) {
            char c = src_[pos_.offset];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (starts_with("--")) {
                while (pos_.offset < src_.size() && src_[pos_.offset] != '\n') advance();
            } else if (starts_with("/-")) {
                int depth = 0;
                do {
                    if (starts_with("/-")) {
                        ++depth;
                        advance();
                        advance();
                    } else if (starts_with("-/")) {
                        --depth;
                        advance();
                        advance();
                    } else {
                        advance();
                    }
                } while (depth > 0 && pos_.offset < src_.size());
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, Position begin, std::string text) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = {begin, pos_};
        t.first_on_line = !line_has_token_;
        line_has_token_ = true;
        return t;
    }

    std::string slice(const Position& begin) const {
        return std::string(src_.substr(begin.offset, pos_.offset - begin.offset));
    }

    Token next() {
        Position begin = here();
        if (pos_.offset >= src_.size()) return make(TokenKind::Eof, begin, "");
        char32_t c = peek();
        if (c == '_' && !is_ident_rest(peek(1))) {
            advance();
            return make(TokenKind::Symbol, begin, "_");
        }
        if (is_ident_start(c)) return identifier(begin);
        if (is_digit(c)) {
            while (is_digit(peek())) advance();
            return make(TokenKind::Numeral, begin, slice(begin));
        }
        if (c == '"') return string_literal(begin);
        if (c == U'λ') {
            advance();
            return make(TokenKind::Keyword, begin, "fun");
        }
        for (const auto& s : kSymbols) {
            if (starts_with(s.spelling)) {
                std::size_t end = pos_.offset + s.spelling.size();
                while (pos_.offset < end) advance();
                return make(TokenKind::Symbol, begin, std::string(s.symbol));
            }
        }
        advance();
        return make(TokenKind::Invalid, begin, slice(begin));
    }

    Token identifier(Position begin) {
        while (true) {
            while (is_ident_rest(peek())) advance();
            // qualified names and numeric projections (`h.1`) form one path
            if (peek() == '.' && (is_ident_start(peek(1)) || is_digit(peek(1)))) {
                advance();
                continue;
            }
            break;
        }
        std::string text = slice(begin);
        if (text == "exact" && peek() == '?') {
            advance();
            text = "exact?";
        }
        for (auto k : kKeywords)
            if (text == k) return make(TokenKind::Keyword, begin, text);
        return make(TokenKind::Identifier, begin, text);
    }

    Token string_literal(Position begin) {
        advance();
        std::string value;
        while (pos_.offset < src_.size() && peek() != '"' && peek() != '\n') {
            if (peek() == '\\') advance();
            std::size_t from = pos_.offset;
            advance();
            value += src_.substr(from, pos_.offset - from);
        }
        if (peek() != '"') return make(TokenKind::Invalid, begin, slice(begin));
        advance();
        return make(TokenKind::StringLit, begin, value);
    }

    std::string_view src_;
    Position pos_;
    bool line_has_token_ = false;
};

}  // namespace

std::vector<Token> tokenize_lenient(std::string_view source) { return Lexer(source).run(); }

std::vector<Token> tokenize(std::string_view source) {
    auto toks = tokenize_lenient(source);
    for (const auto& t : toks)
        if (t.kind == TokenKind::Invalid)
            throw SyntaxError(fmt::format("invalid character '{}'", t.text), t.span);
    return toks;
}

bool is_command_keyword(std::string_view word) {
    for (auto k : kCommandKeywords)
        if (word == k) return true;
    return false;
}

}  // namespace microproof::syntax
