#pragma once

#include <string_view>

#include "microproof/syntax/ast.h"
#include "microproof/syntax/token.h"

namespace microproof::syntax {

/// Parses a whole `.mpl` file. Errors are collected; after an error the parser
/// resynchronizes at the next command keyword that starts a line.
ParseResult parse_file(std::string_view source);

/// Parses a single term spanning the whole input. Throws SyntaxError.
TermPtr parse_term(std::string_view source);

/// Binding powers shared by the parser and the printers.
namespace prec {
inline constexpr int kIff = 20;
inline constexpr int kArrow = 25;
inline constexpr int kOr = 30;
inline constexpr int kAnd = 35;
inline constexpr int kNot = 40;
inline constexpr int kEq = 50;
inline constexpr int kAdd = 65;
inline constexpr int kMul = 70;
inline constexpr int kSmul = 73;
inline constexpr int kNeg = 75;
inline constexpr int kMax = 1024;
}  // namespace prec

struct InfixInfo {
    int prec = 0;
    bool right_assoc = false;
};

/// Binding power of a binary operator symbol, if it is one.
std::optional<InfixInfo> infix_info(std::string_view op);

}  // namespace microproof::syntax
