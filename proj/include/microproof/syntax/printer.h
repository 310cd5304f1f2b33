#pragma once

#include <string>

#include "microproof/syntax/ast.h"

namespace microproof::syntax {

/// Renders surface syntax on one line with the minimal parentheses needed to
/// re-parse to the same tree.
std::string format_syntax(const TermPtr& t);
std::string format_tactic(const TacticSyntax& t);

/// Structural equality ignoring spans and redundant parentheses.
bool syntax_equal(const TermPtr& a, const TermPtr& b);

}  // namespace microproof::syntax
