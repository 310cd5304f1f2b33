#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "microproof/kernel/expr.h"
#include "microproof/syntax/source.h"

namespace microproof::syntax {

using kernel::BinderMode;

struct TermSyntax;
using TermPtr = std::shared_ptr<const TermSyntax>;
struct TacticBlock;
struct CalcSyntax;

struct BinderName {
    std::string name;
    Span span;
};

/// One bracketed group `(a b : T)`, `{x}`, `[Field K]`, or a bare name in `fun x`.
/// Instance groups may be anonymous (no names).
struct Binder {
    std::vector<BinderName> names;
    TermPtr type;  // null when omitted
    BinderMode mode = BinderMode::Explicit;
    Span span;
};

enum class TermKind {
    Ident,      // text = (possibly dotted) name; `explicit_` for `@name`
    Hole,       // `_`
    Sort,       // text = "Prop" | "Type"
    Numeral,    // text = digits
    App,        // args = [fn, a1, ..., an]
    Fun,        // binders, args = [body]
    Forall,     // binders, args = [body]
    Binary,     // text = operator, args = [lhs, rhs]; includes `→`
    Unary,      // text = "¬" | "-", args = [operand]
    LinearMap,  // args = [R, A, B] for `A →ₗ[R] B`
    Anonymous,  // `⟨a, b⟩`, args = components
    By,         // tactics
    Calc,       // calc
    Paren,      // args = [inner]; kept only for spans, transparent to the elaborator
    Typed,      // `(e : T)`, args = [e, T]
};

struct TermSyntax {
    TermKind kind = TermKind::Hole;
    Span span;
    std::string text;
    std::vector<TermPtr> args;
    std::vector<Binder> binders;
    std::shared_ptr<const TacticBlock> tactics;
    std::shared_ptr<const CalcSyntax> calc;
    bool explicit_ = false;
};

struct CalcStep {
    TermPtr relation;  // `lhs = rhs`, with lhs a hole for every step after the first
    TermPtr proof;
    Span span;
};

struct CalcSyntax {
    std::vector<CalcStep> steps;
};

enum class TacticKind {
    Intro,
    Exact,
    Apply,
    Constructor,
    Swap,
    Have,
    Calc,
    Sorry,
    Bullet,
    Rw,
    Simp,
    SimpAll,
    Module,
    ExactSearch,
    Rfl,
    Assumption,
};

std::string_view to_string(TacticKind k);

struct RewriteRule {
    TermPtr term;
    bool reverse = false;  // `← h`
    Span span;
};

struct TacticSyntax {
    TacticKind kind = TacticKind::Sorry;
    Span span;
    std::vector<BinderName> names;     // intro
    TermPtr term;                      // exact/apply/have value/calc
    std::optional<BinderName> have_name;
    TermPtr have_type;                 // optional
    std::vector<RewriteRule> rules;    // rw/simp/simp_all
    std::shared_ptr<const TacticBlock> block;  // bullet
};

struct TacticBlock {
    std::vector<TacticSyntax> tactics;
    Span span;
};

enum class CommandKind {
    Import,
    Variable,
    Example,
    Theorem,
    Definition,
    Axiom,
    Opaque,
    Class,
    Instance,
    Attribute,
};

std::string_view to_string(CommandKind k);

struct CommandSyntax {
    CommandKind kind = CommandKind::Example;
    Span span;
    std::string module;  // import
    BinderName name;     // theorem/def/axiom/opaque/class/instance/attribute target
    std::vector<Binder> binders;
    TermPtr type;   // statement; optional for def/class
    TermPtr value;  // def body or proof (often a By term)
    /// `@[simp]`, `@[reducible]`, ... or the list of `attribute [..] name`.
    std::vector<std::string> attributes;
};

struct ParseResult {
    std::vector<CommandSyntax> commands;
    struct Error {
        std::string message;
        Span span;
        std::vector<std::string> expected;
    };
    std::vector<Error> errors;
};

}  // namespace microproof::syntax
