#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microproof/elab/errors.h"
#include "microproof/elab/meta.h"
#include "microproof/syntax/ast.h"

namespace microproof::elab {

using syntax::TermPtr;

class Elaborator;

/// Runs `by` blocks met inside terms. Implemented by the tactic framework.
class TacticHost {
public:
    virtual ~TacticHost() = default;
    /// Proves `expected` with `block`; failures are logged and replaced by sorry.
    virtual Term run_nested(Elaborator& el, const syntax::TacticBlock& block, const Term& expected,
                            const Span& by_span) = 0;
};

/// Term elaboration against an optional expected type. Implicit and instance
/// arguments become metavariables; instance problems are queued and solved by
/// synthesize_pending.
class Elaborator {
public:
    Elaborator(Meta& meta, MessageLog& log, TacticHost* host = nullptr);

    Meta& meta() { return meta_; }
    MessageLog& log() { return log_; }
    TacticHost* host() { return host_; }

    Term elab(const TermPtr& stx, const std::optional<Term>& expected = std::nullopt);
    /// Elaborates and unifies the result type with `expected` (TypeMismatch otherwise).
    Term elab_check(const TermPtr& stx, const Term& expected);
    /// Elaborates a type (the result must live in a sort).
    Term elab_type(const TermPtr& stx);

    /// Elaborates binder groups, pushing one local per name onto the context.
    std::vector<Term> elab_binders(const std::vector<syntax::Binder>& binders);

    /// `@c a₁ … aₙ` with implicit and instance arguments inserted around the
    /// given explicit arguments.
    Term mk_app(const std::string& const_name, const std::vector<Term>& explicit_args, const Span& span = {});

    /// Solves queued instance problems. With `final`, problems that are still
    /// stuck on metavariables are errors.
    void synthesize_pending(bool final);
    /// Removes and returns the queued instance metavariables that are still unassigned.
    std::vector<std::uint64_t> take_pending();

    /// Unknown single-letter identifiers become implicit `Type` locals.
    void set_auto_bound(bool on) { auto_bound_ = on; }
    const std::vector<Term>& auto_bound_locals() const { return auto_bound_locals_; }

    std::string render(const Term& t) const;

private:
    struct Typed {
        Term term;
        Term type;
    };
    struct Arg {
        TermPtr stx;  // null when pre-elaborated
        Typed value;
    };
    struct Pending {
        std::uint64_t mvar;
        Span span;
    };

    Typed elab_core(const TermPtr& stx, const std::optional<Term>& expected);
    Typed elab_ident(const syntax::TermSyntax& stx, std::vector<Arg> args, const std::optional<Term>& expected,
                     const Span& span);
    Typed elab_app(const syntax::TermSyntax& stx, const std::optional<Term>& expected);
    Typed app_args(Typed fn, std::vector<Arg> args, bool explicit_mode, const Span& span,
                   const std::optional<Typed>& self = std::nullopt, const std::string& self_head = {},
                   const std::optional<Term>& expected = std::nullopt);
    Typed project(Typed base, const std::string& field, std::vector<Arg> args, const Span& span,
                  const std::optional<Term>& expected = std::nullopt);
    Typed elab_const_app(const std::string& name, std::vector<Arg> args, const Span& span);
    Typed elab_binding(const syntax::TermSyntax& stx, const std::optional<Term>& expected);
    Typed elab_anonymous(const syntax::TermSyntax& stx, const std::optional<Term>& expected);
    Typed elab_calc(const syntax::TermSyntax& stx, const std::optional<Term>& expected);
    Typed elab_by(const syntax::TermSyntax& stx, const std::optional<Term>& expected);
    Typed check_against(Typed value, const Term& expected, const syntax::TermSyntax& stx);
    Term coerce_linear_map(Typed& fn, const Span& span);
    Term const_type(const std::string& name, const Span& span) const;
    bool try_auto_bound(const std::string& name);
    [[noreturn]] void mismatch(const Term& value, const Term& actual, const Term& expected, const Span& span);

    Meta& meta_;
    MessageLog& log_;
    TacticHost* host_;
    std::vector<Pending> pending_;
    bool auto_bound_ = false;
    int binder_depth_ = 0;
    std::vector<Term> auto_bound_locals_;
};

}  // namespace microproof::elab
