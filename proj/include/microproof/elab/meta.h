#pragma once

#include <optional>
#include <string>

#include "microproof/elab/meta_context.h"
#include "microproof/kernel/environment.h"
#include "microproof/kernel/type_checker.h"

namespace microproof::elab {

using kernel::Environment;
using kernel::Transparency;

/// Metavariable-aware reduction, inference and unification over a fixed
/// environment and a local context that grows and shrinks with binders.
class Meta {
public:
    Meta(const Environment& env, MetaContext& mctx, LocalContext lctx = {});

    const Environment& env() const { return env_; }
    MetaContext& mctx() { return mctx_; }
    const MetaContext& mctx() const { return mctx_; }
    LocalContext& lctx() { return lctx_; }
    const LocalContext& lctx() const { return lctx_; }

    Term instantiate(const Term& t) const { return mctx_.instantiate(t); }
    Term infer(const Term& t);
    Term whnf_core(const Term& t);
    Term whnf(const Term& t, Transparency tr = Transparency::All);
    /// Unfolds the head definition once (then whnf_core), if `tr` allows.
    std::optional<Term> unfold(const Term& t, Transparency tr = Transparency::All);
    bool is_prop(const Term& type);
    bool is_proof(const Term& t);

    /// Unifies `a` and `b`, assigning metavariables on success. On failure every
    /// assignment made during the attempt is rolled back.
    bool is_def_eq(const Term& a, const Term& b);

    Term new_mvar(Term type, std::string user_name = {}, MVarKind kind = MVarKind::Natural);
    Term push_local(std::string name, Term type, kernel::BinderMode mode = kernel::BinderMode::Explicit);
    void pop_local() { lctx_.pop(); }

    void set_transparency(Transparency tr) { transparency_ = tr; }
    Transparency transparency() const { return transparency_; }

    /// Abstracts `fvars` out of `body` into a binder telescope. Unassigned
    /// metavariables whose context contains one of the fvars are first replaced
    /// by applications of fresh metavariables living outside the binders.
    Term mk_pi(const std::vector<Term>& fvars, const Term& body);
    Term mk_lambda(const std::vector<Term>& fvars, const Term& body);

private:
    bool unify(const Term& a, const Term& b, int depth);
    bool unify_core(const Term& a, const Term& b, int depth);
    bool is_assignable(const Term& t) const;
    bool try_assign(const Term& lhs, const Term& rhs, int depth);
    bool assign_checked(std::uint64_t id, const Term& value, int depth);
    bool scope_ok(const MVarDecl& d, const Term& value) const;
    Term elim_mvar_deps(const std::vector<Term>& fvars, const Term& body);
    const kernel::Declaration* unfoldable(const Term& t) const;

    const Environment& env_;
    MetaContext& mctx_;
    LocalContext lctx_;
    Transparency transparency_ = Transparency::All;
};

}  // namespace microproof::elab
