#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace microproof::kernel {

enum class SortKind : std::uint8_t { Prop, Type };

enum class BinderMode : std::uint8_t { Explicit, Implicit, InstImplicit };

enum class ExprKind : std::uint8_t { Sort, BVar, FVar, Const, App, Lam, Pi, MVar };

class Expr;
using Term = std::shared_ptr<const Expr>;

/// Immutable kernel term. Bound variables are de Bruijn indices; hypotheses of
/// a local context are referenced through free variables (FVar) carrying a
/// process-unique id, metavariables through MVar ids.
class Expr {
public:
    ExprKind kind() const { return kind_; }

    SortKind sort() const { return sort_; }
    std::uint64_t index() const { return index_; }  // BVar index, FVar id or MVar id
    const std::string& name() const { return name_; }  // Const name or binder name
    const Term& fn() const { return a_; }
    const Term& arg() const { return b_; }
    const Term& binder_type() const { return a_; }
    const Term& body() const { return b_; }
    BinderMode binder_mode() const { return mode_; }

    std::size_t hash() const { return hash_; }
    /// One more than the largest loose de Bruijn index (0 when closed).
    std::uint32_t loose_bvar_range() const { return loose_range_; }
    bool has_fvar() const { return has_fvar_; }
    bool has_mvar() const { return has_mvar_; }

    bool is_sort() const { return kind_ == ExprKind::Sort; }
    bool is_bvar() const { return kind_ == ExprKind::BVar; }
    bool is_fvar() const { return kind_ == ExprKind::FVar; }
    bool is_const() const { return kind_ == ExprKind::Const; }
    bool is_app() const { return kind_ == ExprKind::App; }
    bool is_lam() const { return kind_ == ExprKind::Lam; }
    bool is_pi() const { return kind_ == ExprKind::Pi; }
    bool is_mvar() const { return kind_ == ExprKind::MVar; }
    bool is_binding() const { return is_lam() || is_pi(); }

    struct Private;
    Expr(Private, ExprKind kind);

private:
    friend Term mk_sort(SortKind);
    friend Term mk_bvar(std::uint64_t);
    friend Term mk_fvar(std::uint64_t);
    friend Term mk_mvar(std::uint64_t);
    friend Term mk_const(std::string);
    friend Term mk_app(Term, Term);
    friend Term mk_binding(ExprKind, std::string, Term, Term, BinderMode);

    ExprKind kind_;
    SortKind sort_ = SortKind::Prop;
    BinderMode mode_ = BinderMode::Explicit;
    bool has_fvar_ = false;
    bool has_mvar_ = false;
    std::uint32_t loose_range_ = 0;
    std::uint64_t index_ = 0;
    std::size_t hash_ = 0;
    std::string name_;
    Term a_;
    Term b_;
};

Term mk_sort(SortKind s);
Term mk_prop();
Term mk_type();
Term mk_bvar(std::uint64_t idx);
Term mk_fvar(std::uint64_t id);
Term mk_mvar(std::uint64_t id);
Term mk_const(std::string name);
Term mk_app(Term fn, Term arg);
Term mk_app(Term fn, std::span<const Term> args);
Term mk_app(const std::string& fn, std::initializer_list<Term> args);
Term mk_binding(ExprKind kind, std::string name, Term type, Term body, BinderMode mode);
Term mk_lam(std::string name, Term type, Term body, BinderMode mode = BinderMode::Explicit);
Term mk_pi(std::string name, Term type, Term body, BinderMode mode = BinderMode::Explicit);
/// Non-dependent arrow `a → b`.
Term mk_arrow(Term a, Term b);

/// Process-wide fresh id source for free variables and metavariables.
std::uint64_t fresh_id();

const Term& get_app_fn(const Term& e);
std::vector<Term> get_app_args(const Term& e);
std::size_t get_app_num_args(const Term& e);
/// Name of the head constant, or empty.
const std::string& head_const_name(const Term& e);
bool is_app_of(const Term& e, const std::string& name, std::size_t nargs);

/// Replace loose BVar(i) by subst[n-1-i] for i < n and lower the remaining loose indices.
Term instantiate(const Term& e, std::span<const Term> subst);
Term instantiate1(const Term& body, const Term& value);
/// Replace FVar(ids[k]) with BVar(offset + n-1-k).
Term abstract_fvars(const Term& e, std::span<const std::uint64_t> ids);
Term abstract_fvar(const Term& e, std::uint64_t id);
Term lift_loose_bvars(const Term& e, std::uint32_t amount, std::uint32_t start = 0);
bool has_loose_bvar(const Term& e, std::uint32_t idx);
bool occurs_fvar(const Term& e, std::uint64_t id);
bool occurs_mvar(const Term& e, std::uint64_t id);
bool occurs_const(const Term& e, const std::string& name);

/// Structural replacement; the callback returns a replacement or nullopt to descend.
/// `depth` counts binders crossed.
using ReplaceFn = std::function<std::optional<Term>(const Term&, std::uint32_t depth)>;
Term replace(const Term& e, const ReplaceFn& fn);
void for_each(const Term& e, const std::function<bool(const Term&)>& fn);

/// Equality modulo binder names (de Bruijn makes alpha-equivalence structural).
bool alpha_eq(const Term& a, const Term& b);
/// Total order used for canonical orderings (sorting atoms, permutative rewriting).
int compare_terms(const Term& a, const Term& b);

struct TermHash {
    std::size_t operator()(const Term& t) const { return t->hash(); }
};
struct TermAlphaEq {
    bool operator()(const Term& a, const Term& b) const { return alpha_eq(a, b); }
};

/// Debug rendering with raw indices; user-facing output goes through elab::Printer.
std::string debug_string(const Term& e);

std::size_t term_size(const Term& e);

}  // namespace microproof::kernel
