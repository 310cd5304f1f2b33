#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microproof/kernel/expr.h"

namespace microproof::kernel {

struct LocalDecl {
    std::uint64_t fvar = 0;
    std::string user_name;
    Term type;
    std::optional<Term> value;
    BinderMode mode = BinderMode::Explicit;

    Term as_term() const { return mk_fvar(fvar); }
    /// Anonymous instance binders (`[Field K]`) are kept out of the infoview.
    bool is_instance() const { return mode == BinderMode::InstImplicit; }
};

/// Ordered hypotheses; later entries may mention earlier ones.
class LocalContext {
public:
    LocalContext() = default;

    /// Appends a fresh free variable and returns it.
    Term push(std::string user_name, Term type, BinderMode mode = BinderMode::Explicit,
              std::optional<Term> value = std::nullopt);
    void push_decl(LocalDecl decl);
    void pop();

    const LocalDecl* find(std::uint64_t fvar) const;
    /// Most recent declaration with this user name.
    const LocalDecl* find_by_name(const std::string& name) const;
    bool contains(std::uint64_t fvar) const { return find(fvar) != nullptr; }

    const std::vector<LocalDecl>& decls() const { return decls_; }
    std::size_t size() const { return decls_.size(); }
    bool empty() const { return decls_.empty(); }

    /// Context with `fvar` replaced in place by `replacement` (same position).
    LocalContext replaced(std::uint64_t fvar, LocalDecl replacement) const;
    LocalContext without(std::uint64_t fvar) const;

    /// `Π (x₁ : T₁) … (xₙ : Tₙ), body` over the given free variables (in order).
    Term mk_pi(std::span<const Term> fvars, const Term& body) const;
    Term mk_lambda(std::span<const Term> fvars, const Term& body) const;

private:
    Term mk_binding(ExprKind kind, std::span<const Term> fvars, const Term& body) const;

    std::vector<LocalDecl> decls_;
};

}  // namespace microproof::kernel
