#include "microproof/kernel/local_context.h"

#include <stdexcept>

namespace microproof::kernel {

Term LocalContext::push(std::string user_name, Term type, BinderMode mode, std::optional<Term> value) {
    LocalDecl d;
    d.fvar = fresh_id();
    d.user_name = std::move(user_name);
    d.type = std::move(type);
    d.value = std::move(value);
    d.mode = mode;
    Term fv = d.as_term();
    decls_.push_back(std::move(d));
    return fv;
}

void LocalContext::push_decl(LocalDecl decl) { decls_.push_back(std::move(decl)); }

void LocalContext::pop() { decls_.pop_back(); }

const LocalDecl* LocalContext::find(std::uint64_t fvar) const {
    for (auto it = decls_.rbegin(); it != decls_.rend(); ++it)
        if (it->fvar == fvar) return &*it;
    return nullptr;
}

const LocalDecl* LocalContext::find_by_name(const std::string& name) const {
    for (auto it = decls_.rbegin(); it != decls_.rend(); ++it)
        if (it->user_name == name) return &*it;
    return nullptr;
}

LocalContext LocalContext::replaced(std::uint64_t fvar, LocalDecl replacement) const {
    LocalContext out = *this;
    for (auto& d : out.decls_)
        if (d.fvar == fvar) {
            d = std::move(replacement);
            return out;
        }
    throw std::logic_error("LocalContext::replaced: unknown free variable");
}

LocalContext LocalContext::without(std::uint64_t fvar) const {
    LocalContext out;
    for (const auto& d : decls_)
        if (d.fvar != fvar) out.decls_.push_back(d);
    return out;
}

Term LocalContext::mk_binding(ExprKind kind, std::span<const Term> fvars, const Term& body) const {
    Term r = body;
    for (std::size_t i = fvars.size(); i-- > 0;) {
        const LocalDecl* d = find(fvars[i]->index());
        if (!d) throw std::logic_error("LocalContext::mk_binding: free variable not in context");
        r = kernel::mk_binding(kind, d->user_name, d->type, abstract_fvar(r, d->fvar), d->mode);
    }
    return r;
}

Term LocalContext::mk_pi(std::span<const Term> fvars, const Term& body) const {
    return mk_binding(ExprKind::Pi, fvars, body);
}

Term LocalContext::mk_lambda(std::span<const Term> fvars, const Term& body) const {
    return mk_binding(ExprKind::Lam, fvars, body);
}

}  // namespace microproof::kernel
