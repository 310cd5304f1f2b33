#include "microproof/elab/meta.h"

#include <stdexcept>
#include <unordered_set>

namespace microproof::elab {

using namespace kernel;

namespace {

constexpr int kMaxUnifyDepth = 512;

}  // namespace

Meta::Meta(const Environment& env, MetaContext& mctx, LocalContext lctx)
    : env_(env), mctx_(mctx), lctx_(std::move(lctx)) {}

Term Meta::infer(const Term& t) {
    TypeChecker tc(env_, lctx_, &mctx_);
    return instantiate(tc.infer(t, true));
}

Term Meta::whnf_core(const Term& t) {
    TypeChecker tc(env_, {}, &mctx_);
    return tc.whnf_core(t);
}

Term Meta::whnf(const Term& t, Transparency tr) {
    TypeChecker tc(env_, {}, &mctx_);
    return tc.whnf(t, tr);
}

std::optional<Term> Meta::unfold(const Term& t, Transparency tr) {
    TypeChecker tc(env_, {}, &mctx_);
    return tc.unfold_head(tc.whnf_core(t), tr);
}

bool Meta::is_prop(const Term& type) {
    try {
        Term s = whnf(infer(type));
        return s->is_sort() && s->sort() == SortKind::Prop;
    } catch (const KernelError&) {
        return false;
    }
}

bool Meta::is_proof(const Term& t) {
    try {
        return is_prop(infer(t));
    } catch (const KernelError&) {
        return false;
    }
}

Term Meta::new_mvar(Term type, std::string user_name, MVarKind kind) {
    return mctx_.new_mvar(std::move(type), lctx_, std::move(user_name), kind);
}

Term Meta::push_local(std::string name, Term type, BinderMode mode) {
    return lctx_.push(std::move(name), std::move(type), mode);
}

bool Meta::is_def_eq(const Term& a, const Term& b) {
    auto cp = mctx_.checkpoint();
    if (unify(a, b, 0)) return true;
    mctx_.rollback(cp);
    return false;
}

const Declaration* Meta::unfoldable(const Term& t) const {
    const Term& f = get_app_fn(t);
    if (!f->is_const()) return nullptr;
    const Declaration* d = env_.find(f->name());
    if (!d || d->kind != DeclKind::Definition || !d->value) return nullptr;
    switch (d->reducibility) {
        case Reducibility::Reducible: return transparency_ != Transparency::None ? d : nullptr;
        case Reducibility::Default: return transparency_ == Transparency::All ? d : nullptr;
        case Reducibility::Opaque: return nullptr;
    }
    return nullptr;
}

bool Meta::unify(const Term& a, const Term& b, int depth) {
    if (depth > kMaxUnifyDepth) return false;
    if (a.get() == b.get()) return true;
    Term x = whnf_core(a);
    Term y = whnf_core(b);
    if (alpha_eq(x, y)) return true;

    if (is_assignable(x)) {
        auto cp = mctx_.checkpoint();
        if (try_assign(x, y, depth)) return true;
        mctx_.rollback(cp);
    }
    if (is_assignable(y)) {
        auto cp = mctx_.checkpoint();
        if (try_assign(y, x, depth)) return true;
        mctx_.rollback(cp);
    }

    const Declaration* dx = unfoldable(x);
    const Declaration* dy = unfoldable(y);
    if (dx && dy && dx == dy && get_app_num_args(x) == get_app_num_args(y)) {
        auto cp = mctx_.checkpoint();
        auto xs = get_app_args(x);
        auto ys = get_app_args(y);
        bool ok = true;
        for (std::size_t i = 0; ok && i < xs.size(); ++i) ok = unify(xs[i], ys[i], depth + 1);
        if (ok) return true;
        mctx_.rollback(cp);
    }
    if (dx || dy) {
        auto step = [&](const Term& t, const Declaration* d) { return whnf_core(mk_app(*d->value, get_app_args(t))); };
        if (dx && dy) {
            if (dx->height >= dy->height) x = step(x, dx);
            if (dy->height >= dx->height) y = step(y, dy);
        } else if (dx) {
            x = step(x, dx);
        } else {
            y = step(y, dy);
        }
        return unify(x, y, depth + 1);
    }
    return unify_core(x, y, depth);
}

bool Meta::unify_core(const Term& a, const Term& b, int depth) {
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case ExprKind::Sort: return a->sort() == b->sort();
        case ExprKind::BVar:
        case ExprKind::FVar:
        case ExprKind::MVar: return a->index() == b->index();
        case ExprKind::Const: return a->name() == b->name();
        case ExprKind::App: {
            if (get_app_num_args(a) != get_app_num_args(b)) return false;
            if (!unify(get_app_fn(a), get_app_fn(b), depth + 1)) return false;
            auto xs = get_app_args(a);
            auto ys = get_app_args(b);
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (!unify(xs[i], ys[i], depth + 1)) return false;
            return true;
        }
        case ExprKind::Lam:
        case ExprKind::Pi: {
            if (!unify(a->binder_type(), b->binder_type(), depth + 1)) return false;
            Term x = push_local(a->name(), instantiate(a->binder_type()), a->binder_mode());
            bool ok = unify(instantiate1(a->body(), x), instantiate1(b->body(), x), depth + 1);
            pop_local();
            return ok;
        }
    }
    return false;
}

bool Meta::is_assignable(const Term& t) const {
    const Term& f = get_app_fn(t);
    if (!f->is_mvar()) return false;
    const MVarDecl* d = mctx_.decl(f->index());
    return d && d->kind != MVarKind::Goal && !mctx_.is_assigned(f->index());
}

bool Meta::scope_ok(const MVarDecl& d, const Term& value) const {
    bool ok = true;
    for_each(value, [&](const Term& s) {
        if (!ok || !s->has_fvar()) return false;
        if (s->is_fvar() && !d.lctx.contains(s->index())) ok = false;
        return ok;
    });
    return ok;
}

bool Meta::assign_checked(std::uint64_t id, const Term& raw, int depth) {
    Term value = instantiate(raw);
    if (mctx_.is_assigned(id)) return unify(mk_mvar(id), value, depth + 1);
    if (occurs_mvar(value, id)) return false;
    const MVarDecl d = mctx_.get(id);
    if (!scope_ok(d, value)) return false;
    Term vt;
    try {
        TypeChecker tc(env_, d.lctx, &mctx_);
        vt = tc.infer(value, true);
    } catch (const KernelError&) {
        return false;
    }
    if (!unify(d.type, vt, depth + 1)) return false;
    if (mctx_.is_assigned(id)) return unify(mk_mvar(id), value, depth + 1);
    value = instantiate(value);
    if (occurs_mvar(value, id)) return false;
    mctx_.assign(id, value);
    return true;
}

bool Meta::try_assign(const Term& lhs, const Term& rhs, int depth) {
    const Term& m = get_app_fn(lhs);
    auto args = get_app_args(lhs);
    if (args.empty()) return assign_checked(m->index(), rhs, depth);

    bool pattern = true;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& a : args) {
        Term ia = instantiate(a);
        if (!ia->is_fvar() || !seen.insert(ia->index()).second || !lctx_.contains(ia->index())) {
            pattern = false;
            break;
        }
    }
    if (pattern) {
        std::vector<Term> fvars;
        for (const auto& a : args) fvars.push_back(instantiate(a));
        auto cp = mctx_.checkpoint();
        if (assign_checked(m->index(), mk_lambda(fvars, instantiate(rhs)), depth)) return true;
        mctx_.rollback(cp);
    }

    // first-order approximation: ?m a₁ … aₙ =?= g b₁ … bₖ with k ≥ n
    Term r = whnf_core(rhs);
    if (!r->is_app()) return false;
    auto rargs = get_app_args(r);
    if (rargs.size() < args.size()) return false;
    std::size_t k = rargs.size() - args.size();
    Term prefix = mk_app(get_app_fn(r), std::span<const Term>(rargs.data(), k));
    if (!unify(m, prefix, depth + 1)) return false;
    for (std::size_t i = 0; i < args.size(); ++i)
        if (!unify(args[i], rargs[k + i], depth + 1)) return false;
    return true;
}

Term Meta::elim_mvar_deps(const std::vector<Term>& fvars, const Term& body) {
    Term cur = instantiate(body);
    if (!cur->has_mvar() || fvars.empty()) return cur;
    for (auto id : mctx_.unassigned_in(cur)) {
        const MVarDecl d = mctx_.get(id);
        if (mctx_.is_assigned(id)) continue;
        std::vector<Term> deps;
        for (const auto& f : fvars)
            if (d.lctx.contains(f->index())) deps.push_back(f);
        if (deps.empty()) continue;
        LocalContext outer;
        for (const auto& ld : d.lctx.decls()) {
            bool dep = false;
            for (const auto& f : deps) dep = dep || ld.fvar == f->index();
            if (!dep) outer.push_decl(ld);
        }
        Term type = d.lctx.mk_pi(deps, instantiate(d.type));
        Term fresh = mctx_.new_mvar(instantiate(type), outer, d.user_name, d.kind == MVarKind::Goal ? MVarKind::Natural : d.kind);
        mctx_.assign(id, mk_app(fresh, deps));
    }
    return instantiate(cur);
}

Term Meta::mk_pi(const std::vector<Term>& fvars, const Term& body) {
    Term r = elim_mvar_deps(fvars, body);
    for (std::size_t i = fvars.size(); i-- > 0;) {
        const LocalDecl* d = lctx_.find(fvars[i]->index());
        if (!d) throw std::logic_error("Meta: free variable not in context");
        std::vector<Term> prefix(fvars.begin(), fvars.begin() + static_cast<std::ptrdiff_t>(i));
        Term ty = elim_mvar_deps(prefix, d->type);
        r = mk_binding(ExprKind::Pi, d->user_name, ty, abstract_fvar(r, d->fvar), d->mode);
    }
    return r;
}

Term Meta::mk_lambda(const std::vector<Term>& fvars, const Term& body) {
    Term r = elim_mvar_deps(fvars, body);
    for (std::size_t i = fvars.size(); i-- > 0;) {
        const LocalDecl* d = lctx_.find(fvars[i]->index());
        if (!d) throw std::logic_error("Meta: free variable not in context");
        std::vector<Term> prefix(fvars.begin(), fvars.begin() + static_cast<std::ptrdiff_t>(i));
        Term ty = elim_mvar_deps(prefix, d->type);
        r = mk_binding(ExprKind::Lam, d->user_name, ty, abstract_fvar(r, d->fvar), d->mode);
    }
    return r;
}

}  // namespace microproof::elab
