#include "microproof/kernel/type_checker.h"

#include <fmt/format.h>

namespace microproof::kernel {

std::string to_string(KernelErrorKind k) {
    switch (k) {
        case KernelErrorKind::UnboundVariable: return "UnboundVariable";
        case KernelErrorKind::UnknownConstant: return "UnknownConstant";
        case KernelErrorKind::AppTypeMismatch: return "AppTypeMismatch";
        case KernelErrorKind::NotAFunction: return "NotAFunction";
        case KernelErrorKind::NotASort: return "NotASort";
        case KernelErrorKind::TypeMismatch: return "TypeMismatch";
        case KernelErrorKind::DuplicateName: return "DuplicateName";
        case KernelErrorKind::UnexpectedMVar: return "UnexpectedMVar";
        case KernelErrorKind::MalformedDeclaration: return "MalformedDeclaration";
    }
    return "KernelError";
}

namespace {

class ScopedLocal {
public:
    ScopedLocal(LocalContext& lctx, const std::string& name, const Term& type, BinderMode mode)
        : lctx_(lctx), fvar_(lctx.push(name, type, mode)) {}
    ~ScopedLocal() { lctx_.pop(); }
    ScopedLocal(const ScopedLocal&) = delete;
    ScopedLocal& operator=(const ScopedLocal&) = delete;
    const Term& fvar() const { return fvar_; }

private:
    LocalContext& lctx_;
    Term fvar_;
};

}  // namespace

TypeChecker::TypeChecker(const Environment& env, LocalContext lctx, const MetaView* meta)
    : env_(env), lctx_(std::move(lctx)), meta_(meta) {}

Term TypeChecker::infer(const Term& t, bool infer_only) { return infer_core(t, infer_only); }

Term TypeChecker::infer_core(const Term& t, bool infer_only) {
    if (auto it = infer_cache_.find(t.get()); it != infer_cache_.end()) return it->second.second;
    Term result;
    switch (t->kind()) {
        case ExprKind::Sort:
            // two sorts: Prop : Type and Type : Type
            result = mk_type();
            break;
        case ExprKind::BVar:
            throw KernelError(KernelErrorKind::UnboundVariable,
                              fmt::format("loose bound variable #{}", t->index()));
        case ExprKind::FVar: {
            const LocalDecl* d = lctx_.find(t->index());
            if (!d)
                throw KernelError(KernelErrorKind::UnboundVariable,
                                  fmt::format("unknown free variable %{}", t->index()));
            result = d->type;
            break;
        }
        case ExprKind::MVar: {
            if (!meta_)
                throw KernelError(KernelErrorKind::UnexpectedMVar, "metavariable reached the kernel");
            auto ty = meta_->mvar_type(t->index());
            if (!ty) throw KernelError(KernelErrorKind::UnexpectedMVar, "unknown metavariable");
            result = *ty;
            break;
        }
        case ExprKind::Const: {
            const Declaration* d = env_.find(t->name());
            if (!d) throw KernelError(KernelErrorKind::UnknownConstant, "unknown constant '" + t->name() + "'");
            result = d->type;
            break;
        }
        case ExprKind::App:
            result = infer_app(t, infer_only);
            break;
        case ExprKind::Lam:
        case ExprKind::Pi:
            result = infer_binding(t, infer_only);
            break;
    }
    if (!infer_only) infer_cache_.emplace(t.get(), std::make_pair(t, result));
    return result;
}

Term TypeChecker::infer_app(const Term& t, bool infer_only) {
    const Term& fn = get_app_fn(t);
    auto args = get_app_args(t);
    std::size_t i = 0;
    Term ftype;
    if (fn->is_const() && fn->name() == "sorryAx" && !args.empty()) {
        // sorryAx T : T for any type T, in either sort
        if (!infer_only) ensure_sort(args[0]);
        ftype = args[0];
        i = 1;
    } else {
        ftype = infer_core(fn, infer_only);
    }
    for (; i < args.size(); ++i) {
        if (!ftype->is_pi()) ftype = whnf(ftype);
        if (!ftype->is_pi())
            throw KernelError(KernelErrorKind::NotAFunction,
                              fmt::format("function expected, got term of type {}", debug_string(ftype)),
                              std::nullopt, ftype);
        if (!infer_only) {
            Term at = infer_core(args[i], false);
            if (!is_def_eq(at, ftype->binder_type()))
                throw KernelError(KernelErrorKind::AppTypeMismatch,
                                  fmt::format("application type mismatch: argument {} has type {} but {} was expected",
                                              debug_string(args[i]), debug_string(at),
                                              debug_string(ftype->binder_type())),
                                  ftype->binder_type(), at);
        }
        ftype = instantiate1(ftype->body(), args[i]);
    }
    return ftype;
}

Term TypeChecker::infer_binding(const Term& t, bool infer_only) {
    if (!infer_only || t->is_pi()) ensure_sort(t->binder_type());
    ScopedLocal x(lctx_, t->name(), t->binder_type(), t->binder_mode());
    Term body = instantiate1(t->body(), x.fvar());
    if (t->is_pi()) {
        SortKind s = ensure_sort(body);
        // impredicative Prop
        return mk_sort(s == SortKind::Prop ? SortKind::Prop : SortKind::Type);
    }
    Term bt = infer_core(body, infer_only);
    return mk_pi(t->name(), t->binder_type(), abstract_fvar(bt, x.fvar()->index()), t->binder_mode());
}

SortKind TypeChecker::ensure_sort(const Term& type) {
    Term s = whnf(infer_core(type, false));
    if (!s->is_sort())
        throw KernelError(KernelErrorKind::NotASort,
                          fmt::format("type expected, got {} : {}", debug_string(type), debug_string(s)),
                          std::nullopt, s);
    return s->sort();
}

bool TypeChecker::is_prop(const Term& type) {
    Term s = whnf(infer_core(type, true));
    return s->is_sort() && s->sort() == SortKind::Prop;
}

bool TypeChecker::is_proof(const Term& t) { return is_prop(infer_core(t, true)); }

Term TypeChecker::instantiate_mvar_head(const Term& t) const {
    if (!meta_) return t;
    const Term& f = get_app_fn(t);
    if (!f->is_mvar()) return t;
    auto v = meta_->mvar_assignment(f->index());
    if (!v) return t;
    return mk_app(*v, get_app_args(t));
}

Term TypeChecker::whnf_core(const Term& t) {
    Term cur = t;
    while (true) {
        if (cur->is_mvar() || (cur->is_app() && meta_)) {
            Term inst = instantiate_mvar_head(cur);
            if (inst != cur) {
                cur = inst;
                continue;
            }
        }
        if (!cur->is_app()) return cur;
        const Term& f = get_app_fn(cur);
        if (!f->is_lam()) return cur;
        auto args = get_app_args(cur);
        // beta-reduce as many arguments as there are leading lambdas
        Term body = f;
        std::size_t n = 0;
        while (body->is_lam() && n < args.size()) {
            body = body->body();
            ++n;
        }
        Term r = instantiate(body, std::span<const Term>(args.data(), n));
        cur = mk_app(r, std::span<const Term>(args.data() + n, args.size() - n));
    }
}

bool TypeChecker::can_unfold(const Declaration& d) const {
    if (d.kind != DeclKind::Definition || !d.value) return false;
    switch (d.reducibility) {
        case Reducibility::Reducible: return transparency_ != Transparency::None;
        case Reducibility::Default: return transparency_ == Transparency::All;
        case Reducibility::Opaque: return false;
    }
    return false;
}

std::optional<Term> TypeChecker::unfold_head(const Term& t, Transparency tr) {
    const Term& f = get_app_fn(t);
    if (!f->is_const()) return std::nullopt;
    const Declaration* d = env_.find(f->name());
    if (!d) return std::nullopt;
    Transparency saved = transparency_;
    transparency_ = tr;
    bool ok = can_unfold(*d);
    transparency_ = saved;
    if (!ok) return std::nullopt;
    return whnf_core(mk_app(*d->value, get_app_args(t)));
}

Term TypeChecker::whnf(const Term& t, Transparency tr) {
    Term cur = whnf_core(t);
    while (auto u = unfold_head(cur, tr)) cur = *u;
    return cur;
}

bool TypeChecker::is_def_eq(const Term& a, const Term& b) {
    if (a.get() == b.get() || alpha_eq(a, b)) return true;
    auto key = std::make_pair(a.get(), b.get());
    if (auto it = eq_cache_.find(key); it != eq_cache_.end()) return it->second.second;

    Term x = whnf_core(a);
    Term y = whnf_core(b);
    bool result;
    if (alpha_eq(x, y)) {
        result = true;
    } else if (auto r = lazy_delta(x, y)) {
        result = *r;
    } else {
        result = def_eq_core(x, y);
    }
    eq_cache_.emplace(key, std::make_pair(std::make_pair(a, b), result));
    return result;
}

std::optional<bool> TypeChecker::lazy_delta(Term& a, Term& b) {
    while (true) {
        auto def_of = [&](const Term& t) -> const Declaration* {
            const Term& f = get_app_fn(t);
            if (!f->is_const()) return nullptr;
            const Declaration* d = env_.find(f->name());
            return d && can_unfold(*d) ? d : nullptr;
        };
        const Declaration* da = def_of(a);
        const Declaration* db = def_of(b);
        if (!da && !db) return std::nullopt;
        auto unfold = [&](Term& t, const Declaration* d) { t = whnf_core(mk_app(*d->value, get_app_args(t))); };
        if (da && db && da == db) {
            if (get_app_num_args(a) == get_app_num_args(b) && def_eq_args(a, b)) return true;
            unfold(a, da);
            unfold(b, db);
        } else if (da && (!db || da->height >= db->height)) {
            if (db && da->height == db->height) unfold(b, db);
            unfold(a, da);
        } else {
            unfold(b, db);
        }
        if (alpha_eq(a, b)) return true;
    }
}

bool TypeChecker::def_eq_args(const Term& a, const Term& b) {
    auto xs = get_app_args(a);
    auto ys = get_app_args(b);
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!is_def_eq(xs[i], ys[i])) return false;
    return true;
}

bool TypeChecker::def_eq_core(const Term& a, const Term& b) {
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case ExprKind::Sort: return a->sort() == b->sort();
        case ExprKind::BVar:
        case ExprKind::FVar:
        case ExprKind::MVar: return a->index() == b->index();
        case ExprKind::Const: return a->name() == b->name();
        case ExprKind::App: {
            if (get_app_num_args(a) != get_app_num_args(b)) return false;
            return is_def_eq(get_app_fn(a), get_app_fn(b)) && def_eq_args(a, b);
        }
        case ExprKind::Lam:
        case ExprKind::Pi: {
            if (!is_def_eq(a->binder_type(), b->binder_type())) return false;
            ScopedLocal x(lctx_, a->name(), a->binder_type(), a->binder_mode());
            return is_def_eq(instantiate1(a->body(), x.fvar()), instantiate1(b->body(), x.fvar()));
        }
    }
    return false;
}

bool mentions_sorry(const Environment& env, const Term& t) {
    bool found = false;
    for_each(t, [&](const Term& s) {
        if (found) return false;
        if (s->is_const()) {
            if (s->name() == "sorryAx") {
                found = true;
            } else if (const Declaration* d = env.find(s->name()); d && d->uses_sorry) {
                found = true;
            }
        }
        return !found;
    });
    return found;
}

namespace {

std::uint32_t definitional_height(const Environment& env, const Term& value) {
    std::uint32_t h = 0;
    for_each(value, [&](const Term& s) {
        if (s->is_const())
            if (const Declaration* d = env.find(s->name()); d && d->kind == DeclKind::Definition)
                h = std::max(h, d->height);
        return true;
    });
    return h + 1;
}

}  // namespace

Environment check_decl(const Environment& env, const Declaration& d) {
    if (d.kind != DeclKind::Example && env.contains(d.name))
        throw KernelError(KernelErrorKind::DuplicateName, "'" + d.name + "' has already been declared");
    if (d.type->has_mvar() || (d.value && (*d.value)->has_mvar()))
        throw KernelError(KernelErrorKind::UnexpectedMVar,
                          "declaration '" + d.name + "' contains metavariables");
    if (d.type->has_fvar() || d.type->loose_bvar_range() > 0 ||
        (d.value && ((*d.value)->has_fvar() || (*d.value)->loose_bvar_range() > 0)))
        throw KernelError(KernelErrorKind::UnboundVariable, "declaration '" + d.name + "' is not closed");
    const bool needs_value = d.kind != DeclKind::Axiom;
    if (needs_value != d.value.has_value())
        throw KernelError(KernelErrorKind::MalformedDeclaration,
                          "declaration '" + d.name + (needs_value ? "' requires a value" : "' must not have a value"));

    TypeChecker tc(env);
    tc.ensure_sort(d.type);
    Declaration checked = d;
    if (d.value) {
        Term vt = tc.infer(*d.value);
        if (!tc.is_def_eq(vt, d.type))
            throw KernelError(KernelErrorKind::TypeMismatch,
                              fmt::format("type mismatch in '{}': value has type {} but {} was declared", d.name,
                                          debug_string(vt), debug_string(d.type)),
                              d.type, vt);
        checked.uses_sorry = d.uses_sorry || mentions_sorry(env, *d.value);
        if (d.kind == DeclKind::Definition) checked.height = definitional_height(env, *d.value);
    }
    if (d.kind == DeclKind::Example) return env;
    Environment out = env;
    out.add_unchecked(std::move(checked));
    return out;
}

}  // namespace microproof::kernel
