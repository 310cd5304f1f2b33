#include "microproof/kernel/expr.h"

#include <algorithm>
#include <atomic>
#include <unordered_map>

#include <fmt/format.h>

namespace microproof::kernel {

struct Expr::Private {};

Expr::Expr(Private, ExprKind kind) : kind_(kind) {}

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::shared_ptr<Expr> alloc(ExprKind k) {
    return std::make_shared<Expr>(Expr::Private{}, k);
}

}  // namespace

Term mk_sort(SortKind s) {
    auto e = alloc(ExprKind::Sort);
    e->sort_ = s;
    e->hash_ = mix(11, static_cast<std::size_t>(s));
    return e;
}

Term mk_prop() {
    static const Term prop = mk_sort(SortKind::Prop);
    return prop;
}

Term mk_type() {
    static const Term type = mk_sort(SortKind::Type);
    return type;
}

Term mk_bvar(std::uint64_t idx) {
    auto e = alloc(ExprKind::BVar);
    e->index_ = idx;
    e->loose_range_ = static_cast<std::uint32_t>(idx + 1);
    e->hash_ = mix(17, idx);
    return e;
}

Term mk_fvar(std::uint64_t id) {
    auto e = alloc(ExprKind::FVar);
    e->index_ = id;
    e->has_fvar_ = true;
    e->hash_ = mix(19, id);
    return e;
}

Term mk_mvar(std::uint64_t id) {
    auto e = alloc(ExprKind::MVar);
    e->index_ = id;
    e->has_mvar_ = true;
    e->hash_ = mix(23, id);
    return e;
}

Term mk_const(std::string name) {
    auto e = alloc(ExprKind::Const);
    e->hash_ = mix(29, std::hash<std::string>{}(name));
    e->name_ = std::move(name);
    return e;
}

Term mk_app(Term fn, Term arg) {
    auto e = alloc(ExprKind::App);
    e->has_fvar_ = fn->has_fvar() || arg->has_fvar();
    e->has_mvar_ = fn->has_mvar() || arg->has_mvar();
    e->loose_range_ = std::max(fn->loose_bvar_range(), arg->loose_bvar_range());
    e->hash_ = mix(mix(31, fn->hash()), arg->hash());
    e->a_ = std::move(fn);
    e->b_ = std::move(arg);
    return e;
}

Term mk_app(Term fn, std::span<const Term> args) {
    for (const auto& a : args) fn = mk_app(std::move(fn), a);
    return fn;
}

Term mk_app(const std::string& fn, std::initializer_list<Term> args) {
    return mk_app(mk_const(fn), std::span<const Term>(args.begin(), args.size()));
}

Term mk_binding(ExprKind kind, std::string name, Term type, Term body, BinderMode mode) {
    auto e = alloc(kind);
    e->mode_ = mode;
    e->has_fvar_ = type->has_fvar() || body->has_fvar();
    e->has_mvar_ = type->has_mvar() || body->has_mvar();
    std::uint32_t body_range = body->loose_bvar_range();
    e->loose_range_ = std::max(type->loose_bvar_range(), body_range > 0 ? body_range - 1 : 0);
    // binder names and modes do not participate: hashing is up to alpha
    e->hash_ = mix(mix(kind == ExprKind::Lam ? 37 : 41, type->hash()), body->hash());
    e->name_ = std::move(name);
    e->a_ = std::move(type);
    e->b_ = std::move(body);
    return e;
}

Term mk_lam(std::string name, Term type, Term body, BinderMode mode) {
    return mk_binding(ExprKind::Lam, std::move(name), std::move(type), std::move(body), mode);
}

Term mk_pi(std::string name, Term type, Term body, BinderMode mode) {
    return mk_binding(ExprKind::Pi, std::move(name), std::move(type), std::move(body), mode);
}

Term mk_arrow(Term a, Term b) {
    return mk_pi("a", std::move(a), lift_loose_bvars(b, 1), BinderMode::Explicit);
}

std::uint64_t fresh_id() {
    static std::atomic<std::uint64_t> next{1};
    return next.fetch_add(1, std::memory_order_relaxed);
}

const Term& get_app_fn(const Term& e) {
    const Term* cur = &e;
    while ((*cur)->is_app()) cur = &(*cur)->fn();
    return *cur;
}

std::vector<Term> get_app_args(const Term& e) {
    std::vector<Term> args;
    const Term* cur = &e;
    while ((*cur)->is_app()) {
        args.push_back((*cur)->arg());
        cur = &(*cur)->fn();
    }
    std::reverse(args.begin(), args.end());
    return args;
}

std::size_t get_app_num_args(const Term& e) {
    std::size_t n = 0;
    const Expr* cur = e.get();
    while (cur->is_app()) {
        ++n;
        cur = cur->fn().get();
    }
    return n;
}

const std::string& head_const_name(const Term& e) {
    static const std::string empty;
    const Term& f = get_app_fn(e);
    return f->is_const() ? f->name() : empty;
}

bool is_app_of(const Term& e, const std::string& name, std::size_t nargs) {
    return get_app_num_args(e) == nargs && head_const_name(e) == name;
}

namespace {

struct CacheKey {
    const Expr* ptr;
    std::uint32_t depth;
    bool operator==(const CacheKey&) const = default;
};
struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
        return std::hash<const void*>{}(k.ptr) ^ (static_cast<std::size_t>(k.depth) << 1);
    }
};
using ReplaceCache = std::unordered_map<CacheKey, Term, CacheKeyHash>;

Term replace_rec(const Term& e, const ReplaceFn& fn, std::uint32_t depth, ReplaceCache& cache);

Term replace_uncached(const Term& e, const ReplaceFn& fn, std::uint32_t depth, ReplaceCache& cache) {
    if (auto r = fn(e, depth)) return *r;
    switch (e->kind()) {
        case ExprKind::App: {
            Term f = replace_rec(e->fn(), fn, depth, cache);
            Term a = replace_rec(e->arg(), fn, depth, cache);
            if (f == e->fn() && a == e->arg()) return e;
            return mk_app(std::move(f), std::move(a));
        }
        case ExprKind::Lam:
        case ExprKind::Pi: {
            Term t = replace_rec(e->binder_type(), fn, depth, cache);
            Term b = replace_rec(e->body(), fn, depth + 1, cache);
            if (t == e->binder_type() && b == e->body()) return e;
            return mk_binding(e->kind(), e->name(), std::move(t), std::move(b), e->binder_mode());
        }
        default:
            return e;
    }
}

Term replace_rec(const Term& e, const ReplaceFn& fn, std::uint32_t depth, ReplaceCache& cache) {
    // shared subterms are common in proof terms; only composite nodes are worth caching
    if (!e->is_app() && !e->is_binding()) return replace_uncached(e, fn, depth, cache);
    CacheKey key{e.get(), depth};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    Term r = replace_uncached(e, fn, depth, cache);
    cache.emplace(key, r);
    return r;
}

bool occurs_if(const Term& e, const std::function<bool(const Term&)>& skip,
               const std::function<bool(const Term&)>& hit) {
    std::unordered_map<const Expr*, bool> seen;
    std::vector<const Term*> stack{&e};
    while (!stack.empty()) {
        const Term& t = *stack.back();
        stack.pop_back();
        if (skip(t) || !seen.emplace(t.get(), true).second) continue;
        if (hit(t)) return true;
        if (t->is_app()) {
            stack.push_back(&t->fn());
            stack.push_back(&t->arg());
        } else if (t->is_binding()) {
            stack.push_back(&t->binder_type());
            stack.push_back(&t->body());
        }
    }
    return false;
}

}  // namespace

Term replace(const Term& e, const ReplaceFn& fn) {
    ReplaceCache cache;
    return replace_rec(e, fn, 0, cache);
}

void for_each(const Term& e, const std::function<bool(const Term&)>& fn) {
    if (!fn(e)) return;
    switch (e->kind()) {
        case ExprKind::App:
            for_each(e->fn(), fn);
            for_each(e->arg(), fn);
            break;
        case ExprKind::Lam:
        case ExprKind::Pi:
            for_each(e->binder_type(), fn);
            for_each(e->body(), fn);
            break;
        default:
            break;
    }
}

Term instantiate(const Term& e, std::span<const Term> subst) {
    if (subst.empty() || e->loose_bvar_range() == 0) return e;
    const auto n = static_cast<std::uint32_t>(subst.size());
    return replace(e, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
        if (t->loose_bvar_range() <= depth) return t;
        if (t->is_bvar()) {
            auto idx = t->index();
            if (idx < depth) return t;
            if (idx - depth < n) return lift_loose_bvars(subst[n - 1 - (idx - depth)], depth);
            return mk_bvar(idx - n);
        }
        return std::nullopt;
    });
}

Term instantiate1(const Term& body, const Term& value) {
    return instantiate(body, std::span<const Term>(&value, 1));
}

Term abstract_fvars(const Term& e, std::span<const std::uint64_t> ids) {
    if (ids.empty() || !e->has_fvar()) return e;
    const auto n = static_cast<std::uint32_t>(ids.size());
    return replace(e, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
        if (!t->has_fvar()) return t;
        if (t->is_fvar()) {
            for (std::uint32_t k = 0; k < n; ++k)
                if (ids[k] == t->index()) return mk_bvar(depth + n - 1 - k);
            return t;
        }
        return std::nullopt;
    });
}

Term abstract_fvar(const Term& e, std::uint64_t id) {
    return abstract_fvars(e, std::span<const std::uint64_t>(&id, 1));
}

Term lift_loose_bvars(const Term& e, std::uint32_t amount, std::uint32_t start) {
    if (amount == 0 || e->loose_bvar_range() <= start) return e;
    return replace(e, [&](const Term& t, std::uint32_t depth) -> std::optional<Term> {
        if (t->loose_bvar_range() <= start + depth) return t;
        if (t->is_bvar()) return mk_bvar(t->index() + amount);
        return std::nullopt;
    });
}

bool has_loose_bvar(const Term& e, std::uint32_t idx) {
    if (e->loose_bvar_range() <= idx) return false;
    switch (e->kind()) {
        case ExprKind::BVar: return e->index() == idx;
        case ExprKind::App: return has_loose_bvar(e->fn(), idx) || has_loose_bvar(e->arg(), idx);
        case ExprKind::Lam:
        case ExprKind::Pi:
            return has_loose_bvar(e->binder_type(), idx) || has_loose_bvar(e->body(), idx + 1);
        default: return false;
    }
}

bool occurs_fvar(const Term& e, std::uint64_t id) {
    return occurs_if(
        e, [](const Term& t) { return !t->has_fvar(); },
        [&](const Term& t) { return t->is_fvar() && t->index() == id; });
}

bool occurs_mvar(const Term& e, std::uint64_t id) {
    return occurs_if(
        e, [](const Term& t) { return !t->has_mvar(); },
        [&](const Term& t) { return t->is_mvar() && t->index() == id; });
}

bool occurs_const(const Term& e, const std::string& name) {
    return occurs_if(
        e, [](const Term&) { return false; },
        [&](const Term& t) { return t->is_const() && t->name() == name; });
}

bool alpha_eq(const Term& a, const Term& b) {
    if (a.get() == b.get()) return true;
    if (a->hash() != b->hash() || a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case ExprKind::Sort: return a->sort() == b->sort();
        case ExprKind::BVar:
        case ExprKind::FVar:
        case ExprKind::MVar: return a->index() == b->index();
        case ExprKind::Const: return a->name() == b->name();
        case ExprKind::App: return alpha_eq(a->fn(), b->fn()) && alpha_eq(a->arg(), b->arg());
        case ExprKind::Lam:
        case ExprKind::Pi:
            return alpha_eq(a->binder_type(), b->binder_type()) && alpha_eq(a->body(), b->body());
    }
    return false;
}

int compare_terms(const Term& a, const Term& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind() != b->kind()) return a->kind() < b->kind() ? -1 : 1;
    auto cmp_u = [](std::uint64_t x, std::uint64_t y) { return x < y ? -1 : (x > y ? 1 : 0); };
    switch (a->kind()) {
        case ExprKind::Sort: return cmp_u(static_cast<int>(a->sort()), static_cast<int>(b->sort()));
        case ExprKind::BVar:
        case ExprKind::FVar:
        case ExprKind::MVar: return cmp_u(a->index(), b->index());
        case ExprKind::Const: return a->name().compare(b->name()) < 0 ? -1 : (a->name() == b->name() ? 0 : 1);
        case ExprKind::App: {
            // compare by head and argument list so that `f a b` orders like a tuple
            const Term& fa = get_app_fn(a);
            const Term& fb = get_app_fn(b);
            if (int c = compare_terms(fa, fb)) return c;
            auto xs = get_app_args(a);
            auto ys = get_app_args(b);
            if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (int c = compare_terms(xs[i], ys[i])) return c;
            return 0;
        }
        case ExprKind::Lam:
        case ExprKind::Pi:
            if (int c = compare_terms(a->binder_type(), b->binder_type())) return c;
            return compare_terms(a->body(), b->body());
    }
    return 0;
}

std::string debug_string(const Term& e) {
    switch (e->kind()) {
        case ExprKind::Sort: return e->sort() == SortKind::Prop ? "Prop" : "Type";
        case ExprKind::BVar: return fmt::format("#{}", e->index());
        case ExprKind::FVar: return fmt::format("%{}", e->index());
        case ExprKind::MVar: return fmt::format("?{}", e->index());
        case ExprKind::Const: return e->name();
        case ExprKind::App: {
            std::string s = "(" + debug_string(get_app_fn(e));
            for (const auto& a : get_app_args(e)) s += " " + debug_string(a);
            return s + ")";
        }
        case ExprKind::Lam:
            return fmt::format("(fun {} : {} => {})", e->name(), debug_string(e->binder_type()),
                               debug_string(e->body()));
        case ExprKind::Pi:
            return fmt::format("(({} : {}) -> {})", e->name(), debug_string(e->binder_type()),
                               debug_string(e->body()));
    }
    return "?";
}

std::size_t term_size(const Term& e) {
    std::size_t n = 0;
    for_each(e, [&](const Term&) {
        ++n;
        return true;
    });
    return n;
}

}  // namespace microproof::kernel
