#include "microproof/rewriter/simp.h"

#include <algorithm>

#include <fmt/format.h>

#include "microproof/elab/errors.h"
#include "microproof/elab/instances.h"
#include "microproof/elab/printer.h"

namespace microproof::rewriter {

using elab::ElabError;
using elab::ErrorKind;
using elab::MVarKind;
using elab::Printer;
using namespace kernel;
using Goals = std::vector<std::uint64_t>;

namespace {

/// A rule instantiated with fresh metavariables: `proof : lhs = rhs`.
struct Instance {
    Term lhs;
    Term rhs;
    Term alpha;
    Term proof;
    std::vector<Term> mvars;
};

bool is_const(const Term& t, const char* name) { return t->is_const() && t->name() == name; }

/// Reads the conclusion of a telescope as an oriented equation.
std::optional<Instance> orient(Meta& meta, const Term& concl, const Term& proof) {
    if (is_app_of(concl, "Eq", 3)) {
        auto a = get_app_args(concl);
        return Instance{a[1], a[2], a[0], proof, {}};
    }
    if (is_app_of(concl, "Iff", 2)) {
        auto a = get_app_args(concl);
        return Instance{a[0], a[1], mk_prop(), kernel::mk_app("propext", {a[0], a[1], proof}), {}};
    }
    if (is_app_of(concl, "Not", 1)) {
        Term p = get_app_args(concl)[0];
        return Instance{p, mk_const("False"), mk_prop(), kernel::mk_app("eq_false", {p, proof}), {}};
    }
    if (is_app_of(concl, "Ne", 3)) {
        auto a = get_app_args(concl);
        Term p = kernel::mk_app("Eq", {a[0], a[1], a[2]});
        return Instance{p, mk_const("False"), mk_prop(), kernel::mk_app("eq_false", {p, proof}), {}};
    }
    if (meta.is_prop(concl))
        return Instance{concl, mk_const("True"), mk_prop(), kernel::mk_app("eq_true", {concl, proof}), {}};
    return std::nullopt;
}

std::optional<Instance> instantiate_rule(Meta& meta, const SimpRule& rule) {
    Term t = rule.type;
    std::vector<Term> args;
    while (t->is_pi()) {
        bool inst = t->binder_mode() == BinderMode::InstImplicit;
        Term mv = meta.new_mvar(t->binder_type(), inst ? "" : t->name(), inst ? MVarKind::Instance : MVarKind::Natural);
        args.push_back(mv);
        t = instantiate1(t->body(), mv);
    }
    auto r = orient(meta, t, kernel::mk_app(rule.proof, args));
    if (!r) return std::nullopt;
    r->mvars = std::move(args);
    return r;
}

/// Head key of a pattern: constant name or fvar id, and argument count.
struct Key {
    std::string head;
    std::size_t nargs = 0;
    bool ok = false;
};

Key key_of(const Term& t) {
    const Term& f = get_app_fn(t);
    Key k;
    k.nargs = get_app_num_args(t);
    if (f->is_const()) {
        k.head = f->name();
        k.ok = true;
    } else if (f->is_fvar()) {
        k.head = fmt::format("#{}", f->index());
        k.ok = true;
    }
    return k;
}

/// Whether the right-hand side is the left-hand side with its variables permuted.
bool permutative(const Instance& r) {
    auto skeleton = [&](const Term& t) {
        return replace(t, [&](const Term& s, std::uint32_t) -> std::optional<Term> {
            for (const auto& mv : r.mvars)
                if (s->is_mvar() && s->index() == mv->index()) return mk_const("_");
            return std::nullopt;
        });
    };
    if (!alpha_eq(skeleton(r.lhs), skeleton(r.rhs))) return false;
    return !alpha_eq(r.lhs, r.rhs);
}

bool unassigned(const MetaContext& mctx, const Term& mv) { return !mctx.is_assigned(mv->index()); }

}  // namespace

SimpRule rule_from_const(const Environment& env, const std::string& name) {
    const Declaration* d = env.find(name);
    if (!d) throw ElabError(ErrorKind::UnknownIdentifier, "unknown constant '" + name + "'", {});
    return {name, mk_const(name), d->type, std::nullopt};
}

bool usable_as_rule(Meta& meta, const Term& type) {
    auto cp = meta.mctx().checkpoint();
    SimpRule probe{"", mk_const("_probe"), type, std::nullopt};
    bool ok = false;
    try {
        auto r = instantiate_rule(meta, probe);
        ok = r && !meta.instantiate(r->lhs)->is_mvar();
    } catch (const std::exception&) {
        ok = false;
    }
    meta.mctx().rollback(cp);
    return ok;
}

std::vector<SimpRule> simp_set_rules(const Environment& env, std::vector<std::string>* rejected) {
    std::vector<SimpRule> out;
    MetaContext mctx;
    Meta meta(env, mctx);
    for (const auto& name : env.simp_set()) {
        const Declaration* d = env.find(name);
        if (d && usable_as_rule(meta, d->type)) {
            out.push_back(rule_from_const(env, name));
        } else if (rejected) {
            rejected->push_back(name);
        }
    }
    return out;
}

Term mk_eq_refl(Meta& meta, const Term& a) { return kernel::mk_app("Eq.refl", {meta.infer(a), a}); }

Term mk_eq_symm(Meta& meta, const Term& a, const Term& b, const Term& h) {
    return kernel::mk_app("Eq.symm", {meta.infer(a), a, b, h});
}

Term mk_eq_trans(Meta& meta, const Term& a, const Term& b, const Term& c, const Term& p, const Term& q) {
    return kernel::mk_app("Eq.trans", {meta.infer(a), a, b, c, p, q});
}

Term mk_congr_arg(Meta& meta, const Term& motive, const Term& a, const Term& b, const Term& h) {
    Term alpha = meta.infer(a);
    Term beta = meta.infer(motive->is_lam() ? instantiate1(motive->body(), a) : kernel::mk_app(motive, a));
    return kernel::mk_app("congrArg", {alpha, beta, a, b, motive, h});
}

SimpResult chain(Meta& meta, const Term& a, const SimpResult& first, const SimpResult& second) {
    if (!first.proof) return second;
    if (!second.proof) return {second.expr, first.proof};
    return {second.expr, mk_eq_trans(meta, a, first.expr, second.expr, *first.proof, *second.proof)};
}

Simplifier::Simplifier(Meta& meta, std::vector<SimpRule> rules, SimpConfig cfg)
    : meta_(meta), rules_(std::move(rules)), cfg_(std::move(cfg)) {}

void Simplifier::tick() {
    if (++steps_ > cfg_.max_steps)
        throw ElabError(ErrorKind::SimpStepBudgetExceeded,
                        fmt::format("simp exceeded its budget of {} rewrite steps", cfg_.max_steps), {});
}

SimpResult Simplifier::simp(const Term& e) { return visit(meta_.instantiate(e), 0); }

SimpResult Simplifier::visit(const Term& e, std::size_t depth) {
    if (e->is_binding() || e->loose_bvar_range() > 0 || depth > cfg_.max_depth) return {e, std::nullopt};
    SimpResult cur = congr(e, depth);
    auto root = rewrite_root(cur.expr, depth);
    if (!root) return cur;
    SimpResult step = chain(meta_, e, cur, *root);
    SimpResult again = visit(step.expr, depth + 1);
    return chain(meta_, e, step, again);
}

SimpResult Simplifier::congr(const Term& e, std::size_t depth) {
    if (!e->is_app()) return {e, std::nullopt};
    const Term& fn = get_app_fn(e);
    if (cfg_.descend && !(fn->is_const() && cfg_.descend(fn->name()))) return {e, std::nullopt};
    auto args = get_app_args(e);
    Term ftype = meta_.infer(fn);
    std::vector<bool> visit_arg(args.size(), false);
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!ftype->is_pi()) {
            ftype = meta_.whnf(ftype);
            if (!ftype->is_pi()) break;
        }
        const Term& bt = ftype->binder_type();
        bool type_arg = bt->is_sort() && bt->sort() == SortKind::Type;
        visit_arg[i] = ftype->binder_mode() == BinderMode::Explicit && !type_arg;
        ftype = instantiate1(ftype->body(), args[i]);
    }
    SimpResult acc{e, std::nullopt};
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!visit_arg[i] || meta_.is_proof(args[i])) continue;
        SimpResult r = visit(args[i], depth + 1);
        if (!r.proof) continue;
        std::vector<Term> with_hole = args;
        with_hole[i] = mk_bvar(0);
        Term body = kernel::mk_app(fn, with_hole);
        Term motive = mk_lam("x", meta_.infer(args[i]), body);
        Term h = mk_congr_arg(meta_, motive, args[i], r.expr, *r.proof);
        args[i] = r.expr;
        Term next = kernel::mk_app(fn, args);
        acc = chain(meta_, e, acc, {next, h});
    }
    return acc;
}

std::optional<SimpResult> Simplifier::rewrite_root(const Term& e, std::size_t depth) {
    for (const auto& rule : rules_)
        if (auto r = try_rule(rule, e, depth)) return r;
    return std::nullopt;
}

std::optional<SimpResult> Simplifier::try_rule(const SimpRule& rule, const Term& e, std::size_t depth) {
    Key ek = key_of(e);
    if (!ek.ok) return std::nullopt;
    MetaContext& mctx = meta_.mctx();
    auto cp = mctx.checkpoint();
    auto inst = instantiate_rule(meta_, rule);
    if (!inst) return std::nullopt;
    Key rk = key_of(inst->lhs);
    if (!rk.ok || rk.head != ek.head || rk.nargs != ek.nargs) {
        mctx.rollback(cp);
        return std::nullopt;
    }
    auto fail = [&]() -> std::optional<SimpResult> {
        mctx.rollback(cp);
        return std::nullopt;
    };
    Transparency saved = meta_.transparency();
    meta_.set_transparency(Transparency::Reducible);
    bool matched = meta_.is_def_eq(inst->lhs, e);
    meta_.set_transparency(saved);
    if (!matched) return fail();

    for (const auto& mv : inst->mvars) {
        if (!unassigned(mctx, mv)) continue;
        const auto& d = mctx.get(mv->index());
        Term type = meta_.instantiate(d.type);
        if (d.kind == MVarKind::Instance) {
            elab::InstanceResult res;
            try {
                res = elab::synthesize_instance(meta_, type);
            } catch (const elab::InstanceDepthExceeded&) {
                return fail();
            }
            if (res.status != elab::InstanceStatus::Success || !meta_.is_def_eq(mv, res.value)) return fail();
        } else if (meta_.is_prop(type)) {
            Term proof;
            if (!discharge(type, proof, depth)) return fail();
            mctx.assign(mv->index(), proof);
        } else {
            return fail();
        }
    }
    Term rhs = meta_.instantiate(inst->rhs);
    Term proof = meta_.instantiate(inst->proof);
    if (mctx.has_unassigned(proof) || alpha_eq(rhs, e)) return fail();
    if (permutative(*inst) && compare_terms(rhs, e) >= 0) return fail();
    tick();
    if (cfg_.trace) {
        Printer p(meta_.env(), &mctx);
        cfg_.trace->push_back(
            fmt::format("[simp] {}: {} ==> {}", rule.name, p.term(e, meta_.lctx()), p.term(rhs, meta_.lctx())));
    }
    return SimpResult{rhs, proof};
}

std::optional<SimpResult> rewrite_once(Meta& meta, const SimpRule& rule, const Term& e) {
    MetaContext& mctx = meta.mctx();
    auto cp = mctx.checkpoint();
    auto inst = instantiate_rule(meta, rule);
    auto fail = [&]() -> std::optional<SimpResult> {
        mctx.rollback(cp);
        return std::nullopt;
    };
    if (!inst) return fail();
    Transparency saved = meta.transparency();
    meta.set_transparency(Transparency::Reducible);
    bool matched = meta.is_def_eq(inst->lhs, e);
    meta.set_transparency(saved);
    if (!matched) return fail();
    for (const auto& mv : inst->mvars) {
        if (!unassigned(mctx, mv)) continue;
        const auto& d = mctx.get(mv->index());
        if (d.kind != MVarKind::Instance) return fail();
        auto res = elab::synthesize_instance(meta, meta.instantiate(d.type));
        if (res.status != elab::InstanceStatus::Success || !meta.is_def_eq(mv, res.value)) return fail();
    }
    Term proof = meta.instantiate(inst->proof);
    if (mctx.has_unassigned(proof)) return fail();
    return SimpResult{meta.instantiate(inst->rhs), proof};
}

bool Simplifier::discharge(const Term& prop, Term& proof, std::size_t depth) {
    if (is_const(prop, "True")) {
        proof = mk_const("True.intro");
        return true;
    }
    if (discharge_level_ >= cfg_.discharge_depth) return false;
    ++discharge_level_;
    SimpResult r;
    try {
        r = visit(prop, depth + 1);
    } catch (...) {
        --discharge_level_;
        throw;
    }
    --discharge_level_;
    if (!r.proof || !is_const(r.expr, "True")) return false;
    proof = kernel::mk_app("of_eq_true", {prop, *r.proof});
    return true;
}

namespace {

std::string render(const Environment& env, const MetaContext& mctx, const Term& t, const LocalContext& lctx) {
    return Printer(env, &mctx).term(t, lctx);
}

/// Replaces `goal` by a goal for `next`, given `proof : target = next`.
std::optional<std::uint64_t> replace_target(MetaContext& mctx, std::uint64_t goal, const Term& target,
                                            const SimpResult& r) {
    const LocalContext lctx = mctx.get(goal).lctx;
    if (is_const(r.expr, "True")) {
        mctx.assign(goal, kernel::mk_app("Eq.mpr", {target, r.expr, *r.proof, mk_const("True.intro")}));
        return std::nullopt;
    }
    Term ng = mctx.new_mvar(r.expr, lctx, "", MVarKind::Goal);
    mctx.assign(goal, kernel::mk_app("Eq.mpr", {target, r.expr, *r.proof, ng}));
    return ng->index();
}

}  // namespace

std::vector<std::uint64_t> rewrite_target(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                          const SimpRule& rule, bool reverse) {
    Meta meta(env, mctx, mctx.get(goal).lctx);
    Term target = mctx.instantiate(mctx.get(goal).type);
    auto inst = instantiate_rule(meta, rule);
    if (!inst)
        throw ElabError(ErrorKind::RwNoMatch,
                        "rewrite rule is not an equation, an iff or a proposition\n  " +
                            render(env, mctx, rule.type, meta.lctx()),
                        {});
    if (reverse) {
        inst->proof = kernel::mk_app("Eq.symm", {inst->alpha, inst->lhs, inst->rhs, inst->proof});
        std::swap(inst->lhs, inst->rhs);
    }
    if (meta.instantiate(inst->lhs)->is_mvar())
        throw ElabError(ErrorKind::RwNoMatch, "motive is a metavariable; the rule has no usable left-hand side", {});
    Key rk = key_of(inst->lhs);

    // Leftmost-outermost first match.
    std::optional<Term> found;
    std::function<bool(const Term&)> search = [&](const Term& s) -> bool {
        if (s->loose_bvar_range() == 0) {
            Key sk = key_of(s);
            if (sk.ok && sk.head == rk.head && sk.nargs == rk.nargs) {
                auto cp = mctx.checkpoint();
                meta.set_transparency(Transparency::Reducible);
                bool ok = meta.is_def_eq(inst->lhs, s);
                meta.set_transparency(Transparency::All);
                if (ok) {
                    found = s;
                    return true;
                }
                mctx.rollback(cp);
            }
        }
        if (s->is_app()) {
            const Term& fn = get_app_fn(s);
            if (search(fn)) return true;
            for (const auto& a : get_app_args(s))
                if (search(a)) return true;
        } else if (s->is_binding()) {
            return search(s->binder_type()) || search(s->body());
        }
        return false;
    };
    if (!search(target))
        throw ElabError(ErrorKind::RwNoMatch,
                        "did not find an instance of the pattern in the target expression\n  " +
                            render(env, mctx, meta.instantiate(inst->lhs), meta.lctx()),
                        {});

    Goals side;
    for (const auto& mv : inst->mvars) {
        if (mctx.is_assigned(mv->index())) continue;
        const auto& d = mctx.get(mv->index());
        Term type = meta.instantiate(d.type);
        if (d.kind == MVarKind::Instance) {
            auto res = elab::synthesize_instance(meta, type);
            if (res.status == elab::InstanceStatus::Success && meta.is_def_eq(mv, res.value)) continue;
            throw ElabError(ErrorKind::InstanceResolutionFailed,
                            "failed to synthesize\n  " + render(env, mctx, type, meta.lctx()), {});
        }
        mctx.set_kind(mv->index(), MVarKind::Goal);
        side.push_back(mv->index());
    }
    Term lhs = meta.instantiate(inst->lhs);
    Term rhs = meta.instantiate(inst->rhs);
    Term proof = meta.instantiate(inst->proof);
    Term alpha = meta.instantiate(inst->alpha);
    Term body = replace(target, [&](const Term& s, std::uint32_t d) -> std::optional<Term> {
        if (s->loose_bvar_range() == 0 && alpha_eq(s, lhs)) return mk_bvar(d);
        return std::nullopt;
    });
    Term motive = mk_lam("x", alpha, body);
    try {
        kernel::TypeChecker tc(env, meta.lctx(), &mctx);
        tc.infer(motive);
    } catch (const KernelError&) {
        throw ElabError(ErrorKind::RwMotiveIllTyped, "motive is not type correct", {});
    }
    Term next = instantiate1(body, rhs);
    Term h = mk_congr_arg(meta, motive, lhs, rhs, proof);
    Term ng = mctx.new_mvar(next, meta.lctx(), "", MVarKind::Goal);
    mctx.assign(goal, kernel::mk_app("Eq.mpr", {target, next, h, ng}));
    Goals out{ng->index()};
    out.insert(out.end(), side.begin(), side.end());
    return out;
}

std::vector<std::uint64_t> simp_target(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                       const std::vector<SimpRule>& rules, const SimpConfig& cfg) {
    Meta meta(env, mctx, mctx.get(goal).lctx);
    Term target = mctx.instantiate(mctx.get(goal).type);
    Simplifier s(meta, rules, cfg);
    SimpResult r = s.simp(target);
    if (!r.proof && is_const(target, "True")) {
        mctx.assign(goal, mk_const("True.intro"));
        return {};
    }
    if (!r.proof) throw ElabError(ErrorKind::SimpFailed, "simp made no progress", {});
    auto ng = replace_target(mctx, goal, target, r);
    return ng ? Goals{*ng} : Goals{};
}

namespace {

bool mentioned_after(const LocalContext& lctx, std::uint64_t fv, const Term& target) {
    if (occurs_fvar(target, fv)) return true;
    for (const auto& d : lctx.decls())
        if (d.fvar != fv && occurs_fvar(d.type, fv)) return true;
    return false;
}

}  // namespace

std::vector<std::uint64_t> simp_all(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                    const std::vector<SimpRule>& rules, const SimpConfig& cfg) {
    constexpr int kMaxRounds = 64;
    std::uint64_t g = goal;
    bool progress = false;
    auto hyp_rules = [&](const LocalContext& lctx, std::optional<std::uint64_t> skip) {
        std::vector<SimpRule> out = rules;
        Meta meta(env, mctx, lctx);
        for (const auto& d : lctx.decls()) {
            if ((skip && d.fvar == *skip) || d.is_instance()) continue;
            Term type = mctx.instantiate(d.type);
            if (!meta.is_prop(type) || !usable_as_rule(meta, type)) continue;
            out.push_back({d.user_name, d.as_term(), type, d.fvar});
        }
        return out;
    };

    for (int round = 0; round < kMaxRounds; ++round) {
        bool changed = false;
        const LocalContext lctx = mctx.get(g).lctx;
        Term target = mctx.instantiate(mctx.get(g).type);
        Meta meta(env, mctx, lctx);
        for (const auto& d : lctx.decls()) {
            if (d.is_instance()) continue;
            Term type = mctx.instantiate(d.type);
            if (!meta.is_prop(type)) continue;
            Simplifier s(meta, hyp_rules(lctx, d.fvar), cfg);
            SimpResult r = s.simp(type);
            if (!r.proof) continue;
            if (mentioned_after(lctx, d.fvar, target)) continue;
            changed = true;
            if (is_const(r.expr, "False")) {
                Term h = kernel::mk_app("Eq.mp", {type, r.expr, *r.proof, d.as_term()});
                mctx.assign(g, kernel::mk_app("False.elim", {target, h}));
                return {};
            }
            LocalContext inner = lctx.without(d.fvar);
            if (is_const(r.expr, "True")) {
                Term ng = mctx.new_mvar(target, inner, "", MVarKind::Goal);
                mctx.assign(g, ng);
                g = ng->index();
                break;
            }
            LocalContext outer = inner;
            Term nf = inner.push(d.user_name, r.expr);
            Term ng = mctx.new_mvar(target, inner, "", MVarKind::Goal);
            Term aux = mctx.new_mvar(mk_pi(d.user_name, r.expr, target), outer, "", MVarKind::Goal);
            mctx.assign_delayed(aux->index(), {nf->index()}, ng->index());
            mctx.assign(g, kernel::mk_app(aux, kernel::mk_app("Eq.mp", {type, r.expr, *r.proof, d.as_term()})));
            g = ng->index();
            break;
        }
        if (changed) {
            progress = true;
            continue;
        }
        Simplifier s(meta, hyp_rules(lctx, std::nullopt), cfg);
        SimpResult r = s.simp(target);
        if (!r.proof) break;
        progress = true;
        auto ng = replace_target(mctx, g, target, r);
        if (!ng) return {};
        g = *ng;
    }
    if (!progress) throw ElabError(ErrorKind::SimpFailed, "simp_all made no progress", {});
    return {g};
}

}  // namespace microproof::rewriter
