#include "microproof/tactics/engine.h"

#include <algorithm>

#include <fmt/format.h>

#include "microproof/elab/instances.h"
#include "microproof/elab/printer.h"
#include "microproof/lindec/module.h"
#include "microproof/rewriter/simp.h"
#include "microproof/search/search.h"
#include "microproof/syntax/parser.h"

namespace microproof::tactics {

using elab::Elaborator;
using elab::ErrorKind;
using elab::Meta;
using elab::MVarKind;
using elab::Printer;
using namespace kernel;
using syntax::TacticKind;
using syntax::TacticSyntax;

namespace {

bool span_empty(const Span& s) { return s.begin.offset == 0 && s.end.offset == 0; }

std::uint64_t main_goal(const Goals& goals, const Span& span) {
    if (goals.empty()) throw ElabError(ErrorKind::NoGoals, "no goals to be proved", span);
    return goals.front();
}

void replace_main(Goals& goals, const Goals& with) {
    goals.erase(goals.begin());
    goals.insert(goals.begin(), with.begin(), with.end());
}

}  // namespace

std::string Snapshot::render() const { return Printer(*env, mctx.get()).goals(goals); }

Engine::Engine(std::shared_ptr<const Environment> env, MetaContext& mctx, MessageLog& log, Config cfg)
    : env_(std::move(env)), mctx_(mctx), log_(log), cfg_(cfg) {}

Engine::~Engine() = default;

std::string Engine::render(const Goals& goals) const {
    Goals open = goals;
    prune(open);
    return Printer(*env_, &mctx_).goals(open);
}

Term Engine::target(std::uint64_t goal) const { return mctx_.instantiate(mctx_.get(goal).type); }

void Engine::prune(Goals& goals) const {
    Goals out;
    for (auto g : goals) {
        if (mctx_.is_assigned(g) || mctx_.is_delayed_assigned(g)) continue;
        if (std::find(out.begin(), out.end(), g) != out.end()) continue;
        out.push_back(g);
    }
    goals = std::move(out);
}

void Engine::record(const Span& span, const Goals& goals) {
    Goals open = goals;
    prune(open);
    snapshots_.push_back({span, env_, std::make_shared<MetaContext>(mctx_), std::move(open)});
}

void Engine::admit(Goals& goals) {
    prune(goals);
    for (auto g : goals)
        if (!mctx_.is_assigned(g) && !mctx_.is_delayed_assigned(g))
            mctx_.assign(g, kernel::mk_app(mk_const("sorryAx"), target(g)));
    goals.clear();
}

const search::HeadIndex& Engine::index() {
    if (!index_) index_ = std::make_unique<search::HeadIndex>(*env_);
    return *index_;
}

void Engine::run(const syntax::TacticBlock& block, std::uint64_t goal, const Span& by_span) {
    Goals goals{goal};
    record({by_span.begin, by_span.begin}, goals);
    run_block(block, goals, by_span, false, ErrorKind::UnsolvedGoals);
}

Term Engine::run_nested(Elaborator& el, const syntax::TacticBlock& block, const Term& expected, const Span& by_span) {
    Term g = mctx_.new_mvar(expected, el.meta().lctx(), "", MVarKind::Goal);
    Goals goals{g->index()};
    record({by_span.begin, by_span.begin}, goals);
    run_block(block, goals, by_span, block.tactics.size() == 1, ErrorKind::UnsolvedGoals);
    return mctx_.instantiate(g);
}

bool Engine::run_block(const syntax::TacticBlock& block, Goals& goals, const Span& report_span, bool whole_span,
                       ErrorKind open_kind) {
    for (const auto& tac : block.tactics) {
        Goals before = goals;
        try {
            step(tac, goals);
        } catch (ElabError& e) {
            if (span_empty(e.span())) e.set_span(tac.span);
            if (whole_span) e.set_span(report_span);
            if (e.goal_render().empty()) e.set_goal_render(render(before));
            log_.error(e);
            admit(goals);
            record(tac.span, goals);
            return false;
        }
        record(tac.span, goals);
    }
    prune(goals);
    if (goals.empty()) return true;
    std::string r = render(goals);
    std::string head = open_kind == ErrorKind::UnsolvedGoals ? "unsolved goals" : "this bullet did not close its goal";
    log_.error(open_kind, head + "\n" + r, report_span, r);
    admit(goals);
    return false;
}

void Engine::step(const TacticSyntax& tac, Goals& goals) {
    auto cp = mctx_.checkpoint();
    Goals before = goals;
    try {
        switch (tac.kind) {
            case TacticKind::Intro: intro(tac, goals); break;
            case TacticKind::Exact:
            case TacticKind::Calc: exact(tac.term, goals, tac.span); break;
            case TacticKind::Apply: apply(tac, goals); break;
            case TacticKind::Constructor: constructor(tac, goals); break;
            case TacticKind::Swap:
                if (goals.size() < 2)
                    throw ElabError(ErrorKind::NoGoals, "swap requires at least two goals", tac.span);
                std::swap(goals[0], goals[1]);
                break;
            case TacticKind::Have: have(tac, goals); break;
            case TacticKind::Sorry: sorry(tac, goals); break;
            case TacticKind::Bullet: bullet(tac, goals); break;
            case TacticKind::Rw: rewrite(tac, goals); break;
            case TacticKind::Simp: simp(tac, goals, false); break;
            case TacticKind::SimpAll: simp(tac, goals, true); break;
            case TacticKind::Module: module(tac, goals); break;
            case TacticKind::ExactSearch: exact_search(tac, goals); break;
            case TacticKind::Rfl: rfl(tac, goals); break;
            case TacticKind::Assumption: assumption(tac, goals); break;
        }
        prune(goals);
    } catch (ElabError& e) {
        mctx_.rollback(cp);
        goals = before;
        if (span_empty(e.span())) e.set_span(tac.span);
        throw;
    } catch (const KernelError& e) {
        mctx_.rollback(cp);
        goals = before;
        throw ElabError(ErrorKind::Kernel, e.what(), tac.span);
    }
}

namespace {

void require_assigned(const MetaContext& mctx, std::size_t mark, const Term& value, const Span& span,
                      const Printer& printer) {
    for (auto id : mctx.unassigned_in(value)) {
        const auto& d = mctx.get(id);
        if (d.creation_index < mark || d.kind == MVarKind::Goal) continue;
        throw ElabError(ErrorKind::UnsolvedMVars,
                        fmt::format("don't know how to synthesize placeholder\n  {}",
                                    printer.goal(d.lctx, mctx.instantiate(d.type))),
                        span);
    }
}

}  // namespace

void Engine::intro(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    Term t = target(g);
    LocalContext lctx = mctx_.get(g).lctx;
    std::vector<std::string> names;
    for (const auto& n : tac.names) names.push_back(n.name);
    if (names.empty()) names.push_back("");
    for (const auto& name : names) {
        if (!t->is_pi()) {
            Meta m(*env_, mctx_, lctx);
            Term w = m.whnf(t);
            if (!w->is_pi())
                throw ElabError(ErrorKind::IntroOnNonPi,
                                "intro failed, the target is not a function type or a universal quantifier\n  " +
                                    Printer(*env_, &mctx_).term(t, lctx),
                                tac.span);
            t = w;
        }
        std::string user = name.empty() || name == "_" ? t->name() + "✝" : name;
        Term fv = lctx.push(user, t->binder_type(), t->binder_mode());
        Term body = instantiate1(t->body(), fv);
        Term ng = mctx_.new_mvar(body, lctx, "", MVarKind::Goal);
        mctx_.assign_delayed(g, {fv->index()}, ng->index());
        g = ng->index();
        t = body;
    }
    goals[0] = g;
}

void Engine::exact(const syntax::TermPtr& stx, Goals& goals, const Span& span) {
    std::uint64_t g = main_goal(goals, span);
    Meta m(*env_, mctx_, mctx_.get(g).lctx);
    Elaborator el(m, log_, this);
    std::size_t mark = mctx_.creation_order().size();
    Term v = el.elab_check(stx, target(g));
    el.synthesize_pending(true);
    v = m.instantiate(v);
    require_assigned(mctx_, mark, v, stx->span, Printer(*env_, &mctx_));
    mctx_.assign(g, v);
    goals.erase(goals.begin());
}

void Engine::apply(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    Meta m(*env_, mctx_, mctx_.get(g).lctx);
    Elaborator el(m, log_, this);
    std::size_t mark = mctx_.creation_order().size();
    Term f = m.instantiate(el.elab(tac.term));
    Term ftype = m.instantiate(m.infer(f));
    std::size_t elab_end = mctx_.creation_order().size();
    Term tgt = target(g);

    std::size_t n = 0;
    for (Term t = ftype; t->is_pi(); t = t->body()) ++n;
    std::vector<Term> args;
    bool ok = false;
    for (std::size_t k = n + 1; k-- > 0 && !ok;) {
        auto cp = mctx_.checkpoint();
        args.clear();
        Term t = ftype;
        for (std::size_t i = 0; i < k; ++i) {
            bool inst = t->binder_mode() == BinderMode::InstImplicit;
            Term mv = m.new_mvar(t->binder_type(), inst ? "" : t->name(),
                                 inst ? MVarKind::Instance : MVarKind::Natural);
            args.push_back(mv);
            t = instantiate1(t->body(), mv);
        }
        if (m.is_def_eq(t, tgt)) {
            ok = true;
        } else {
            mctx_.rollback(cp);
        }
    }
    if (!ok) {
        Term concl = ftype;
        while (concl->is_pi()) concl = concl->body();
        Printer p(*env_, &mctx_);
        throw ElabError(ErrorKind::ApplyUnifyFailure,
                        fmt::format("apply failed to unify\n  {}\nwith\n  {}", p.term(ftype, m.lctx()),
                                    p.term(tgt, m.lctx())),
                        tac.span);
    }
    el.synthesize_pending(false);
    for (const auto& a : args) {
        if (mctx_.get(a->index()).kind != MVarKind::Instance || mctx_.is_assigned(a->index())) continue;
        Meta local(*env_, mctx_, mctx_.get(a->index()).lctx);
        auto r = elab::synthesize_instance(local, m.instantiate(mctx_.get(a->index()).type));
        if (r.status == elab::InstanceStatus::Success) local.is_def_eq(a, r.value);
    }
    el.take_pending();

    Term proof = m.instantiate(kernel::mk_app(f, args));
    auto open = mctx_.unassigned_in(proof);
    std::vector<std::uint64_t> candidates;
    auto order = mctx_.creation_order();
    for (std::size_t i = mark; i < elab_end; ++i) candidates.push_back(order[i]);
    for (const auto& a : args) candidates.push_back(a->index());
    Goals props, data, insts;
    for (auto id : candidates) {
        if (std::find(open.begin(), open.end(), id) == open.end()) continue;
        const auto& d = mctx_.get(id);
        if (d.kind == MVarKind::Instance) {
            insts.push_back(id);
        } else if (m.is_prop(m.instantiate(d.type))) {
            props.push_back(id);
        } else {
            data.push_back(id);
        }
    }
    mctx_.assign(g, proof);
    Goals fresh = props;
    fresh.insert(fresh.end(), data.begin(), data.end());
    fresh.insert(fresh.end(), insts.begin(), insts.end());
    replace_main(goals, fresh);
}

void Engine::constructor(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    const LocalContext lctx = mctx_.get(g).lctx;
    Meta m(*env_, mctx_, lctx);
    Term w = m.whnf(target(g));
    const std::string& head = head_const_name(w);
    if (head == "True" && get_app_num_args(w) == 0) {
        mctx_.assign(g, mk_const("True.intro"));
        goals.erase(goals.begin());
        return;
    }
    if ((head == "And" || head == "Iff") && get_app_num_args(w) == 2) {
        auto ab = get_app_args(w);
        bool conj = head == "And";
        Term l = mctx_.new_mvar(conj ? ab[0] : mk_arrow(ab[0], ab[1]), lctx, "", MVarKind::Goal);
        Term r = mctx_.new_mvar(conj ? ab[1] : mk_arrow(ab[1], ab[0]), lctx, "", MVarKind::Goal);
        mctx_.assign(g, kernel::mk_app(conj ? "And.intro" : "Iff.intro", {ab[0], ab[1], l, r}));
        replace_main(goals, {l->index(), r->index()});
        return;
    }
    throw ElabError(ErrorKind::ConstructorHeadUnknown,
                    "constructor failed, the target is not a conjunction, an iff or True\n  " +
                        Printer(*env_, &mctx_).term(target(g), lctx),
                    tac.span);
}

void Engine::have(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    const LocalContext lctx = mctx_.get(g).lctx;
    Meta m(*env_, mctx_, lctx);
    Elaborator el(m, log_, this);
    std::size_t mark = mctx_.creation_order().size();
    Term type;
    Term val;
    if (tac.have_type) {
        type = el.elab_type(tac.have_type);
        val = el.elab_check(tac.term, type);
    } else {
        val = el.elab(tac.term);
        type = m.infer(val);
    }
    el.synthesize_pending(true);
    val = m.instantiate(val);
    type = m.instantiate(type);
    Printer p(*env_, &mctx_);
    require_assigned(mctx_, mark, val, tac.term->span, p);
    require_assigned(mctx_, mark, type, tac.term->span, p);

    std::string name = tac.have_name ? tac.have_name->name : "this";
    Term tgt = target(g);
    LocalContext inner = lctx;
    Term fv = inner.push(name, type);
    Term ng = mctx_.new_mvar(tgt, inner, "", MVarKind::Goal);
    Term aux = mctx_.new_mvar(kernel::mk_pi(name, type, tgt), lctx, "", MVarKind::Goal);
    mctx_.assign_delayed(aux->index(), {fv->index()}, ng->index());
    mctx_.assign(g, kernel::mk_app(aux, val));
    goals[0] = ng->index();
}

void Engine::sorry(const TacticSyntax& tac, Goals& goals) {
    if (goals.empty())
        throw ElabError(ErrorKind::NoGoals, "no goals to be proved; nothing to be sorry about", tac.span);
    std::uint64_t g = goals.front();
    mctx_.assign(g, kernel::mk_app(mk_const("sorryAx"), target(g)));
    goals.erase(goals.begin());
    if (!used_sorry_) {
        used_sorry_ = true;
        sorry_span_ = tac.span;
    }
}

void Engine::bullet(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    goals.erase(goals.begin());
    Goals focus{g};
    run_block(*tac.block, focus, tac.span, false, ErrorKind::BulletLeftGoalsOpen);
}

void Engine::rfl(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    Meta m(*env_, mctx_, mctx_.get(g).lctx);
    Term w = m.whnf(target(g));
    if (is_app_of(w, "Eq", 3)) {
        auto a = get_app_args(w);
        if (m.is_def_eq(a[1], a[2])) {
            mctx_.assign(g, kernel::mk_app("Eq.refl", {a[0], a[1]}));
            goals.erase(goals.begin());
            return;
        }
    } else if (is_app_of(w, "Iff", 2)) {
        auto a = get_app_args(w);
        if (m.is_def_eq(a[0], a[1])) {
            mctx_.assign(g, kernel::mk_app("Iff.refl", {a[0]}));
            goals.erase(goals.begin());
            return;
        }
    }
    throw ElabError(ErrorKind::Unsupported,
                    "rfl failed, the two sides are not definitionally equal\n  " +
                        Printer(*env_, &mctx_).term(target(g), m.lctx()),
                    tac.span);
}

void Engine::assumption(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    Meta m(*env_, mctx_, mctx_.get(g).lctx);
    Term tgt = target(g);
    const auto& decls = m.lctx().decls();
    for (auto it = decls.rbegin(); it != decls.rend(); ++it) {
        if (m.is_def_eq(it->type, tgt)) {
            mctx_.assign(g, it->as_term());
            goals.erase(goals.begin());
            return;
        }
    }
    throw ElabError(ErrorKind::Unsupported, "assumption failed, no hypothesis matches the target", tac.span);
}

namespace {

rewriter::SimpRule make_rule(const Environment& env, MetaContext& mctx, MessageLog& log, elab::TacticHost* host,
                             std::uint64_t goal, const syntax::TermPtr& stx) {
    Meta m(env, mctx, mctx.get(goal).lctx);
    if (stx->kind == syntax::TermKind::Ident && !stx->explicit_ && !m.lctx().find_by_name(stx->text) &&
        env.contains(stx->text))
        return rewriter::rule_from_const(env, stx->text);
    Elaborator el(m, log, host);
    Term p = el.elab(stx);
    el.synthesize_pending(false);
    p = m.instantiate(p);
    rewriter::SimpRule r{stx->text.empty() ? Printer(env, &mctx).term(p, m.lctx()) : stx->text, p,
                         m.instantiate(m.infer(p)), std::nullopt};
    if (p->is_fvar()) r.hyp = p->index();
    if (!rewriter::usable_as_rule(m, r.type))
        throw ElabError(ErrorKind::TypeMismatch,
                        "invalid rewrite rule, expected an equation, an iff or a proposition\n  " +
                            Printer(env, &mctx).term(r.type, m.lctx()),
                        stx->span);
    return r;
}

}  // namespace

void Engine::rewrite(const TacticSyntax& tac, Goals& goals) {
    for (const auto& rule : tac.rules) {
        std::uint64_t g = main_goal(goals, rule.span);
        auto r = make_rule(*env_, mctx_, log_, this, g, rule.term);
        try {
            replace_main(goals, rewriter::rewrite_target(*env_, mctx_, g, r, rule.reverse));
        } catch (ElabError& e) {
            if (span_empty(e.span())) e.set_span(rule.span);
            throw;
        }
    }
    if (goals.empty()) return;
    std::uint64_t g = goals.front();
    Meta m(*env_, mctx_, mctx_.get(g).lctx);
    m.set_transparency(Transparency::Reducible);
    Term t = m.whnf_core(target(g));
    if (is_app_of(t, "Eq", 3)) {
        auto a = get_app_args(t);
        if (m.is_def_eq(a[1], a[2])) {
            mctx_.assign(g, kernel::mk_app("Eq.refl", {a[0], a[1]}));
            goals.erase(goals.begin());
        }
    } else if (is_app_of(t, "Iff", 2)) {
        auto a = get_app_args(t);
        if (m.is_def_eq(a[0], a[1])) {
            mctx_.assign(g, kernel::mk_app("Iff.refl", {a[0]}));
            goals.erase(goals.begin());
        }
    }
}

void Engine::simp(const TacticSyntax& tac, Goals& goals, bool all) {
    std::uint64_t g = main_goal(goals, tac.span);
    auto rules = rewriter::simp_set_rules(*env_);
    for (const auto& rule : tac.rules) {
        if (rule.reverse)
            throw ElabError(ErrorKind::Unsupported, "simp does not accept reversed rules", rule.span);
        rules.push_back(make_rule(*env_, mctx_, log_, this, g, rule.term));
    }
    rewriter::SimpConfig cfg;
    if (cfg_.trace_simp) cfg.trace = cfg_.trace;
    replace_main(goals, all ? rewriter::simp_all(*env_, mctx_, g, rules, cfg)
                            : rewriter::simp_target(*env_, mctx_, g, rules, cfg));
}

void Engine::module(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    lindec::ModuleConfig cfg;
    if (cfg_.trace_module) cfg.trace = cfg_.trace;
    lindec::module_goal(*env_, mctx_, g, cfg);
    goals.erase(goals.begin());
}

void Engine::exact_search(const TacticSyntax& tac, Goals& goals) {
    std::uint64_t g = main_goal(goals, tac.span);
    auto suggestions = search::exact_search(*env_, mctx_, g, index());
    searches_.push_back({tac.span, suggestions});
    if (suggestions.empty())
        throw ElabError(ErrorKind::SearchNoResult, "exact? could not close the goal", tac.span);
    log_.info("Try this: " + suggestions.front(), tac.span);
    syntax::TermPtr stx = syntax::parse_term(std::string_view(suggestions.front()).substr(6));
    exact(stx, goals, tac.span);
}

}  // namespace microproof::tactics
