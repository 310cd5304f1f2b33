#include "microproof/search/search.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "microproof/elab/instances.h"
#include "microproof/elab/printer.h"

namespace microproof::search {

using elab::Meta;
using elab::MVarKind;
using elab::Printer;
using namespace kernel;

namespace {

const std::string& conclusion_head(Term t) {
    while (t->is_pi()) t = t->body();
    return head_const_name(t);
}

bool is_prop_decl(const Environment& env, const Declaration& d) {
    if (d.kind == DeclKind::Example || d.kind == DeclKind::Definition) return false;
    try {
        TypeChecker tc(env);
        return tc.is_prop(d.type);
    } catch (const KernelError&) {
        return false;
    }
}

/// `Π xs, a ↔ b` becomes the `.mp : Π xs, a → b` and `.mpr : Π xs, b → a` candidates.
void add_iff_projections(const Environment& env, const Declaration& d, std::map<std::string, std::vector<Candidate>>& out) {
    elab::MetaContext mctx;
    Meta meta(env, mctx);
    Term t = d.type;
    std::vector<Term> fvars;
    while (t->is_pi()) {
        Term fv = meta.push_local(t->name(), t->binder_type(), t->binder_mode());
        fvars.push_back(fv);
        t = instantiate1(t->body(), fv);
    }
    if (!is_app_of(t, "Iff", 2)) return;
    auto ab = get_app_args(t);
    Term self = kernel::mk_app(mk_const(d.name), fvars);
    for (bool mpr : {false, true}) {
        const Term& from = mpr ? ab[1] : ab[0];
        const Term& to = mpr ? ab[0] : ab[1];
        Term fn = meta.lctx().mk_lambda(fvars, kernel::mk_app(mpr ? "Iff.mpr" : "Iff.mp", {ab[0], ab[1], self}));
        Term type = meta.lctx().mk_pi(fvars, mk_arrow(from, to));
        const std::string& head = head_const_name(to);
        if (head.empty()) continue;
        out[head].push_back({d.name + (mpr ? ".mpr" : ".mp"), fn, type});
    }
}

std::string render_arg(const Printer& p, const Term& t, const LocalContext& lctx) {
    std::string s = p.term(t, lctx);
    if (s.find(' ') != std::string::npos && !(s.front() == '(' && s.back() == ')')) s = "(" + s + ")";
    return s;
}

/// Proves `prop` from a hypothesis, or from a universally quantified hypothesis
/// applied to terms of the context.
bool close_premise(Meta& meta, const Term& mv, const Term& prop) {
    const auto& decls = meta.lctx().decls();
    for (auto it = decls.rbegin(); it != decls.rend(); ++it)
        if (!it->is_instance() && meta.is_def_eq(it->type, prop) && meta.is_def_eq(mv, it->as_term())) return true;
    for (auto it = decls.rbegin(); it != decls.rend(); ++it) {
        if (it->is_instance() || !it->type->is_pi()) continue;
        auto cp = meta.mctx().checkpoint();
        Term t = it->type;
        std::vector<Term> args;
        while (t->is_pi()) {
            Term a = meta.new_mvar(t->binder_type());
            args.push_back(a);
            t = instantiate1(t->body(), a);
        }
        if (meta.is_def_eq(t, prop)) {
            Term proof = meta.instantiate(kernel::mk_app(it->as_term(), args));
            if (!meta.mctx().has_unassigned(proof) && meta.is_def_eq(mv, proof)) return true;
        }
        meta.mctx().rollback(cp);
    }
    return false;
}

struct Hit {
    std::size_t premises;
    std::size_t order;
    std::string text;
};

}  // namespace

HeadIndex::HeadIndex(const Environment& env) {
    for (const auto& d : env.decls()) {
        if (!is_prop_decl(env, *d)) continue;
        const std::string& head = conclusion_head(d->type);
        if (head.empty()) continue;
        by_head_[head].push_back({d->name, mk_const(d->name), d->type});
        if (head == "Iff") add_iff_projections(env, *d, by_head_);
    }
}

const std::vector<Candidate>& HeadIndex::lookup(const std::string& head) const {
    static const std::vector<Candidate> empty;
    auto it = by_head_.find(head);
    return it == by_head_.end() ? empty : it->second;
}

std::size_t HeadIndex::size() const {
    std::size_t n = 0;
    for (const auto& [h, v] : by_head_) n += v.size();
    return n;
}

std::vector<std::string> exact_search(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                      const HeadIndex& index) {
    Meta meta(env, mctx, mctx.get(goal).lctx);
    Printer printer(env, &mctx);
    Term target = mctx.instantiate(mctx.get(goal).type);

    std::vector<std::string> heads;
    for (Term t = target;;) {
        const std::string& h = head_const_name(t);
        if (!h.empty() && std::find(heads.begin(), heads.end(), h) == heads.end()) heads.push_back(h);
        auto next = meta.unfold(t, Transparency::Reducible);
        if (!next) break;
        t = *next;
    }

    std::vector<Candidate> candidates;
    const auto& decls = meta.lctx().decls();
    for (auto it = decls.rbegin(); it != decls.rend(); ++it) {
        // shadowed and inaccessible hypotheses cannot be named in a suggestion
        const auto* visible = meta.lctx().find_by_name(it->user_name);
        if (it->is_instance() || !visible || visible->fvar != it->fvar || it->user_name.find("✝") != std::string::npos)
            continue;
        candidates.push_back({it->user_name, it->as_term(), it->type});
    }
    for (const auto& head : heads)
        for (const auto& c : index.lookup(head)) candidates.push_back(c);

    std::vector<Hit> hits;
    std::size_t order = 0;
    for (const auto& c : candidates) {
        ++order;
        auto cp = mctx.checkpoint();
        Term t = c.type;
        std::vector<Term> args;
        std::vector<bool> explicit_arg;
        while (t->is_pi()) {
            bool inst = t->binder_mode() == BinderMode::InstImplicit;
            Term mv = meta.new_mvar(t->binder_type(), "", inst ? MVarKind::Instance : MVarKind::Natural);
            args.push_back(mv);
            explicit_arg.push_back(t->binder_mode() == BinderMode::Explicit);
            t = instantiate1(t->body(), mv);
        }
        bool ok = false;
        std::size_t premises = 0;
        try {
            ok = meta.is_def_eq(t, target);
            for (std::size_t i = 0; ok && i < args.size(); ++i) {
                if (mctx.is_assigned(args[i]->index())) continue;
                Term type = meta.instantiate(mctx.get(args[i]->index()).type);
                if (mctx.get(args[i]->index()).kind == MVarKind::Instance) {
                    auto r = elab::synthesize_instance(meta, type);
                    ok = r.status == elab::InstanceStatus::Success && meta.is_def_eq(args[i], r.value);
                } else if (meta.is_prop(type)) {
                    ++premises;
                    ok = close_premise(meta, args[i], type);
                } else {
                    ok = false;
                }
            }
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok) {
            std::string text = "exact " + c.display;
            for (std::size_t i = 0; i < args.size(); ++i)
                if (explicit_arg[i]) text += " " + render_arg(printer, meta.instantiate(args[i]), meta.lctx());
            hits.push_back({premises, order, text});
        }
        mctx.rollback(cp);
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return std::tie(a.premises, a.order) < std::tie(b.premises, b.order);
    });
    std::vector<std::string> out;
    for (const auto& h : hits)
        if (std::find(out.begin(), out.end(), h.text) == out.end()) out.push_back(h.text);
    return out;
}

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> name_words(const std::string& name) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(lower(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(name[i]);
        if (c == '.' || c == '_' || c == '\'') {
            flush();
            continue;
        }
        if (std::isupper(c) && !cur.empty() && !std::isupper(static_cast<unsigned char>(cur.back()))) flush();
        cur += name[i];
    }
    flush();
    return out;
}

}  // namespace

std::vector<NameHit> name_search(const Environment& env, const std::string& query) {
    std::vector<std::string> words;
    std::istringstream in(query);
    for (std::string w; in >> w;) words.push_back(lower(w));
    std::vector<NameHit> out;
    Printer printer(env);
    for (const auto& d : env.decls()) {
        auto nw = name_words(d->name);
        bool all = std::all_of(words.begin(), words.end(), [&](const std::string& w) {
            return std::any_of(nw.begin(), nw.end(), [&](const std::string& n) { return n.rfind(w, 0) == 0; });
        });
        if (all) out.push_back({d->name, printer.term(d->type, {})});
    }
    return out;
}

}  // namespace microproof::search
