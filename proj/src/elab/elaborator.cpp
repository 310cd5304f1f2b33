#include "microproof/elab/elaborator.h"

#include <fmt/format.h>

#include "microproof/elab/instances.h"
#include "microproof/elab/printer.h"

namespace microproof::elab {

using namespace kernel;
using syntax::TermKind;
using syntax::TermSyntax;

namespace {

std::vector<std::string> split_name(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto dot = s.find('.', start);
        out.push_back(s.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return out;
}

std::string join_name(const std::vector<std::string>& segs, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += (i ? "." : "") + segs[i];
    return out;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

std::vector<char32_t> code_points(const std::string& s) {
    std::vector<char32_t> out;
    for (std::size_t i = 0; i < s.size();) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
        char32_t cp = len == 1 ? c : c & (0xFF >> (len + 1));
        for (std::size_t k = 1; k < len && i + k < s.size(); ++k) cp = (cp << 6) | (s[i + k] & 0x3F);
        out.push_back(cp);
        i += len;
    }
    return out;
}

// A letter optionally followed by digits, subscripts or primes: `K`, `V`, `α`, `R₁`.
bool auto_bound_shape(const std::string& name) {
    auto cps = code_points(name);
    if (cps.empty()) return false;
    char32_t c = cps[0];
    bool letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= 0x391 && c <= 0x3C9 && c != U'λ' && c != U'Π' && c != U'Σ');
    if (!letter) return false;
    for (std::size_t i = 1; i < cps.size(); ++i) {
        char32_t d = cps[i];
        if (!((d >= '0' && d <= '9') || d == '\'' || (d >= 0x2080 && d <= 0x2089))) return false;
    }
    return true;
}

const char* binary_const(const std::string& op) {
    if (op == "=") return "Eq";
    if (op == "≠") return "Ne";
    if (op == "∧") return "And";
    if (op == "∨") return "Or";
    if (op == "↔") return "Iff";
    if (op == "+") return "AddCommGroup.add";
    if (op == "-") return "AddCommGroup.sub";
    if (op == "*") return "Ring.mul";
    if (op == "•") return "Module.smul";
    if (op == "∈") return "Set.Mem";
    return nullptr;
}

// Restores the local context length when a binder scope is left, normally or by exception.
class ScopeGuard {
public:
    explicit ScopeGuard(Meta& m) : meta_(m), size_(m.lctx().size()) {}
    ~ScopeGuard() {
        while (meta_.lctx().size() > size_) meta_.pop_local();
    }
    ScopeGuard(const ScopeGuard&) = delete;
    ScopeGuard& operator=(const ScopeGuard&) = delete;

private:
    Meta& meta_;
    std::size_t size_;
};

}  // namespace

Elaborator::Elaborator(Meta& meta, MessageLog& log, TacticHost* host) : meta_(meta), log_(log), host_(host) {}

std::string Elaborator::render(const Term& t) const {
    return Printer(meta_.env(), &meta_.mctx()).term(t, meta_.lctx());
}

Term Elaborator::const_type(const std::string& name, const Span& span) const {
    const Declaration* d = meta_.env().find(name);
    if (!d) throw ElabError(ErrorKind::UnknownIdentifier, fmt::format("unknown constant '{}'", name), span);
    return d->type;
}

void Elaborator::mismatch(const Term& value, const Term& actual, const Term& expected, const Span& span) {
    throw ElabError(ErrorKind::TypeMismatch,
                    fmt::format("type mismatch\n  {}\nhas type\n  {}\nbut is expected to have type\n  {}",
                                render(value), render(actual), render(expected)),
                    span);
}

Term Elaborator::elab(const TermPtr& stx, const std::optional<Term>& expected) {
    return elab_core(stx, expected).term;
}

Term Elaborator::elab_check(const TermPtr& stx, const Term& expected) {
    return check_against(elab_core(stx, expected), expected, *stx).term;
}

Elaborator::Typed Elaborator::check_against(Typed value, const Term& expected, const TermSyntax& stx) {
    if (!meta_.is_def_eq(value.type, expected)) mismatch(value.term, value.type, expected, stx.span);
    return {value.term, expected};
}

Term Elaborator::elab_type(const TermPtr& stx) {
    Typed r = elab_core(stx, std::nullopt);
    Term s = meta_.whnf(r.type);
    if (s->is_mvar() && meta_.is_def_eq(s, mk_type())) return r.term;
    if (!s->is_sort())
        throw ElabError(ErrorKind::TypeMismatch,
                        fmt::format("type expected, got\n  ({} : {})", render(r.term), render(r.type)), stx->span);
    return r.term;
}

Term Elaborator::mk_app(const std::string& name, const std::vector<Term>& explicit_args, const Span& span) {
    std::vector<Arg> args;
    for (const auto& a : explicit_args) args.push_back({nullptr, {a, meta_.infer(a)}});
    return app_args({mk_const(name), const_type(name, span)}, std::move(args), false, span).term;
}

bool Elaborator::try_auto_bound(const std::string& name) {
    if (!auto_bound_ || binder_depth_ > 0 || !auto_bound_shape(name)) return false;
    Term fv = meta_.push_local(name, mk_type(), BinderMode::Implicit);
    auto_bound_locals_.push_back(fv);
    return true;
}

Elaborator::Typed Elaborator::elab_core(const TermPtr& stx, const std::optional<Term>& expected) {
    const TermSyntax& s = *stx;
    switch (s.kind) {
        case TermKind::Paren: return elab_core(s.args[0], expected);
        case TermKind::Typed: {
            Term type = elab_type(s.args[1]);
            return {elab_check(s.args[0], type), type};
        }
        case TermKind::Ident: return elab_ident(s, {}, expected, s.span);
        case TermKind::App: return elab_app(s, expected);
        case TermKind::Hole: {
            Term type = expected ? *expected : meta_.new_mvar(mk_type());
            return {meta_.new_mvar(type), type};
        }
        case TermKind::Sort: return {s.text == "Prop" ? mk_prop() : mk_type(), mk_type()};
        case TermKind::Numeral: {
            if (s.text != "0")
                throw ElabError(ErrorKind::Unsupported, fmt::format("numeral '{}' is not supported; only 0 is", s.text),
                                s.span);
            Typed r = elab_const_app("Zero.zero", {}, s.span);
            if (expected) meta_.is_def_eq(r.type, *expected);
            return r;
        }
        case TermKind::Binary: {
            if (s.text == "→") {
                Term a = elab_type(s.args[0]);
                Term b = elab_type(s.args[1]);
                Term t = mk_arrow(a, b);
                return {t, meta_.infer(t)};
            }
            const char* name = binary_const(s.text);
            if (!name) throw ElabError(ErrorKind::Unsupported, fmt::format("unsupported operator '{}'", s.text), s.span);
            return elab_const_app(name, {{s.args[0], {}}, {s.args[1], {}}}, s.span);
        }
        case TermKind::Unary:
            return elab_const_app(s.text == "¬" ? "Not" : "AddCommGroup.neg", {{s.args[0], {}}}, s.span);
        case TermKind::LinearMap:
            return elab_const_app("LinearMap", {{s.args[0], {}}, {s.args[1], {}}, {s.args[2], {}}}, s.span);
        case TermKind::Fun:
        case TermKind::Forall: return elab_binding(s, expected);
        case TermKind::Anonymous: return elab_anonymous(s, expected);
        case TermKind::By: return elab_by(s, expected);
        case TermKind::Calc: return elab_calc(s, expected);
    }
    throw ElabError(ErrorKind::Unsupported, "unsupported term", s.span);
}

namespace {

bool needs_expected(const TermSyntax& s) {
    const TermSyntax* t = &s;
    while (t->kind == TermKind::Paren) t = t->args[0].get();
    return t->kind == TermKind::Anonymous || t->kind == TermKind::Fun || t->kind == TermKind::By;
}

}  // namespace

Elaborator::Typed Elaborator::elab_const_app(const std::string& name, std::vector<Arg> args, const Span& span) {
    return app_args({mk_const(name), const_type(name, span)}, std::move(args), false, span);
}

Elaborator::Typed Elaborator::elab_app(const TermSyntax& s, const std::optional<Term>& expected) {
    std::vector<Arg> args;
    for (std::size_t i = 1; i < s.args.size(); ++i) args.push_back({s.args[i], {}});
    const TermSyntax* fn = s.args[0].get();
    while (fn->kind == TermKind::Paren) fn = fn->args[0].get();
    if (fn->kind == TermKind::Ident) return elab_ident(*fn, std::move(args), expected, s.span);
    Typed f = elab_core(s.args[0], std::nullopt);
    return app_args(f, std::move(args), false, s.span, std::nullopt, {}, expected);
}

Elaborator::Typed Elaborator::elab_ident(const TermSyntax& s, std::vector<Arg> args,
                                         const std::optional<Term>& expected, const Span& span) {
    auto segs = split_name(s.text);
    Typed base;
    std::size_t consumed = 0;
    if (const LocalDecl* d = meta_.lctx().find_by_name(segs[0])) {
        base = {d->as_term(), d->type};
        consumed = 1;
    } else {
        for (std::size_t k = segs.size(); k >= 1 && consumed == 0; --k) {
            std::string name = join_name(segs, k);
            if (const Declaration* d = meta_.env().find(name)) {
                base = {mk_const(name), d->type};
                consumed = k;
            }
        }
    }
    if (consumed == 0) {
        if (segs.size() == 1 && try_auto_bound(segs[0])) {
            const LocalDecl* d = meta_.lctx().find_by_name(segs[0]);
            base = {d->as_term(), d->type};
            consumed = 1;
        } else {
            throw ElabError(ErrorKind::UnknownIdentifier, fmt::format("unknown identifier '{}'", s.text), s.span);
        }
    }
    if (consumed == segs.size()) return app_args(base, std::move(args), s.explicit_, span, std::nullopt, {}, expected);
    Typed cur = app_args(base, {}, s.explicit_, s.span);
    for (std::size_t i = consumed; i < segs.size(); ++i) {
        bool last = i + 1 == segs.size();
        cur = project(cur, segs[i], last ? std::move(args) : std::vector<Arg>{}, last ? span : s.span,
                      last ? expected : std::nullopt);
    }
    return cur;
}

Elaborator::Typed Elaborator::project(Typed base, const std::string& field, std::vector<Arg> args, const Span& span,
                                      const std::optional<Term>& expected) {
    Term type = meta_.instantiate(base.type);
    while (true) {
        Term w = meta_.whnf_core(type);
        std::string head = head_const_name(w);
        std::string fname;
        if (!head.empty()) {
            if (all_digits(field)) {
                if (head == "And" && (field == "1" || field == "2")) fname = field == "1" ? "And.left" : "And.right";
                if (head == "Iff" && (field == "1" || field == "2")) fname = field == "1" ? "Iff.mp" : "Iff.mpr";
            } else if (meta_.env().contains(head + "." + field)) {
                fname = head + "." + field;
            }
        }
        if (!fname.empty())
            return app_args({mk_const(fname), const_type(fname, span)}, std::move(args), false, span, base, head,
                            expected);
        auto u = meta_.unfold(w);
        if (!u)
            throw ElabError(ErrorKind::InvalidField,
                            fmt::format("invalid field '{}', the environment does not contain '{}.{}'\n  {}\nhas type\n  {}",
                                        field, head, field, render(base.term), render(base.type)),
                            span);
        type = *u;
    }
}

Term Elaborator::coerce_linear_map(Typed& fn, const Span& span) {
    Typed apply{mk_const("LinearMap.apply"), const_type("LinearMap.apply", span)};
    return app_args(apply, {{nullptr, fn}}, false, span).term;
}

Elaborator::Typed Elaborator::app_args(Typed fn, std::vector<Arg> args, bool explicit_mode, const Span& span,
                                       const std::optional<Typed>& self, const std::string& self_head,
                                       const std::optional<Term>& expected) {
    struct Postponed {
        TermPtr stx;
        Term mvar;
    };
    std::vector<Postponed> postponed;
    Term f = fn.term;
    Term ftype = fn.type;
    std::size_t next = 0;
    bool self_used = !self;
    while (true) {
        ftype = meta_.instantiate(ftype);
        if (!ftype->is_pi()) {
            if (next >= args.size() && self_used) break;
            Term w = meta_.whnf(ftype);
            if (w->is_pi()) {
                ftype = w;
                continue;
            }
            if (head_const_name(w) == "LinearMap") {
                Typed cur{f, ftype};
                f = coerce_linear_map(cur, span);
                ftype = meta_.infer(f);
                continue;
            }
            throw ElabError(ErrorKind::FunctionExpected,
                            fmt::format("function expected\n  {}\nhas type\n  {}", render(f), render(ftype)), span);
        }
        BinderMode mode = ftype->binder_mode();
        Term btype = ftype->binder_type();
        Term a;
        auto instance_mvar = [&] {
            Term mv = meta_.new_mvar(btype, "", MVarKind::Instance);
            pending_.push_back({mv->index(), span});
            return mv;
        };
        if (mode != BinderMode::Explicit && !explicit_mode) {
            a = mode == BinderMode::Implicit ? meta_.new_mvar(btype, ftype->name()) : instance_mvar();
        } else if (!self_used && head_const_name(meta_.whnf_core(btype)) == self_head) {
            if (!meta_.is_def_eq(self->type, btype)) mismatch(self->term, self->type, btype, span);
            a = self->term;
            self_used = true;
        } else if (next < args.size()) {
            Arg& arg = args[next++];
            if (!arg.stx) {
                if (!meta_.is_def_eq(arg.value.type, btype)) mismatch(arg.value.term, arg.value.type, btype, span);
                a = arg.value.term;
            } else if (mode == BinderMode::InstImplicit && arg.stx->kind == TermKind::Hole) {
                a = instance_mvar();
            } else if (needs_expected(*arg.stx) && meta_.mctx().has_unassigned(btype)) {
                a = meta_.new_mvar(btype);
                postponed.push_back({arg.stx, a});
            } else {
                a = elab_check(arg.stx, btype);
            }
        } else {
            break;
        }
        f = kernel::mk_app(f, a);
        ftype = instantiate1(ftype->body(), a);
    }
    if (!self_used)
        throw ElabError(ErrorKind::InvalidField,
                        fmt::format("invalid field notation, no explicit argument of type '{}'", self_head), span);
    if (!postponed.empty()) {
        // Arguments that need their expected type wait for the result type to be unified first.
        if (expected) meta_.is_def_eq(meta_.instantiate(ftype), *expected);
        for (const auto& p : postponed) {
            Term type = meta_.instantiate(meta_.infer(p.mvar));
            Term v = elab_check(p.stx, type);
            if (!meta_.is_def_eq(p.mvar, v)) mismatch(v, type, type, p.stx->span);
        }
    }
    return {f, ftype};
}

std::vector<Term> Elaborator::elab_binders(const std::vector<syntax::Binder>& binders) {
    std::vector<Term> fvars;
    for (const auto& b : binders) {
        Term type = b.type ? elab_type(b.type) : meta_.new_mvar(mk_type());
        synthesize_pending(false);
        if (b.names.empty()) {
            fvars.push_back(meta_.push_local("inst✝", meta_.instantiate(type), b.mode));
            continue;
        }
        for (const auto& n : b.names) fvars.push_back(meta_.push_local(n.name, meta_.instantiate(type), b.mode));
    }
    return fvars;
}

Elaborator::Typed Elaborator::elab_binding(const TermSyntax& s, const std::optional<Term>& expected) {
    const bool is_fun = s.kind == TermKind::Fun;
    std::optional<Term> exp;
    if (is_fun && expected) exp = meta_.instantiate(*expected);
    ScopeGuard guard(meta_);
    ++binder_depth_;
    struct DepthGuard {
        int& d;
        ~DepthGuard() { --d; }
    } depth_guard{binder_depth_};

    std::vector<Term> fvars;
    for (const auto& b : s.binders) {
        Term type;
        if (b.type) {
            type = elab_type(b.type);
        } else if (exp && meta_.whnf(*exp)->is_pi()) {
            type = meta_.whnf(*exp)->binder_type();
        } else {
            type = meta_.new_mvar(mk_type());
        }
        std::vector<std::string> names;
        for (const auto& n : b.names) names.push_back(n.name);
        if (names.empty()) names.push_back("inst✝");
        for (const auto& n : names) {
            std::optional<Term> pi;
            if (exp) {
                Term w = meta_.whnf(*exp);
                if (w->is_pi()) {
                    pi = w;
                    if (b.type) meta_.is_def_eq(w->binder_type(), type);
                }
            }
            Term fv = meta_.push_local(n, meta_.instantiate(type), b.mode);
            fvars.push_back(fv);
            exp = pi ? std::optional<Term>(instantiate1((*pi)->body(), fv)) : std::nullopt;
        }
    }
    Term body;
    if (is_fun) {
        body = exp ? elab_check(s.args[0], *exp) : elab_core(s.args[0], std::nullopt).term;
    } else {
        body = elab_type(s.args[0]);
    }
    synthesize_pending(false);
    Term result = is_fun ? meta_.mk_lambda(fvars, body) : meta_.mk_pi(fvars, body);
    return {result, meta_.infer(result)};
}

Elaborator::Typed Elaborator::elab_anonymous(const TermSyntax& s, const std::optional<Term>& expected) {
    if (!expected)
        throw ElabError(ErrorKind::Unsupported, "invalid constructor ⟨...⟩, expected type must be known", s.span);
    Term w = meta_.whnf(meta_.instantiate(*expected));
    std::string head = head_const_name(w);
    if ((head != "And" && head != "Iff") || get_app_num_args(w) != 2)
        throw ElabError(ErrorKind::Unsupported,
                        fmt::format("invalid constructor ⟨...⟩, expected type must be a conjunction or an iff\n  {}",
                                    render(*expected)),
                        s.span);
    if (s.args.size() < 2)
        throw ElabError(ErrorKind::Unsupported, "invalid constructor ⟨...⟩, insufficient number of arguments", s.span);
    auto parts = get_app_args(w);
    TermPtr second = s.args[1];
    if (s.args.size() > 2) {
        auto rest = std::make_shared<TermSyntax>();
        rest->kind = TermKind::Anonymous;
        rest->span = Span::merge(s.args[1]->span, s.args.back()->span);
        rest->args.assign(s.args.begin() + 1, s.args.end());
        second = rest;
    }
    bool conj = head == "And";
    Term a = elab_check(s.args[0], conj ? parts[0] : mk_arrow(parts[0], parts[1]));
    Term b = elab_check(second, conj ? parts[1] : mk_arrow(parts[1], parts[0]));
    std::string ctor = conj ? "And.intro" : "Iff.intro";
    return {kernel::mk_app(ctor, {parts[0], parts[1], a, b}), w};
}

Elaborator::Typed Elaborator::elab_by(const TermSyntax& s, const std::optional<Term>& expected) {
    if (!expected)
        throw ElabError(ErrorKind::Unsupported, "tactic block requires a known expected type", s.span);
    if (!host_) throw ElabError(ErrorKind::Unsupported, "tactic blocks are not available here", s.span);
    synthesize_pending(false);
    Term target = meta_.instantiate(*expected);
    Term proof = host_->run_nested(*this, *s.tactics, target, s.span);
    return {proof, target};
}

Elaborator::Typed Elaborator::elab_calc(const TermSyntax& s, const std::optional<Term>& /*expected*/) {
    const auto& steps = s.calc->steps;
    Term alpha, lhs0, rhs_prev, proof;
    std::size_t i = 0;
    if (!steps.empty() && !steps[0].proof) {
        Typed start = elab_core(steps[0].relation, std::nullopt);
        alpha = start.type;
        lhs0 = rhs_prev = start.term;
        i = 1;
    }
    for (; i < steps.size(); ++i) {
        const auto& st = steps[i];
        Term rel = elab_type(st.relation);
        Term w = meta_.whnf_core(meta_.instantiate(rel));
        if (!is_app_of(w, "Eq", 3))
            throw ElabError(ErrorKind::CalcChainBroken,
                            fmt::format("invalid 'calc' step, equality expected\n  {}", render(rel)), st.relation->span);
        auto eq = get_app_args(w);
        if (rhs_prev && !meta_.is_def_eq(eq[1], rhs_prev))
            throw ElabError(ErrorKind::CalcChainBroken,
                            fmt::format("invalid 'calc' step, left-hand side is\n  {}\nbut previous right-hand side is\n  {}",
                                        render(eq[1]), render(rhs_prev)),
                            st.relation->span);
        synthesize_pending(false);
        rel = meta_.instantiate(rel);
        eq = get_app_args(meta_.whnf_core(rel));
        Term p = elab_check(st.proof, rel);
        if (!proof) {
            alpha = eq[0];
            lhs0 = eq[1];
            proof = p;
        } else {
            const_type("Eq.trans", s.span);
            proof = kernel::mk_app("Eq.trans", {alpha, lhs0, rhs_prev, eq[2], proof, p});
        }
        rhs_prev = eq[2];
    }
    if (!proof) {
        if (!lhs0) throw ElabError(ErrorKind::CalcChainBroken, "empty 'calc'", s.span);
        proof = kernel::mk_app("Eq.refl", {alpha, lhs0});
    }
    return {meta_.instantiate(proof), meta_.instantiate(kernel::mk_app("Eq", {alpha, lhs0, rhs_prev}))};
}

void Elaborator::synthesize_pending(bool final) {
    bool progress = true;
    while (progress && !pending_.empty()) {
        progress = false;
        for (std::size_t k = 0; k < pending_.size();) {
            Pending p = pending_[k];
            const MVarDecl d = meta_.mctx().get(p.mvar);
            Meta local(meta_.env(), meta_.mctx(), d.lctx);
            Term type = meta_.instantiate(d.type);
            InstanceResult r;
            try {
                r = synthesize_instance(local, type);
            } catch (const InstanceDepthExceeded& e) {
                throw ElabError(ErrorKind::InstanceDepthExceeded,
                                fmt::format("failed to synthesize\n  {}\n{}", render(type), e.what()), p.span);
            }
            if (r.status == InstanceStatus::Stuck) {
                ++k;
                continue;
            }
            if (r.status == InstanceStatus::Failure)
                throw ElabError(ErrorKind::InstanceResolutionFailed,
                                fmt::format("failed to synthesize\n  {}", render(type)), p.span);
            if (!local.is_def_eq(mk_mvar(p.mvar), r.value))
                throw ElabError(ErrorKind::InstanceResolutionFailed,
                                fmt::format("synthesized instance\n  {}\nis not definitionally equal to the one inferred by "
                                            "unification\n  {}",
                                            render(r.value), render(mk_mvar(p.mvar))),
                                p.span);
            pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(k));
            progress = true;
        }
    }
    if (!final) return;
    for (const auto& p : pending_) {
        if (meta_.mctx().is_assigned(p.mvar) && !meta_.mctx().has_unassigned(mk_mvar(p.mvar))) continue;
        throw ElabError(ErrorKind::InstanceResolutionFailed,
                        fmt::format("typeclass instance problem is stuck\n  {}",
                                    render(meta_.instantiate(meta_.mctx().get(p.mvar).type))),
                        p.span);
    }
    pending_.clear();
}

std::vector<std::uint64_t> Elaborator::take_pending() {
    std::vector<std::uint64_t> out;
    for (const auto& p : pending_)
        if (!meta_.mctx().is_assigned(p.mvar)) out.push_back(p.mvar);
    pending_.clear();
    return out;
}

}  // namespace microproof::elab
