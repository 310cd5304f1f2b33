#include "microproof/elab/printer.h"

#include <fmt/format.h>

#include "microproof/syntax/parser.h"

namespace microproof::elab {

using namespace kernel;
namespace prec = syntax::prec;

namespace {

constexpr int kAtom = prec::kMax + 1;

enum class Fix { Infix, Prefix };

struct Notation {
    std::string_view head;
    std::size_t nargs;
    Fix fix;
    std::string_view symbol;
    int prec;
    bool right_assoc;
    std::size_t lhs;
    std::size_t rhs;  // unused for prefix
};

constexpr Notation kNotations[] = {
    {"Eq", 3, Fix::Infix, "=", prec::kEq, false, 1, 2},
    {"Ne", 3, Fix::Infix, "≠", prec::kEq, false, 1, 2},
    {"Set.Mem", 3, Fix::Infix, "∈", prec::kEq, false, 1, 2},
    {"Iff", 2, Fix::Infix, "↔", prec::kIff, false, 0, 1},
    {"And", 2, Fix::Infix, "∧", prec::kAnd, true, 0, 1},
    {"Or", 2, Fix::Infix, "∨", prec::kOr, true, 0, 1},
    {"Not", 1, Fix::Prefix, "¬", prec::kNot, false, 0, 0},
    {"AddCommGroup.add", 4, Fix::Infix, "+", prec::kAdd, false, 2, 3},
    {"AddCommGroup.sub", 4, Fix::Infix, "-", prec::kAdd, false, 2, 3},
    {"AddCommGroup.neg", 3, Fix::Prefix, "-", prec::kNeg, false, 2, 0},
    {"Ring.mul", 4, Fix::Infix, "*", prec::kMul, false, 2, 3},
    {"Module.smul", 7, Fix::Infix, "•", prec::kSmul, true, 5, 6},
};

constexpr std::size_t kLinearMapArgs = 8;
constexpr std::size_t kApplyFnIndex = 8;

const Notation* find_notation(const std::string& head, std::size_t nargs) {
    for (const auto& n : kNotations)
        if (n.head == head && n.nargs == nargs) return &n;
    return nullptr;
}

std::string superscript(std::size_t n) {
    static const char* digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
    std::string s;
    for (char c : std::to_string(n)) s += digits[c - '0'];
    return s;
}

}  // namespace

Printer::Printer(const Environment& env, const MetaContext* mctx) : env_(env), mctx_(mctx) {}

std::string Printer::paren(const Out& o, int needed) const {
    return o.prec < needed ? "(" + o.text + ")" : o.text;
}

std::string Printer::mvar_name(std::uint64_t id) const {
    if (mctx_) {
        if (const MVarDecl* d = mctx_->decl(id)) {
            if (!d->user_name.empty()) return "?" + d->user_name;
            return fmt::format("?m.{}", d->creation_index);
        }
    }
    return fmt::format("?m.{}", id);
}

Printer::Scope Printer::scope_for(const LocalContext& lctx) const {
    Scope s{&lctx, {}, {}};
    const auto& decls = lctx.decls();
    for (std::size_t i = 0; i < decls.size(); ++i) {
        bool shadowed = false;
        for (std::size_t j = i + 1; j < decls.size() && !shadowed; ++j)
            shadowed = decls[j].user_name == decls[i].user_name;
        std::string name = decls[i].user_name.empty() ? "x✝" : decls[i].user_name;
        if (shadowed && name.find("✝") == std::string::npos) name += "✝";
        s.fvar_names[decls[i].fvar] = name;
    }
    return s;
}

std::string Printer::term(const Term& t, const LocalContext& lctx) const {
    Scope s = scope_for(lctx);
    Term inst = mctx_ ? mctx_->instantiate(t) : t;
    return pp(inst, s).text;
}

namespace {

// Whether `body` (under one new binder) refers to an outer entity displayed as `name`.
bool refers_to(const Term& body, const std::string& name, const std::unordered_map<std::uint64_t, std::string>& fvars,
               const std::vector<std::string>& bound, std::uint32_t depth) {
    if (body->loose_bvar_range() <= depth && !body->has_fvar()) return false;
    switch (body->kind()) {
        case ExprKind::BVar: {
            if (body->index() < depth) return false;
            std::size_t outer = body->index() - depth;
            return outer < bound.size() && bound[bound.size() - 1 - outer] == name;
        }
        case ExprKind::FVar: {
            auto it = fvars.find(body->index());
            return it != fvars.end() && it->second == name;
        }
        case ExprKind::App:
            return refers_to(body->fn(), name, fvars, bound, depth) || refers_to(body->arg(), name, fvars, bound, depth);
        case ExprKind::Lam:
        case ExprKind::Pi:
            return refers_to(body->binder_type(), name, fvars, bound, depth) ||
                   refers_to(body->body(), name, fvars, bound, depth + 1);
        default: return false;
    }
}

}  // namespace

std::string Printer::fresh_name(const std::string& base_in, const Term& body, const Scope& s) const {
    std::string base = base_in.empty() || base_in == "_" ? "x" : base_in;
    auto taken = [&](const std::string& n) { return refers_to(body, n, s.fvar_names, s.bound, 1); };
    if (!taken(base)) return base;
    std::string cand = base + "✝";
    for (std::size_t k = 1; taken(cand); ++k) cand = base + "✝" + superscript(k);
    return cand;
}

Term Printer::type_of_head(const Term& fn, const Scope& s) const {
    switch (fn->kind()) {
        case ExprKind::Const:
            if (const Declaration* d = env_.find(fn->name())) return d->type;
            return nullptr;
        case ExprKind::FVar:
            if (const LocalDecl* d = s.lctx->find(fn->index())) return d->type;
            return nullptr;
        case ExprKind::MVar:
            if (mctx_)
                if (const MVarDecl* d = mctx_->decl(fn->index())) return mctx_->instantiate(d->type);
            return nullptr;
        default: return nullptr;
    }
}

std::vector<bool> Printer::explicit_mask(const Term& fn, std::size_t nargs, const Scope& s) const {
    std::vector<bool> mask(nargs, true);
    Term ty = type_of_head(fn, s);
    for (std::size_t i = 0; ty && i < nargs && ty->is_pi(); ++i) {
        mask[i] = ty->binder_mode() == BinderMode::Explicit;
        ty = ty->body();
    }
    return mask;
}

Printer::Out Printer::pp(const Term& t, Scope& s) const {
    switch (t->kind()) {
        case ExprKind::Sort: return {t->sort() == SortKind::Prop ? "Prop" : "Type", kAtom};
        case ExprKind::BVar: {
            std::size_t i = t->index();
            if (i < s.bound.size()) return {s.bound[s.bound.size() - 1 - i], kAtom};
            return {fmt::format("#{}", i), kAtom};
        }
        case ExprKind::FVar: {
            auto it = s.fvar_names.find(t->index());
            if (it != s.fvar_names.end()) return {it->second, kAtom};
            return {fmt::format("_fvar.{}", t->index()), kAtom};
        }
        case ExprKind::MVar: return {mvar_name(t->index()), kAtom};
        case ExprKind::Const: return {t->name(), kAtom};
        case ExprKind::App: return pp_app(t, s);
        case ExprKind::Lam:
        case ExprKind::Pi: return pp_binding(t, s);
    }
    return {"?", kAtom};
}

Printer::Out Printer::pp_app(const Term& t, Scope& s) const {
    const Term& fn = get_app_fn(t);
    auto args = get_app_args(t);
    if (fn->is_const()) {
        const std::string& head = fn->name();
        if (head == "Zero.zero" && args.size() == 2) return {"0", kAtom};
        if (head == "LinearMap" && args.size() == kLinearMapArgs) {
            return {paren(pp(args[1], s), prec::kArrow + 1) + " →ₗ[" + pp(args[0], s).text + "] " +
                        paren(pp(args[2], s), prec::kArrow),
                    prec::kArrow};
        }
        if (head == "LinearMap.apply" && args.size() > kApplyFnIndex) {
            Out f = pp(args[kApplyFnIndex], s);
            if (args.size() == kApplyFnIndex + 1) return f;
            std::string out = paren(f, prec::kMax);
            for (std::size_t i = kApplyFnIndex + 1; i < args.size(); ++i) out += " " + paren(pp(args[i], s), kAtom);
            return {out, prec::kMax};
        }
        if (const Notation* n = find_notation(head, args.size())) {
            if (n->fix == Fix::Prefix) {
                std::string operand = paren(pp(args[n->lhs], s), n->prec);
                std::string sep = n->symbol == "-" && operand.rfind('-', 0) == 0 ? " " : "";
                return {std::string(n->symbol) + sep + operand, n->prec};
            }
            int lp = n->right_assoc ? n->prec + 1 : n->prec;
            int rp = n->right_assoc ? n->prec : n->prec + 1;
            if (n->head == "Eq" || n->head == "Ne" || n->head == "Set.Mem" || n->head == "Iff") lp = rp = n->prec + 1;
            return {paren(pp(args[n->lhs], s), lp) + " " + std::string(n->symbol) + " " + paren(pp(args[n->rhs], s), rp),
                    n->prec};
        }
    }

    auto mask = explicit_mask(fn, args.size(), s);
    std::vector<std::size_t> shown;
    for (std::size_t i = 0; i < args.size(); ++i)
        if (mask[i]) shown.push_back(i);

    std::string head_text;
    std::size_t first = 0;
    // generalized field notation: `x.f` when `x : C …` and the head is `C.f`
    if (fn->is_const() && !shown.empty()) {
        const std::string& name = fn->name();
        auto dot = name.rfind('.');
        const Term& self = args[shown[0]];
        if (dot != std::string::npos && (self->is_fvar() || self->is_mvar())) {
            Term st = type_of_head(self, s);
            if (st && head_const_name(st) == name.substr(0, dot)) {
                head_text = paren(pp(self, s), kAtom) + "." + name.substr(dot + 1);
                first = 1;
            }
        }
    }
    if (head_text.empty()) {
        if (shown.empty()) return pp(fn, s);
        head_text = paren(pp(fn, s), prec::kMax);
    }
    if (first == shown.size()) return {head_text, kAtom};
    std::string out = head_text;
    for (std::size_t k = first; k < shown.size(); ++k) out += " " + paren(pp(args[shown[k]], s), kAtom);
    return {out, prec::kMax};
}

Printer::Out Printer::pp_binding(const Term& t, Scope& s) const {
    if (t->is_pi() && t->binder_mode() == BinderMode::Explicit && !has_loose_bvar(t->body(), 0)) {
        std::string dom = paren(pp(t->binder_type(), s), prec::kArrow + 1);
        s.bound.push_back("_");
        std::string cod = paren(pp(t->body(), s), prec::kArrow);
        s.bound.pop_back();
        return {dom + " → " + cod, prec::kArrow};
    }

    const bool is_pi = t->is_pi();
    std::string out = is_pi ? "∀" : "fun";
    std::size_t pushed = 0;
    Term cur = t;
    while (cur->kind() == t->kind()) {
        if (is_pi && cur->binder_mode() == BinderMode::Explicit && !has_loose_bvar(cur->body(), 0)) break;
        BinderMode mode = cur->binder_mode();
        std::string type = pp(cur->binder_type(), s).text;
        std::vector<std::string> names;
        // group consecutive binders sharing mode and rendered type
        while (true) {
            std::string n = fresh_name(cur->name(), cur->body(), s);
            names.push_back(n);
            s.bound.push_back(n);
            ++pushed;
            cur = cur->body();
            if (cur->kind() != t->kind() || cur->binder_mode() != mode) break;
            if (is_pi && mode == BinderMode::Explicit && !has_loose_bvar(cur->body(), 0)) break;
            if (pp(cur->binder_type(), s).text != type) break;
        }
        std::string joined;
        for (std::size_t k = 0; k < names.size(); ++k) joined += (k ? " " : "") + names[k];
        if (!is_pi && mode == BinderMode::Explicit) {
            out += " " + joined;
        } else if (mode == BinderMode::Explicit) {
            out += " (" + joined + " : " + type + ")";
        } else if (mode == BinderMode::Implicit) {
            out += " {" + joined + " : " + type + "}";
        } else {
            out += " [" + type + "]";
        }
    }
    out += is_pi ? ", " : " => ";
    out += pp(cur, s).text;
    for (std::size_t k = 0; k < pushed; ++k) s.bound.pop_back();
    return {out, 0};
}

std::string Printer::goal(const LocalContext& lctx, const Term& target) const {
    Scope s = scope_for(lctx);
    std::vector<std::pair<std::string, std::string>> lines;  // (names, type)
    std::string prev_type;
    bool prev_groupable = false;
    for (const auto& d : lctx.decls()) {
        if (d.is_instance()) {
            prev_groupable = false;
            continue;
        }
        std::string type = pp(mctx_ ? mctx_->instantiate(d.type) : d.type, s).text;
        const std::string& name = s.fvar_names[d.fvar];
        if (prev_groupable && type == prev_type && !d.value) {
            lines.back().first += " " + name;
        } else {
            lines.emplace_back(name, type);
        }
        prev_type = type;
        prev_groupable = !d.value;
    }
    std::string out;
    for (const auto& [names, type] : lines) out += names + " : " + type + "\n";
    out += "⊢ " + pp(mctx_ ? mctx_->instantiate(target) : target, s).text;
    return out;
}

std::string Printer::goal(std::uint64_t mvar) const {
    const MVarDecl& d = mctx_->get(mvar);
    return goal(d.lctx, d.type);
}

std::string Printer::goals(const std::vector<std::uint64_t>& gs) const {
    if (gs.empty()) return "no goals";
    if (gs.size() == 1) return goal(gs[0]);
    std::string out;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (i) out += "\n\n";
        out += fmt::format("goal {} of {}\n", i + 1, gs.size()) + goal(gs[i]);
    }
    return out;
}

}  // namespace microproof::elab
