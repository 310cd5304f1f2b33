#include "microproof/syntax/printer.h"

#include "microproof/syntax/parser.h"

namespace microproof::syntax {

namespace {

struct Piece {
    std::string text;
    int prec;
};

std::string paren_if(const Piece& p, int needed) { return p.prec < needed ? "(" + p.text + ")" : p.text; }

Piece fmt(const TermPtr& t);

std::string fmt_binders(const std::vector<Binder>& binders) {
    std::string out;
    for (std::size_t i = 0; i < binders.size(); ++i) {
        const Binder& b = binders[i];
        if (i) out += ' ';
        std::string names;
        for (std::size_t k = 0; k < b.names.size(); ++k) names += (k ? " " : "") + b.names[k].name;
        std::string type = b.type ? fmt(b.type).text : "";
        switch (b.mode) {
            case BinderMode::Explicit:
                out += b.type ? "(" + names + " : " + type + ")" : names;
                break;
            case BinderMode::Implicit:
                out += "{" + names + (b.type ? " : " + type : "") + "}";
                break;
            case BinderMode::InstImplicit:
                out += "[" + (names.empty() ? "" : names + " : ") + type + "]";
                break;
        }
    }
    return out;
}

std::string fmt_rules(const std::vector<RewriteRule>& rules) {
    std::string out = "[";
    for (std::size_t i = 0; i < rules.size(); ++i)
        out += (i ? ", " : "") + std::string(rules[i].reverse ? "← " : "") + fmt(rules[i].term).text;
    return out + "]";
}

std::string fmt_block(const TacticBlock& block) {
    std::string out;
    for (std::size_t i = 0; i < block.tactics.size(); ++i) out += (i ? "; " : "") + format_tactic(block.tactics[i]);
    return out;
}

Piece fmt(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Ident: return {(t->explicit_ ? "@" : "") + t->text, prec::kMax + 1};
        case TermKind::Hole: return {"_", prec::kMax + 1};
        case TermKind::Sort:
        case TermKind::Numeral: return {t->text, prec::kMax + 1};
        case TermKind::Paren: return fmt(t->args[0]);
        case TermKind::Typed: return {"(" + fmt(t->args[0]).text + " : " + fmt(t->args[1]).text + ")", prec::kMax + 1};
        case TermKind::App: {
            std::string out = paren_if(fmt(t->args[0]), prec::kMax);
            for (std::size_t i = 1; i < t->args.size(); ++i) out += " " + paren_if(fmt(t->args[i]), prec::kMax + 1);
            return {out, prec::kMax};
        }
        case TermKind::Binary: {
            auto info = *infix_info(t->text);
            int lp = info.right_assoc ? info.prec + 1 : info.prec;
            int rp = info.right_assoc ? info.prec : info.prec + 1;
            return {paren_if(fmt(t->args[0]), lp) + " " + t->text + " " + paren_if(fmt(t->args[1]), rp), info.prec};
        }
        case TermKind::Unary: {
            int p = t->text == "¬" ? prec::kNot : prec::kNeg;
            std::string operand = paren_if(fmt(t->args[0]), p);
            // `--` would start a comment
            std::string sep = operand.rfind('-', 0) == 0 ? " " : "";
            return {t->text + sep + operand, p};
        }
        case TermKind::LinearMap:
            return {paren_if(fmt(t->args[1]), prec::kArrow + 1) + " →ₗ[" + fmt(t->args[0]).text + "] " +
                        paren_if(fmt(t->args[2]), prec::kArrow),
                    prec::kArrow};
        case TermKind::Fun: return {"fun " + fmt_binders(t->binders) + " => " + fmt(t->args[0]).text, 0};
        case TermKind::Forall: return {"∀ " + fmt_binders(t->binders) + ", " + fmt(t->args[0]).text, 0};
        case TermKind::Anonymous: {
            std::string out = "⟨";
            for (std::size_t i = 0; i < t->args.size(); ++i) out += (i ? ", " : "") + fmt(t->args[i]).text;
            return {out + "⟩", prec::kMax + 1};
        }
        case TermKind::By: return {"by " + fmt_block(*t->tactics), 0};
        case TermKind::Calc: {
            std::string out = "calc";
            for (const auto& s : t->calc->steps) {
                out += "\n    " + fmt(s.relation).text;
                if (s.proof) out += " := " + fmt(s.proof).text;
            }
            return {out, 0};
        }
    }
    return {"?", 0};
}

const TermSyntax& strip(const TermPtr& t) {
    const TermSyntax* p = t.get();
    while (p->kind == TermKind::Paren) p = p->args[0].get();
    return *p;
}

// Application spine with nested heads flattened: `(f x) y` and `f x y` agree.
std::vector<const TermSyntax*> spine(const TermSyntax& t) {
    std::vector<const TermSyntax*> out;
    if (t.kind != TermKind::App) return {&t};
    out = spine(strip(t.args[0]));
    for (std::size_t i = 1; i < t.args.size(); ++i) out.push_back(t.args[i].get());
    return out;
}

bool binders_equal(const std::vector<Binder>& a, const std::vector<Binder>& b) {
    // compare the flattened name/type/mode sequence so `a b : K` equals `(a b : K)`
    struct Flat {
        std::string name;
        TermPtr type;
        BinderMode mode;
    };
    auto flatten = [](const std::vector<Binder>& bs) {
        std::vector<Flat> out;
        for (const auto& b : bs) {
            if (b.names.empty()) out.push_back({"", b.type, b.mode});
            for (const auto& n : b.names) out.push_back({n.name, b.type, b.mode});
        }
        return out;
    };
    auto fa = flatten(a), fb = flatten(b);
    if (fa.size() != fb.size()) return false;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (fa[i].name != fb[i].name || fa[i].mode != fb[i].mode) return false;
        if (bool(fa[i].type) != bool(fb[i].type)) return false;
        if (fa[i].type && !syntax_equal(fa[i].type, fb[i].type)) return false;
    }
    return true;
}

}  // namespace

std::string format_syntax(const TermPtr& t) { return fmt(t).text; }

std::string format_tactic(const TacticSyntax& t) {
    switch (t.kind) {
        case TacticKind::Intro: {
            std::string out = "intro";
            for (const auto& n : t.names) out += " " + n.name;
            return out;
        }
        case TacticKind::Exact: return "exact " + format_syntax(t.term);
        case TacticKind::Apply: return "apply " + format_syntax(t.term);
        case TacticKind::Have: {
            std::string out = "have";
            if (t.have_name) out += " " + t.have_name->name;
            if (t.have_type) out += " : " + format_syntax(t.have_type);
            return out + " := " + format_syntax(t.term);
        }
        case TacticKind::Calc: return format_syntax(t.term);
        case TacticKind::Rw: return "rw " + fmt_rules(t.rules);
        case TacticKind::Simp:
        case TacticKind::SimpAll:
            return std::string(to_string(t.kind)) + (t.rules.empty() ? "" : " " + fmt_rules(t.rules));
        case TacticKind::Bullet: return "· " + fmt_block(*t.block);
        default: return std::string(to_string(t.kind));
    }
}

bool syntax_equal(const TermPtr& pa, const TermPtr& pb) {
    const TermSyntax& a = strip(pa);
    const TermSyntax& b = strip(pb);
    if (a.kind == TermKind::App || b.kind == TermKind::App) {
        auto sa = spine(a), sb = spine(b);
        if (sa.size() == 1 || sb.size() != sa.size()) return false;
        for (std::size_t i = 0; i < sa.size(); ++i) {
            TermPtr x(std::shared_ptr<const TermSyntax>(), sa[i]);
            TermPtr y(std::shared_ptr<const TermSyntax>(), sb[i]);
            if (!syntax_equal(x, y)) return false;
        }
        return true;
    }
    if (a.kind != b.kind || a.text != b.text || a.explicit_ != b.explicit_) return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!syntax_equal(a.args[i], b.args[i])) return false;
    if (!binders_equal(a.binders, b.binders)) return false;
    if (a.kind == TermKind::By) return fmt(pa).text == fmt(pb).text;
    if (a.kind == TermKind::Calc) {
        if (a.calc->steps.size() != b.calc->steps.size()) return false;
        for (std::size_t i = 0; i < a.calc->steps.size(); ++i) {
            const auto& x = a.calc->steps[i];
            const auto& y = b.calc->steps[i];
            if (!syntax_equal(x.relation, y.relation) || bool(x.proof) != bool(y.proof)) return false;
            if (x.proof && !syntax_equal(x.proof, y.proof)) return false;
        }
    }
    return true;
}

}  // namespace microproof::syntax
