#include "microproof/syntax/parser.h"

#include <fmt/format.h>

namespace microproof::syntax {

std::string_view to_string(TacticKind k) {
    switch (k) {
        case TacticKind::Intro: return "intro";
        case TacticKind::Exact: return "exact";
        case TacticKind::Apply: return "apply";
        case TacticKind::Constructor: return "constructor";
        case TacticKind::Swap: return "swap";
        case TacticKind::Have: return "have";
        case TacticKind::Calc: return "calc";
        case TacticKind::Sorry: return "sorry";
        case TacticKind::Bullet: return "·";
        case TacticKind::Rw: return "rw";
        case TacticKind::Simp: return "simp";
        case TacticKind::SimpAll: return "simp_all";
        case TacticKind::Module: return "module";
        case TacticKind::ExactSearch: return "exact?";
        case TacticKind::Rfl: return "rfl";
        case TacticKind::Assumption: return "assumption";
    }
    return "?";
}

std::string_view to_string(CommandKind k) {
    switch (k) {
        case CommandKind::Import: return "import";
        case CommandKind::Variable: return "variable";
        case CommandKind::Example: return "example";
        case CommandKind::Theorem: return "theorem";
        case CommandKind::Definition: return "def";
        case CommandKind::Axiom: return "axiom";
        case CommandKind::Opaque: return "opaque";
        case CommandKind::Class: return "class";
        case CommandKind::Instance: return "instance";
        case CommandKind::Attribute: return "attribute";
    }
    return "?";
}

std::optional<InfixInfo> infix_info(std::string_view op) {
    if (op == "→" || op == "→ₗ[") return InfixInfo{prec::kArrow, true};
    if (op == "↔") return InfixInfo{prec::kIff, false};
    if (op == "∨") return InfixInfo{prec::kOr, true};
    if (op == "∧") return InfixInfo{prec::kAnd, true};
    if (op == "=" || op == "≠" || op == "∈") return InfixInfo{prec::kEq, false};
    if (op == "+" || op == "-") return InfixInfo{prec::kAdd, false};
    if (op == "*") return InfixInfo{prec::kMul, false};
    if (op == "•") return InfixInfo{prec::kSmul, true};
    return std::nullopt;
}

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ParseResult file() {
        ParseResult out;
        while (cur().kind != TokenKind::Eof) {
            try {
                out.commands.push_back(command());
            } catch (const SyntaxError& e) {
                out.errors.push_back({e.what(), e.span(), e.expected()});
                resync();
            }
        }
        return out;
    }

    TermPtr whole_term() {
        TermPtr t = term(0);
        if (cur().kind != TokenKind::Eof) fail("unexpected token after term", {"end of input"});
        return t;
    }

private:
    const Token& cur() const { return toks_[std::min(i_, toks_.size() - 1)]; }
    const Token& peek(std::size_t k) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }

    Token take() {
        Token t = cur();
        if (i_ < toks_.size() - 1) ++i_;
        last_end_ = t.span.end;
        return t;
    }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const {
        const Token& t = cur();
        std::string found = t.kind == TokenKind::Eof ? "end of input" : "'" + t.text + "'";
        std::string full = msg;
        if (!expected.empty()) {
            full += "; expected ";
            for (std::size_t k = 0; k < expected.size(); ++k) full += (k ? ", " : "") + expected[k];
        }
        full += ", found " + found;
        throw SyntaxError(full, t.span, std::move(expected));
    }

    Token expect_symbol(std::string_view s) {
        if (!cur().is_symbol(s)) fail("unexpected token", {"'" + std::string(s) + "'"});
        return take();
    }

    Token expect_ident() {
        if (cur().kind != TokenKind::Identifier) fail("unexpected token", {"identifier"});
        return take();
    }

    bool starts_command() const {
        const Token& t = cur();
        return t.kind == TokenKind::Eof || (t.kind == TokenKind::Keyword && is_command_keyword(t.text)) ||
               t.is_symbol("@[");
    }

    /// Layout: a token that begins a line at or left of the enclosing block's
    /// column closes the construct being parsed.
    bool at_stop() const {
        const Token& t = cur();
        if (starts_command()) return true;
        return t.first_on_line && static_cast<int>(t.span.begin.col) <= stop_col_;
    }

    // `_` opening a line inside `calc` starts the next step, not an argument.
    bool at_calc_step() const { return calc_depth_ > 0 && cur().first_on_line && cur().is_symbol("_"); }

    void resync() {
        calc_depth_ = 0;
        if (i_ < toks_.size() - 1) take();
        while (!(cur().kind == TokenKind::Eof || (cur().first_on_line && starts_command()))) take();
    }

    Span from(const Position& begin) const { return {begin, last_end_}; }

    static std::shared_ptr<TermSyntax> node(TermKind k, Span span, std::string text = {}) {
        auto n = std::make_shared<TermSyntax>();
        n->kind = k;
        n->span = span;
        n->text = std::move(text);
        return n;
    }

    // ----- terms -----

    TermPtr term(int min_prec) {
        Position begin = cur().span.begin;
        TermPtr lhs = prefix();
        while (!at_stop()) {
            const Token& t = cur();
            if (t.kind != TokenKind::Symbol) break;
            auto info = infix_info(t.text);
            if (!info || info->prec < min_prec) break;
            std::string op = take().text;
            if (op == "→ₗ[") {
                TermPtr ring = term(0);
                expect_symbol("]");
                TermPtr rhs = term(prec::kArrow);
                auto n = node(TermKind::LinearMap, from(begin));
                n->args = {ring, lhs, rhs};
                lhs = n;
                continue;
            }
            TermPtr rhs = term(info->right_assoc ? info->prec : info->prec + 1);
            auto n = node(TermKind::Binary, from(begin), op);
            n->args = {lhs, rhs};
            lhs = n;
        }
        return lhs;
    }

    TermPtr prefix() {
        Position begin = cur().span.begin;
        const Token& t = cur();
        if (t.is_symbol("¬") || t.is_symbol("-")) {
            std::string op = take().text;
            TermPtr operand = term(op == "¬" ? prec::kNot : prec::kNeg);
            auto n = node(TermKind::Unary, from(begin), op);
            n->args = {operand};
            return n;
        }
        if (t.is_symbol("∀") || t.is_keyword("fun")) {
            bool forall = t.is_symbol("∀");
            take();
            auto binders = binder_list(forall);
            if (forall)
                expect_symbol(",");
            else
                expect_symbol("=>");
            TermPtr body = term(0);
            auto n = node(forall ? TermKind::Forall : TermKind::Fun, from(begin));
            n->binders = std::move(binders);
            n->args = {body};
            return n;
        }
        if (t.is_keyword("by")) {
            take();
            auto block = tactic_block();
            auto n = node(TermKind::By, from(begin));
            n->tactics = block;
            return n;
        }
        if (t.is_keyword("calc")) return calc();
        return application();
    }

    bool can_start_argument() const {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Numeral: return true;
            case TokenKind::Keyword: return t.text == "Type" || t.text == "Prop";
            case TokenKind::Symbol: return t.text == "(" || t.text == "_" || t.text == "@" || t.text == "⟨";
            default: return false;
        }
    }

    TermPtr application() {
        Position begin = cur().span.begin;
        TermPtr head = atom();
        std::vector<TermPtr> args;
        while (!at_stop() && !at_calc_step() && can_start_argument()) args.push_back(atom());
        if (args.empty()) return head;
        auto n = node(TermKind::App, from(begin));
        n->args.push_back(head);
        for (auto& a : args) n->args.push_back(a);
        return n;
    }

    TermPtr atom() {
        Position begin = cur().span.begin;
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Identifier: {
                Token id = take();
                return node(TermKind::Ident, id.span, id.text);
            }
            case TokenKind::Numeral: {
                Token n = take();
                return node(TermKind::Numeral, n.span, n.text);
            }
            case TokenKind::Keyword:
                if (t.text == "Type" || t.text == "Prop") {
                    Token s = take();
                    return node(TermKind::Sort, s.span, s.text);
                }
                break;
            case TokenKind::Symbol:
                if (t.text == "_") {
                    Token h = take();
                    return node(TermKind::Hole, h.span);
                }
                if (t.text == "@") {
                    take();
                    Token id = expect_ident();
                    auto n = node(TermKind::Ident, from(begin), id.text);
                    n->explicit_ = true;
                    return n;
                }
                if (t.text == "(") {
                    take();
                    int saved = stop_col_;
                    stop_col_ = -1;  // brackets suspend layout
                    TermPtr inner = term(0);
                    TermPtr ascribed;
                    if (cur().is_symbol(":")) {
                        take();
                        ascribed = term(0);
                    }
                    stop_col_ = saved;
                    expect_symbol(")");
                    auto n = node(ascribed ? TermKind::Typed : TermKind::Paren, from(begin));
                    n->args = {inner};
                    if (ascribed) n->args.push_back(ascribed);
                    return n;
                }
                if (t.text == "⟨") {
                    take();
                    int saved = stop_col_;
                    stop_col_ = -1;
                    auto n = node(TermKind::Anonymous, {});
                    if (!cur().is_symbol("⟩")) {
                        n->args.push_back(term(0));
                        while (cur().is_symbol(",")) {
                            take();
                            n->args.push_back(term(0));
                        }
                    }
                    stop_col_ = saved;
                    expect_symbol("⟩");
                    n->span = from(begin);
                    return n;
                }
                break;
            default: break;
        }
        fail("expected term", {"term"});
    }

    // Binders after `∀`/`fun`: bare names optionally followed by `: T`, or bracketed groups.
    std::vector<Binder> binder_list(bool forall) {
        std::vector<Binder> out;
        Binder bare;
        bare.span.begin = cur().span.begin;
        while (true) {
            const Token& t = cur();
            if (t.kind == TokenKind::Identifier || t.is_symbol("_")) {
                Token n = take();
                bare.names.push_back({n.kind == TokenKind::Identifier ? n.text : "_", n.span});
                continue;
            }
            if (t.is_symbol("(") || t.is_symbol("{") || t.is_symbol("[")) {
                if (!bare.names.empty()) fail("unexpected binder group after names");
                out.push_back(bracket_binder(/*allow_untyped=*/true));
                continue;
            }
            break;
        }
        if (!bare.names.empty()) {
            if (cur().is_symbol(":")) {
                take();
                bare.type = term(0);
            }
            bare.span.end = last_end_;
            out.push_back(std::move(bare));
        }
        if (out.empty()) fail(forall ? "expected binder after '∀'" : "expected binder after 'fun'", {"identifier"});
        return out;
    }

    Binder bracket_binder(bool allow_untyped) {
        Binder b;
        b.span.begin = cur().span.begin;
        Token open = take();
        std::string close = open.text == "(" ? ")" : open.text == "{" ? "}" : "]";
        b.mode = open.text == "(" ? BinderMode::Explicit
                 : open.text == "{" ? BinderMode::Implicit
                                    : BinderMode::InstImplicit;
        int saved = stop_col_;
        stop_col_ = -1;
        if (b.mode == BinderMode::InstImplicit) {
            if (cur().kind == TokenKind::Identifier && peek(1).is_symbol(":")) {
                Token n = take();
                b.names.push_back({n.text, n.span});
                take();
            }
            b.type = term(0);
        } else {
            while (cur().kind == TokenKind::Identifier || cur().is_symbol("_")) {
                Token n = take();
                b.names.push_back({n.kind == TokenKind::Identifier ? n.text : "_", n.span});
            }
            if (b.names.empty()) fail("expected binder name", {"identifier"});
            if (cur().is_symbol(":")) {
                take();
                b.type = term(0);
            } else if (!allow_untyped && b.mode == BinderMode::Explicit) {
                fail("expected ':' in binder", {"':'"});
            }
        }
        stop_col_ = saved;
        expect_symbol(close);
        b.span.end = last_end_;
        return b;
    }

    TermPtr calc() {
        Position begin = take().span.begin;
        auto c = std::make_shared<CalcSyntax>();
        ++calc_depth_;
        bool first = true;
        while (first || (cur().is_symbol("_") && !at_stop())) {
            CalcStep step;
            step.span.begin = cur().span.begin;
            step.relation = term(0);
            if (first && !cur().is_symbol(":=") && cur().is_symbol("_")) {
                // `calc a` followed by `_ = b := ...` steps
                step.span.end = last_end_;
                c->steps.push_back(std::move(step));
                first = false;
                continue;
            }
            expect_symbol(":=");
            step.proof = term(0);
            step.span.end = last_end_;
            c->steps.push_back(std::move(step));
            first = false;
        }
        --calc_depth_;
        auto n = node(TermKind::Calc, from(begin));
        n->calc = c;
        return n;
    }

    // ----- tactics -----

    std::shared_ptr<const TacticBlock> tactic_block() {
        if (starts_command() || cur().is_symbol(";")) fail("expected tactic", {"tactic"});
        auto block = std::make_shared<TacticBlock>();
        block->span.begin = cur().span.begin;
        int col = static_cast<int>(cur().span.begin.col);
        int saved = stop_col_;
        stop_col_ = col;
        while (true) {
            block->tactics.push_back(tactic());
            if (cur().is_symbol(";")) {
                take();
                continue;
            }
            if (!starts_command() && cur().first_on_line && static_cast<int>(cur().span.begin.col) == col) continue;
            break;
        }
        stop_col_ = saved;
        block->span.end = last_end_;
        return block;
    }

    std::vector<RewriteRule> rule_list(bool optional) {
        std::vector<RewriteRule> rules;
        if (!cur().is_symbol("[")) {
            if (optional) return rules;
            fail("expected rewrite rules", {"'['"});
        }
        take();
        int saved = stop_col_;
        stop_col_ = -1;
        if (!cur().is_symbol("]")) {
            while (true) {
                RewriteRule r;
                r.span.begin = cur().span.begin;
                if (cur().is_symbol("←")) {
                    take();
                    r.reverse = true;
                }
                r.term = term(0);
                r.span.end = last_end_;
                rules.push_back(std::move(r));
                if (!cur().is_symbol(",")) break;
                take();
            }
        }
        stop_col_ = saved;
        expect_symbol("]");
        return rules;
    }

    TacticSyntax tactic() {
        TacticSyntax tac;
        Position begin = cur().span.begin;
        const Token& t = cur();
        std::string word = t.text;
        bool is_word = t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword || t.is_symbol("·");
        if (!is_word) fail("expected tactic", {"tactic"});
        take();
        if (word == "intro") {
            tac.kind = TacticKind::Intro;
            while (!at_stop() && (cur().kind == TokenKind::Identifier || cur().is_symbol("_"))) {
                Token n = take();
                tac.names.push_back({n.kind == TokenKind::Identifier ? n.text : "_", n.span});
            }
        } else if (word == "exact" || word == "apply") {
            tac.kind = word == "exact" ? TacticKind::Exact : TacticKind::Apply;
            tac.term = term(0);
        } else if (word == "constructor") {
            tac.kind = TacticKind::Constructor;
        } else if (word == "swap") {
            tac.kind = TacticKind::Swap;
        } else if (word == "sorry") {
            tac.kind = TacticKind::Sorry;
        } else if (word == "rfl") {
            tac.kind = TacticKind::Rfl;
        } else if (word == "assumption") {
            tac.kind = TacticKind::Assumption;
        } else if (word == "module") {
            tac.kind = TacticKind::Module;
        } else if (word == "exact?") {
            tac.kind = TacticKind::ExactSearch;
        } else if (word == "have") {
            tac.kind = TacticKind::Have;
            if (cur().kind == TokenKind::Identifier) {
                Token n = take();
                tac.have_name = BinderName{n.text, n.span};
            }
            if (cur().is_symbol(":")) {
                take();
                tac.have_type = term(0);
            }
            expect_symbol(":=");
            tac.term = term(0);
        } else if (word == "calc") {
            --i_;  // let the term parser consume `calc`
            tac.kind = TacticKind::Calc;
            tac.term = calc();
        } else if (word == "rw") {
            tac.kind = TacticKind::Rw;
            tac.rules = rule_list(false);
        } else if (word == "simp" || word == "simp_all") {
            tac.kind = word == "simp" ? TacticKind::Simp : TacticKind::SimpAll;
            tac.rules = rule_list(true);
        } else if (word == "·") {
            tac.kind = TacticKind::Bullet;
            tac.block = tactic_block();
        } else {
            --i_;
            fail("unknown tactic", {"tactic"});
        }
        tac.span = from(begin);
        return tac;
    }

    // ----- commands -----

    std::vector<Binder> decl_binders() {
        std::vector<Binder> out;
        while (cur().is_symbol("(") || cur().is_symbol("{") || cur().is_symbol("[")) out.push_back(bracket_binder(true));
        return out;
    }

    std::vector<std::string> attribute_list() {
        std::vector<std::string> attrs;
        while (true) {
            const Token& t = cur();
            if (t.kind != TokenKind::Identifier && t.kind != TokenKind::Keyword) fail("expected attribute", {"attribute"});
            attrs.push_back(take().text);
            if (!cur().is_symbol(",")) break;
            take();
        }
        expect_symbol("]");
        return attrs;
    }

    CommandSyntax command() {
        CommandSyntax cmd;
        Position begin = cur().span.begin;
        if (cur().is_symbol("@[")) {
            take();
            cmd.attributes = attribute_list();
        }
        const Token& t = cur();
        if (t.kind != TokenKind::Keyword || !is_command_keyword(t.text)) fail("expected command", {"command"});
        std::string kw = take().text;
        if (!cmd.attributes.empty() && (kw == "import" || kw == "variable" || kw == "attribute"))
            fail("attributes are not allowed here");

        if (kw == "import") {
            cmd.kind = CommandKind::Import;
            cmd.module = expect_ident().text;
        } else if (kw == "variable") {
            cmd.kind = CommandKind::Variable;
            cmd.binders = decl_binders();
            if (cmd.binders.empty()) fail("expected binder", {"'('", "'{'", "'['"});
        } else if (kw == "attribute") {
            cmd.kind = CommandKind::Attribute;
            expect_symbol("[");
            cmd.attributes = attribute_list();
            Token n = expect_ident();
            cmd.name = {n.text, n.span};
        } else {
            if (kw == "example") {
                cmd.kind = CommandKind::Example;
            } else {
                cmd.kind = kw == "theorem" || kw == "lemma" ? CommandKind::Theorem
                           : kw == "def"                     ? CommandKind::Definition
                           : kw == "axiom"                   ? CommandKind::Axiom
                           : kw == "opaque"                  ? CommandKind::Opaque
                           : kw == "class"                   ? CommandKind::Class
                                                             : CommandKind::Instance;
                Token n = expect_ident();
                cmd.name = {n.text, n.span};
            }
            cmd.binders = decl_binders();
            bool type_optional = cmd.kind == CommandKind::Definition || cmd.kind == CommandKind::Class;
            if (cur().is_symbol(":")) {
                take();
                cmd.type = term(0);
            } else if (!type_optional) {
                fail("unexpected token", {"':'"});
            }
            bool needs_value = cmd.kind == CommandKind::Example || cmd.kind == CommandKind::Theorem ||
                               cmd.kind == CommandKind::Definition;
            if (needs_value) {
                expect_symbol(":=");
                cmd.value = term(0);
            }
        }
        cmd.span = from(begin);
        if (!starts_command()) fail("unexpected token at end of command", {"command"});
        return cmd;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    int stop_col_ = -1;
    int calc_depth_ = 0;
    Position last_end_;
};

}  // namespace

ParseResult parse_file(std::string_view source) {
    auto toks = tokenize_lenient(source);
    ParseResult bad;
    for (const auto& t : toks)
        if (t.kind == TokenKind::Invalid)
            bad.errors.push_back({fmt::format("invalid character '{}'", t.text), t.span, {}});
    if (!bad.errors.empty()) {
        // drop invalid tokens and parse the rest so later commands still get checked
        std::vector<Token> kept;
        for (auto& t : toks)
            if (t.kind != TokenKind::Invalid) kept.push_back(std::move(t));
        ParseResult r = Parser(std::move(kept)).file();
        r.errors.insert(r.errors.begin(), bad.errors.begin(), bad.errors.end());
        return r;
    }
    return Parser(std::move(toks)).file();
}

TermPtr parse_term(std::string_view source) { return Parser(tokenize(source)).whole_term(); }

}  // namespace microproof::syntax
