#include "microproof/kernel/builtins.h"

#include "microproof/kernel/local_context.h"
#include "microproof/kernel/type_checker.h"

namespace microproof::kernel {

namespace {

class Telescope {
public:
    Term var(std::string name, Term type, BinderMode mode = BinderMode::Explicit) {
        Term x = lctx_.push(std::move(name), std::move(type), mode);
        xs_.push_back(x);
        return x;
    }
    Term implicit(std::string name, Term type) { return var(std::move(name), std::move(type), BinderMode::Implicit); }
    Term pi(const Term& body) const { return lctx_.mk_pi(xs_, body); }
    Term lam(const Term& body) const { return lctx_.mk_lambda(xs_, body); }

private:
    LocalContext lctx_;
    std::vector<Term> xs_;
};

Term eq(const Term& ty, const Term& a, const Term& b) { return mk_app("Eq", {ty, a, b}); }

Declaration axiom(std::string name, Term type) {
    Declaration d;
    d.name = std::move(name);
    d.kind = DeclKind::Axiom;
    d.type = std::move(type);
    d.module = "Init";
    return d;
}

void add(Environment& env, Declaration d) { env = check_decl(env, d); }

// Two-proposition connective with its type `Prop → Prop → Prop`.
Term binary_connective() {
    Telescope t;
    t.var("a", mk_prop());
    t.var("b", mk_prop());
    return t.pi(mk_prop());
}

}  // namespace

Environment builtin_environment() {
    Environment env;
    const Term prop = mk_prop();
    const Term type = mk_type();

    {
        Telescope t;
        Term alpha = t.implicit("α", type);
        t.var("a", alpha);
        t.var("b", alpha);
        add(env, axiom("Eq", t.pi(prop)));
    }
    {
        Telescope t;
        Term alpha = t.implicit("α", type);
        Term a = t.var("a", alpha);
        add(env, axiom("Eq.refl", t.pi(eq(alpha, a, a))));
    }
    {
        Telescope t;
        Term alpha = t.implicit("α", type);
        Term a = t.implicit("a", alpha);
        Term motive = t.var("motive", mk_arrow(alpha, prop));
        t.var("m", mk_app(motive, a));
        Term b = t.implicit("b", alpha);
        t.var("h", eq(alpha, a, b));
        add(env, axiom("Eq.rec", t.pi(mk_app(motive, b))));
    }

    add(env, axiom("True", prop));
    add(env, axiom("True.intro", mk_const("True")));
    add(env, axiom("False", prop));
    {
        Telescope t;
        Term c = t.implicit("C", prop);
        t.var("h", mk_const("False"));
        add(env, axiom("False.elim", t.pi(c)));
    }

    add(env, axiom("And", binary_connective()));
    {
        Telescope t;
        Term a = t.implicit("a", prop);
        Term b = t.implicit("b", prop);
        t.var("left", a);
        t.var("right", b);
        add(env, axiom("And.intro", t.pi(mk_app("And", {a, b}))));
    }
    for (const char* proj : {"And.left", "And.right"}) {
        Telescope t;
        Term a = t.implicit("a", prop);
        Term b = t.implicit("b", prop);
        t.var("self", mk_app("And", {a, b}));
        add(env, axiom(proj, t.pi(std::string(proj) == "And.left" ? a : b)));
    }

    add(env, axiom("Or", binary_connective()));
    for (const char* inj : {"Or.inl", "Or.inr"}) {
        Telescope t;
        Term a = t.implicit("a", prop);
        Term b = t.implicit("b", prop);
        t.var("h", std::string(inj) == "Or.inl" ? a : b);
        add(env, axiom(inj, t.pi(mk_app("Or", {a, b}))));
    }
    {
        Telescope t;
        Term a = t.implicit("a", prop);
        Term b = t.implicit("b", prop);
        Term c = t.implicit("c", prop);
        t.var("h", mk_app("Or", {a, b}));
        t.var("left", mk_arrow(a, c));
        t.var("right", mk_arrow(b, c));
        add(env, axiom("Or.elim", t.pi(c)));
    }

    add(env, axiom("Iff", binary_connective()));
    {
        Telescope t;
        Term a = t.implicit("a", prop);
        Term b = t.implicit("b", prop);
        t.var("mp", mk_arrow(a, b));
        t.var("mpr", mk_arrow(b, a));
        add(env, axiom("Iff.intro", t.pi(mk_app("Iff", {a, b}))));
    }
    for (const char* dir : {"Iff.mp", "Iff.mpr"}) {
        Telescope t;
        Term a = t.implicit("a", prop);
        Term b = t.implicit("b", prop);
        t.var("self", mk_app("Iff", {a, b}));
        bool fwd = std::string(dir) == "Iff.mp";
        add(env, axiom(dir, t.pi(fwd ? mk_arrow(a, b) : mk_arrow(b, a))));
    }

    {
        Telescope t;
        Term a = t.var("a", prop);
        Declaration d;
        d.name = "Not";
        d.kind = DeclKind::Definition;
        d.type = mk_arrow(prop, prop);
        d.value = t.lam(mk_arrow(a, mk_const("False")));
        d.module = "Init";
        add(env, d);
    }
    {
        Telescope t;
        Term alpha = t.var("α", type);
        add(env, axiom("sorryAx", t.pi(alpha)));
    }
    return env;
}

}  // namespace microproof::kernel
