#include "doctest.h"

#include "microproof/kernel/builtins.h"
#include "microproof/kernel/type_checker.h"

using namespace microproof::kernel;

namespace {

Declaration make_axiom(const std::string& name, Term type) {
    Declaration d;
    d.name = name;
    d.kind = DeclKind::Axiom;
    d.type = std::move(type);
    return d;
}

Declaration make_def(const std::string& name, Term type, Term value,
                     Reducibility r = Reducibility::Default) {
    Declaration d;
    d.name = name;
    d.kind = DeclKind::Definition;
    d.type = std::move(type);
    d.value = std::move(value);
    d.reducibility = r;
    return d;
}

KernelErrorKind error_kind(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const KernelError& e) {
        return e.kind();
    }
    FAIL("expected a kernel error");
    return KernelErrorKind::MalformedDeclaration;
}

// An environment with a carrier type `A`, a point `c : A` and identity-ish defs.
Environment sample_env() {
    Environment env = builtin_environment();
    env = check_decl(env, make_axiom("A", mk_type()));
    env = check_decl(env, make_axiom("c", mk_const("A")));
    env = check_decl(env, make_axiom("d", mk_const("A")));
    env = check_decl(env, make_def("idA", mk_arrow(mk_const("A"), mk_const("A")),
                                   mk_lam("z", mk_const("A"), mk_bvar(0))));
    env = check_decl(env, make_def("hidden", mk_const("A"), mk_const("c"), Reducibility::Opaque));
    env = check_decl(env, make_def("alias", mk_const("A"), mk_const("c"), Reducibility::Reducible));
    return env;
}

}  // namespace

TEST_CASE("sorts: Prop : Type and Type : Type") {
    Environment env = builtin_environment();
    TypeChecker tc(env);
    CHECK(alpha_eq(tc.infer(mk_prop()), mk_type()));
    CHECK(alpha_eq(tc.infer(mk_type()), mk_type()));
}

TEST_CASE("builtin logic is well-formed") {
    Environment env = builtin_environment();
    for (const char* n : {"Eq", "Eq.refl", "Eq.rec", "True", "True.intro", "False", "False.elim", "And",
                          "And.intro", "And.left", "And.right", "Or", "Or.inl", "Or.inr", "Or.elim", "Iff",
                          "Iff.intro", "Iff.mp", "Iff.mpr", "Not", "sorryAx"})
        CHECK_MESSAGE(env.contains(n), n);
    TypeChecker tc(env);
    for (const auto& d : env.decls()) CHECK_NOTHROW(tc.ensure_sort(d->type));
}

TEST_CASE("beta reduction in whnf") {
    Environment env = sample_env();
    TypeChecker tc(env);
    Term c = mk_const("c");
    Term id = mk_lam("z", mk_const("A"), mk_bvar(0));
    Term idw = mk_lam("w", mk_const("A"), mk_bvar(0));
    CHECK(alpha_eq(tc.whnf(mk_app(id, c)), c));
    // the outer redex exposes another redex at the head
    CHECK(alpha_eq(tc.whnf(mk_app(id, mk_app(idw, c))), c));
    CHECK(tc.is_def_eq(mk_app(id, c), c));
}

TEST_CASE("whnf is idempotent") {
    Environment env = sample_env();
    TypeChecker tc(env);
    Term t = mk_app(mk_const("idA"), mk_app(mk_const("idA"), mk_const("c")));
    Term once = tc.whnf(t);
    CHECK(alpha_eq(tc.whnf(once), once));
    CHECK(alpha_eq(once, mk_const("c")));
}

TEST_CASE("opaque constants never unfold") {
    Environment env = sample_env();
    TypeChecker tc(env);
    CHECK(alpha_eq(tc.whnf(mk_const("hidden")), mk_const("hidden")));
    CHECK_FALSE(tc.is_def_eq(mk_const("hidden"), mk_const("c")));
    CHECK(tc.is_def_eq(mk_const("alias"), mk_const("c")));
}

TEST_CASE("transparency levels") {
    Environment env = sample_env();
    TypeChecker tc(env);
    Term t = mk_app(mk_const("idA"), mk_const("c"));
    CHECK(alpha_eq(tc.whnf(t, Transparency::Reducible), t));
    CHECK(alpha_eq(tc.whnf(mk_const("alias"), Transparency::Reducible), mk_const("c")));
    CHECK(alpha_eq(tc.whnf(mk_const("alias"), Transparency::None), mk_const("alias")));
}

TEST_CASE("def_eq is reflexive and distinguishes distinct axioms") {
    Environment env = sample_env();
    TypeChecker tc(env);
    CHECK(tc.is_def_eq(mk_const("c"), mk_const("c")));
    CHECK_FALSE(tc.is_def_eq(mk_const("c"), mk_const("d")));
    CHECK_FALSE(tc.is_def_eq(mk_prop(), mk_type()));
}

TEST_CASE("Not unfolds to an arrow into False") {
    Environment env = builtin_environment();
    TypeChecker tc(env);
    Term n = mk_app(mk_const("Not"), mk_const("True"));
    Term w = tc.whnf(n);
    REQUIRE(w->is_pi());
    CHECK(alpha_eq(w->binder_type(), mk_const("True")));
    CHECK(alpha_eq(w->body(), mk_const("False")));
}

TEST_CASE("application type mismatch") {
    Environment env = sample_env();
    TypeChecker tc(env);
    Term bad = mk_app(mk_const("idA"), mk_const("True"));
    CHECK(error_kind([&] { tc.infer(bad); }) == KernelErrorKind::AppTypeMismatch);
    CHECK(error_kind([&] { tc.infer(mk_app(mk_const("c"), mk_const("c"))); }) == KernelErrorKind::NotAFunction);
    CHECK(error_kind([&] { tc.infer(mk_const("nope")); }) == KernelErrorKind::UnknownConstant);
    CHECK(error_kind([&] { tc.infer(mk_bvar(0)); }) == KernelErrorKind::UnboundVariable);
    CHECK(error_kind([&] { tc.infer(mk_pi("x", mk_const("c"), mk_const("A"))); }) == KernelErrorKind::NotASort);
}

TEST_CASE("check_decl rejects duplicates and mistyped values") {
    Environment env = sample_env();
    CHECK(error_kind([&] { check_decl(env, make_axiom("c", mk_const("A"))); }) == KernelErrorKind::DuplicateName);
    CHECK(error_kind([&] { check_decl(env, make_def("bad", mk_const("A"), mk_const("True"))); }) ==
          KernelErrorKind::TypeMismatch);
    Declaration with_mvar = make_def("m", mk_const("A"), mk_mvar(fresh_id()));
    CHECK(error_kind([&] { check_decl(env, with_mvar); }) == KernelErrorKind::UnexpectedMVar);
}

TEST_CASE("check_decl extends the environment by exactly one entry") {
    Environment env = sample_env();
    Declaration thm;
    thm.name = "c_refl";
    thm.kind = DeclKind::Theorem;
    thm.type = mk_app("Eq", {mk_const("A"), mk_const("c"), mk_const("c")});
    thm.value = mk_app("Eq.refl", {mk_const("A"), mk_const("c")});
    Environment next = check_decl(env, thm);
    CHECK(next.size() == env.size() + 1);
    CHECK_FALSE(next.find("c_refl")->uses_sorry);

    thm.kind = DeclKind::Example;
    CHECK(check_decl(env, thm).size() == env.size());
}

TEST_CASE("sorry propagates through check_decl") {
    Environment env = sample_env();
    Declaration thm;
    thm.name = "cheat";
    thm.kind = DeclKind::Theorem;
    thm.type = mk_app("Eq", {mk_const("A"), mk_const("c"), mk_const("d")});
    thm.value = mk_app(mk_const("sorryAx"), thm.type);
    env = check_decl(env, thm);
    CHECK(env.find("cheat")->uses_sorry);

    Declaration user;
    user.name = "user";
    user.kind = DeclKind::Theorem;
    user.type = thm.type;
    user.value = mk_const("cheat");
    env = check_decl(env, user);
    CHECK(env.find("user")->uses_sorry);
}

TEST_CASE("definitional unfolding through Eq types") {
    Environment env = sample_env();
    Declaration thm;
    thm.name = "idA_c";
    thm.kind = DeclKind::Theorem;
    thm.type = mk_app("Eq", {mk_const("A"), mk_app(mk_const("idA"), mk_const("c")), mk_const("c")});
    thm.value = mk_app("Eq.refl", {mk_const("A"), mk_const("c")});
    CHECK_NOTHROW(check_decl(env, thm));
    thm.value = mk_app("Eq.refl", {mk_const("A"), mk_const("d")});
    CHECK(error_kind([&] { check_decl(env, thm); }) == KernelErrorKind::TypeMismatch);
}

TEST_CASE("attributes and content hash") {
    Environment env = sample_env();
    Environment tagged = env.with_attribute("c", "instance");
    CHECK(tagged.instance_set() == std::vector<std::string>{"c"});
    CHECK(tagged.content_hash() != env.content_hash());
    CHECK(sample_env().content_hash() == env.content_hash());
    CHECK_THROWS_AS(env.with_attribute("c", "bogus"), std::invalid_argument);
    CHECK_THROWS_AS(env.with_attribute("missing", "simp"), std::invalid_argument);
}
