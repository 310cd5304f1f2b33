#include "doctest.h"

#include "fixtures.h"
#include "linear_oracle.h"
#include "microproof/kernel/type_checker.h"
#include "microproof/lindec/module.h"

using namespace microproof;
using elab::ErrorKind;
using fixtures::check;
using fixtures::has_error;
using fixtures::Statement;
using lindec::ScalarPoly;

namespace {

constexpr bool kComm = true;

ScalarPoly atom(std::size_t i) { return ScalarPoly::atom(i, kComm); }

std::string module_example(const std::string& statement) {
    return std::string(fixtures::kModuleHeader) + "example (f : M →ₗ[R] M) (μ ν a b p q r s : R) (x y z : M) : " + statement +
           " := by module\n";
}

/// Both sides of an equation at the module type, normalized with shared atom tables.
struct Sides {
    explicit Sides(const std::string& statement)
        : s(module_example(statement)),
          norm(s.meta, s.meta.infer(kernel::get_app_args(s.type)[1]), s.meta.lctx().find_by_name("μ")->type, kComm),
          lhs(norm.module(kernel::get_app_args(s.type)[1])),
          rhs(norm.module(kernel::get_app_args(s.type)[2])) {}
    Statement s;
    lindec::Normalizer norm;
    lindec::LinCombo lhs, rhs;
};

}  // namespace

TEST_CASE("scalar polynomials compare up to monomial order and zero terms") {
    // μ·a − ν·a vs a·μ − a·ν
    ScalarPoly p = atom(0) * atom(2) - atom(1) * atom(2);
    ScalarPoly q = atom(2) * atom(0) - atom(2) * atom(1);
    CHECK(lindec::poly_equal(p, q));
    CHECK(lindec::poly_equal(p, p + (atom(0) - atom(0))));
    CHECK_FALSE(lindec::poly_equal(p, q + atom(3)));
    CHECK((atom(0) - atom(0)).is_zero());
}

TEST_CASE("non-commutative monomials keep their order") {
    ScalarPoly ab = ScalarPoly::atom(0, false) * ScalarPoly::atom(1, false);
    ScalarPoly ba = ScalarPoly::atom(1, false) * ScalarPoly::atom(0, false);
    CHECK_FALSE(lindec::poly_equal(ab, ba));
}

TEST_CASE("normal forms of the flagship calc step") {
    Sides e("(μ - ν) • a • x = (a • μ • x + b • ν • y) - ν • (a • x + b • y)");
    CHECK(e.lhs == e.rhs);
    REQUIRE(e.lhs.coeffs().size() == 1);
    CHECK(e.norm.render(e.lhs).find("x") != std::string::npos);

    Sides zero("(0 : M) = a • x - a • x");
    CHECK(zero.lhs.coeffs().empty());
    CHECK(zero.rhs.coeffs().empty());

    Sides comm("a • x + b • y = b • y + a • x");
    CHECK(comm.lhs == comm.rhs);

    Sides atomic("f (x + y) = f (y + x)");
    CHECK_FALSE(atomic.lhs == atomic.rhs);
}

TEST_CASE("module closes identities and rejects non-identities") {
    CHECK(check(module_example("x = x")).messages.empty());
    CHECK(check(module_example("(μ - ν) • a • x = (a • μ • x + b • ν • y) - ν • (a • x + b • y)")).messages.empty());
    CHECK(check(module_example("-(a • x) + f y = f y - a • x")).messages.empty());
    CHECK(has_error(check(module_example("a • x = b • x")), ErrorKind::ModuleNotEqual));
}

TEST_CASE("module needs a module-typed equation") {
    auto r = check(module_example("μ = μ ∧ x = x"));
    CHECK(r.error_count() == 1);
    CHECK(has_error(r, ErrorKind::NotModuleTyped));
}

TEST_CASE("module with non-commutative scalars names the missing equalities") {
    auto r = check(
        "import MiniLib.Module\n"
        "variable {R M : Type} [Ring R] [AddCommGroup M] [Module R M]\n"
        "example (a b : R) (x : M) : a • b • x = b • a • x := by module\n");
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages[0].kind == ErrorKind::NonCommutativeScalars);
    const auto& text = r.messages[0].text;
    CHECK((text.find("b • a • x = a • b • x") != std::string::npos ||
           text.find("a • b • x = b • a • x") != std::string::npos));
}

TEST_CASE("trace-module prints both normal forms") {
    driver::Options opts;
    opts.trace_module = true;
    auto r = check(module_example("a • x = b • x"), opts);
    bool lhs = false, rhs = false;
    for (const auto& line : r.trace) {
        lhs = lhs || line.rfind("[module] lhs: ", 0) == 0;
        rhs = rhs || line.rfind("[module] rhs: ", 0) == 0;
    }
    CHECK(lhs);
    CHECK(rhs);
}

TEST_CASE("property: module agrees with evaluation over Z^3") {
    oracle::Generator gen(20240611);
    std::vector<oracle::Generator::Pair> pairs;
    for (int i = 0; i < 60; ++i) pairs.push_back(gen.pair());
    auto r = check(oracle::module_file(pairs));
    std::vector<bool> failed(pairs.size(), false);
    for (const auto& m : r.messages) {
        REQUIRE(m.span.begin.line >= oracle::kFirstExampleLine);
        failed[m.span.begin.line - oracle::kFirstExampleLine] = true;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
        CHECK_MESSAGE(pairs[i].identity != failed[i], oracle::render(pairs[i].lhs), " = ",
                      oracle::render(pairs[i].rhs));
    // accepted examples are kernel-checked without sorry
    std::size_t accepted = 0, sorry_free = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) accepted += !failed[i];
    for (const auto& d : r.decls) sorry_free += !kernel::mentions_sorry(*r.env, *d.value);
    CHECK(sorry_free == accepted);
}

TEST_CASE("property: normal forms are invariant under re-association and re-ordering") {
    oracle::Generator gen(77);
    for (int i = 0; i < 40; ++i) {
        auto lhs = gen.vector(3);
        auto rhs = gen.rewrite(gen.rewrite(lhs));
        Sides e("(" + oracle::render(lhs) + " : M) = " + oracle::render(rhs));
        CHECK_MESSAGE(e.lhs == e.rhs, oracle::render(lhs), " vs ", oracle::render(rhs));
    }
}
