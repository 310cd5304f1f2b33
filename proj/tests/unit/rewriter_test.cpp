#include "doctest.h"

#include "fixtures.h"
#include "microproof/rewriter/simp.h"
#include "test_util.h"

using namespace microproof;
using elab::ErrorKind;
using fixtures::check;
using fixtures::has_error;
using fixtures::Statement;

namespace {

std::string module_example(const std::string& statement, const std::string& proof) {
    return std::string(fixtures::kModuleHeader) + "example (f : M →ₗ[R] M) (a b : R) (x y : M) (hx : f x = a • x) : " +
           statement + " := by\n  " + proof + "\n";
}

}  // namespace

TEST_CASE("rw rewrites the first match everywhere and closes by rfl") {
    auto r = check(module_example("f (x + y) + f (x + y) = f x + f y + (f x + f y)", "rw [map_add]"));
    CHECK_MESSAGE(r.messages.empty(), fixtures::messages(r));
    auto hyp = check(module_example("f x + f x = a • x + a • x", "rw [hx]"));
    CHECK_MESSAGE(hyp.messages.empty(), fixtures::messages(hyp));
    auto rev = check(module_example("a • x = f x", "rw [← hx]"));
    CHECK_MESSAGE(rev.messages.empty(), fixtures::messages(rev));
}

TEST_CASE("rw without a match is RwNoMatch") {
    auto r = check(module_example("f x = a • x", "rw [map_add]"));
    CHECK(has_error(r, ErrorKind::RwNoMatch));
}

TEST_CASE("simp closes True and the calc steps of the automation example") {
    auto t = check("import MiniLib.Logic\nexample : True := by simp\n");
    CHECK_MESSAGE(t.messages.empty(), fixtures::messages(t));
    auto r = check(test_util::read_corpus("automation_simp.mpl"));
    CHECK_MESSAGE(r.messages.empty(), fixtures::messages(r));
}

TEST_CASE("simp without progress fails") {
    auto r = check(module_example("f x = a • x", "simp"));
    CHECK(has_error(r, ErrorKind::SimpFailed));
}

TEST_CASE("simp terminates with a commutativity rule") {
    auto r = check(
        "import MiniLib.Algebra\n"
        "variable {G : Type} [AddCommGroup G]\n"
        "example (a b : G) (h : b + a = 0) : a + b = 0 := by\n  simp [add_comm]\n");
    CHECK(r.error_count() <= 1);
    auto closed = check(
        "import MiniLib.Algebra\n"
        "variable {G : Type} [AddCommGroup G]\n"
        "example (a b : G) (h : a + b = 0) : b + a = 0 := by\n  simp [add_comm, h]\n");
    CHECK_MESSAGE(closed.messages.empty(), fixtures::messages(closed));
}

TEST_CASE("simp_all uses hypotheses and closes the flagship") {
    auto p = check("import MiniLib.Logic\nexample (p : Prop) (hp : p) : p := by simp_all\n");
    CHECK_MESSAGE(p.messages.empty(), fixtures::messages(p));
    auto r = check(test_util::read_corpus("flagship.mpl"));
    CHECK(r.messages.empty());
}

TEST_CASE("simp_all leaves the goal open over a plain ring") {
    auto r = check(test_util::read_corpus("ring_failure.mpl"));
    int unsolved = 0;
    for (const auto& m : r.messages)
        if (m.kind == ErrorKind::UnsolvedGoals) ++unsolved;
    CHECK(unsolved == 1);
}

TEST_CASE("trace-simp prints one line per rewrite") {
    driver::Options opts;
    opts.trace_simp = true;
    auto r = check(test_util::read_corpus("automation_simp.mpl"), opts);
    REQUIRE_FALSE(r.trace.empty());
    bool map_add = false;
    for (const auto& line : r.trace) {
        CHECK(line.rfind("[simp] ", 0) == 0);
        CHECK(line.find(" ==> ") != std::string::npos);
        map_add = map_add || line.rfind("[simp] map_add: ", 0) == 0;
    }
    CHECK(map_add);
}

TEST_CASE("simp is idempotent and its proofs re-check") {
    Statement s(std::string(fixtures::kModuleHeader) +
                "example (f : M →ₗ[R] M) (a b : R) (x y : M) : f (a • x + b • (y + 0)) - 0 = 0 := sorry\n");
    auto rules = rewriter::simp_set_rules(*s.result.env);
    auto lhs = kernel::get_app_args(s.type)[1];
    rewriter::Simplifier simp(s.meta, rules);
    auto once = simp.simp(lhs);
    CHECK(s.render(once.expr) == "a • f x + b • f y");
    REQUIRE(once.proof);
    kernel::Term eq = kernel::mk_app("Eq", {s.meta.infer(lhs), lhs, once.expr});
    CHECK(s.meta.is_def_eq(s.meta.infer(*once.proof), eq));
    rewriter::Simplifier again(s.meta, rules);
    auto twice = again.simp(once.expr);
    CHECK_FALSE(twice.proof);
    CHECK(kernel::alpha_eq(twice.expr, once.expr));
}

TEST_CASE("simp stops at the step budget") {
    Statement s(std::string(fixtures::kModuleHeader) +
                "example (f : M →ₗ[R] M) (a b : R) (x y : M) : f (a • x + b • y) = 0 := sorry\n");
    rewriter::SimpConfig cfg;
    cfg.max_steps = 1;
    rewriter::Simplifier simp(s.meta, rewriter::simp_set_rules(*s.result.env), cfg);
    bool budget = false;
    try {
        simp.simp(kernel::get_app_args(s.type)[1]);
    } catch (const elab::ElabError& e) {
        budget = e.kind() == ErrorKind::SimpStepBudgetExceeded;
    }
    CHECK(budget);
}

TEST_CASE("hypotheses orient as rules: p becomes p = True, not p becomes p = False") {
    auto r = check(
        "import MiniLib.Logic\n"
        "example (p q : Prop) (hp : p) (hq : ¬q) : p ∧ (q ∨ p) := by\n  simp [hp, hq]\n");
    CHECK_MESSAGE(r.messages.empty(), fixtures::messages(r));
}
