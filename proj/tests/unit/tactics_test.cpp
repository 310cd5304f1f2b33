#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "fixtures.h"
#include "kernel_recheck.h"
#include "microproof/syntax/source.h"
#include "test_util.h"

using namespace microproof;
using elab::ErrorKind;
using fixtures::check;
using fixtures::has_error;

namespace {

const tactics::Snapshot* state_at(const driver::FileResult& r, const std::string& text, std::uint32_t line,
                                  std::uint32_t col = 0) {
    syntax::LineMap map(text);
    return driver::snapshot_at(r, map.offset_of(line, col));
}

std::vector<std::string> targets(const std::string& render) {
    std::vector<std::string> out;
    std::istringstream in(render);
    for (std::string l; std::getline(in, l);)
        if (l.rfind("⊢ ", 0) == 0) out.push_back(l.substr(std::string("⊢ ").size()));
    return out;
}

}  // namespace

TEST_CASE("intro renders the flagship context") {
    std::string text = test_util::read_corpus("flagship.mpl");
    auto r = check(text);
    const auto* s = state_at(r, text, 12);
    REQUIRE(s);
    CHECK(test_util::normalize(s->render()) == test_util::expected_infoview());
}

TEST_CASE("goal state past the end of a proof is `no goals`") {
    std::string text = test_util::read_corpus("flagship.mpl");
    auto r = check(text);
    const auto* s = state_at(r, text, 19, 20);
    REQUIRE(s);
    CHECK(s->goals.empty());
    CHECK(s->render() == "no goals");
}

TEST_CASE("apply orders goals props first, exact closes an entangled goal, swap and constructor") {
    std::string text = test_util::read_corpus("strengthening_messy.mpl");
    auto r = check(text);
    REQUIRE(r.messages.empty());
    CHECK(targets(state_at(r, text, 13)->render()) ==
          std::vector<std::string>{"Function.Injective ?μ", "∀ (i : ι), ?f.HasEigenvector (?μ i) (v i)",
                                   "Module.End R M", "ι → R"});
    CHECK(targets(state_at(r, text, 14)->render()) ==
          std::vector<std::string>{"∀ (i : ι), ?f.HasEigenvector (μ i) (v i)", "Module.End R M"});
    CHECK(targets(state_at(r, text, 15)->render()) ==
          std::vector<std::string>{"∀ (i : ι), Module.End.HasEigenvector f (μ i) (v i)"});
    CHECK(targets(state_at(r, text, 17)->render()) ==
          std::vector<std::string>{"v i ∈ Module.End.eigenspace f (μ i)", "v i ≠ 0"});
    CHECK(state_at(r, text, 18, 10)->goals.empty());
}

TEST_CASE("swap is an involution") {
    std::string text = test_util::read_corpus("strengthening_messy.mpl");
    std::string twice = test_util::replace_first(text, "  exact hμ\n", "  swap\n  swap\n  exact hμ\n");
    auto a = check(text);
    auto b = check(twice);
    REQUIRE(b.messages.empty());
    CHECK(state_at(a, text, 13)->render() == state_at(b, twice, 15)->render());
}

TEST_CASE("constructor closes True and rejects other heads") {
    auto ok = check("import MiniLib.Logic\nexample : True := by constructor\n");
    CHECK(ok.messages.empty());
    auto bad = check("import MiniLib.Logic\nexample (p : Prop) (hp : p) : p := by constructor\n");
    CHECK(has_error(bad, ErrorKind::ConstructorHeadUnknown));
}

TEST_CASE("intro on a non-function goal is an error") {
    auto r = check("import MiniLib.Logic\nexample (p : Prop) (hp : p) : p := by\n  intro h\n  exact hp\n");
    CHECK(has_error(r, ErrorKind::IntroOnNonPi));
}

TEST_CASE("sorry warns with open goals and errors without") {
    auto warn = check("import MiniLib.Logic\nexample (p : Prop) : p := by sorry\n");
    REQUIRE(warn.messages.size() == 1);
    CHECK(warn.messages[0].severity == elab::Severity::Warning);
    CHECK(warn.messages[0].text == "declaration uses 'sorry'");

    auto err = check("import MiniLib.Logic\nexample (p : Prop) (hp : p) : p := by\n  exact hp\n  sorry\n");
    REQUIRE(err.messages.size() == 1);
    CHECK(err.messages[0].kind == ErrorKind::NoGoals);
    CHECK(err.messages[0].text.find("nothing to be sorry about") != std::string::npos);
}

TEST_CASE("a bullet must close its goal and removes exactly one goal") {
    std::string ok = "import MiniLib.Logic\nexample (p q : Prop) (hp : p) (hq : q) : p ∧ q := by\n  constructor\n"
                     "  · exact hp\n  · exact hq\n";
    auto r = check(ok);
    CHECK(r.messages.empty());
    auto bullet = std::find_if(r.snapshots.begin(), r.snapshots.end(), [](const auto& s) {
        return s.span.begin.line == 4 && s.span.begin.col == 2;
    });
    REQUIRE(bullet != r.snapshots.end());
    CHECK(bullet->goals.size() == 1);

    auto open = check("import MiniLib.Logic\nexample (p q : Prop) (hp : p) (hq : q) : p ∧ q := by\n  constructor\n"
                      "  · intro h\n  · exact hq\n");
    CHECK(open.error_count() >= 1);
    auto unclosed = check("import MiniLib.Logic\nexample (p q : Prop) (hp : p) (hq : q) : (p → p) ∧ q := by\n"
                          "  constructor\n  · intro h\n  · exact hq\n");
    CHECK(has_error(unclosed, ErrorKind::BulletLeftGoalsOpen));
}

TEST_CASE("unsolved goals name the remaining state") {
    auto r = check(test_util::delete_line(test_util::read_corpus("flagship.mpl"), 19));
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages[0].kind == ErrorKind::UnsolvedGoals);
    CHECK(r.messages[0].goal_render.find("this : (μ - ν) • a • x = 0") != std::string::npos);
}

TEST_CASE("have names its hypothesis, defaulting to this") {
    auto r = check(
        "import MiniLib.Logic\n"
        "example (p q : Prop) (hp : p) (hpq : p → q) : q := by\n"
        "  have hq : q := hpq hp\n"
        "  exact hq\n");
    CHECK(r.messages.empty());
}

TEST_CASE("a failing nested by is reported at the by and the proof continues") {
    std::string text = test_util::read_corpus("ring_failure.mpl");
    auto r = check(text);
    bool found = false;
    for (const auto& m : r.messages)
        if (m.kind == ErrorKind::NonCommutativeScalars) {
            found = true;
            CHECK(m.span.begin.line == 15);
            CHECK(m.span.begin.col == 31);
            CHECK(m.span.end.col == 40);
        }
    CHECK(found);
}

TEST_CASE("every tactic proof in the corpus re-checks in the kernel") {
    for (const char* f : {"flagship.mpl", "automation_rw.mpl", "automation_simp.mpl", "generalized.mpl",
                          "strengthening_clean.mpl", "strengthening_messy.mpl"}) {
        auto r = check(test_util::read_corpus(f));
        REQUIRE_MESSAGE(r.messages.empty(), f);
        for (const auto& d : r.decls) {
            REQUIRE(d.value);
            CHECK_MESSAGE(recheck::kernel_accepts(*r.env, d.type, *d.value), f);
            CHECK_FALSE((*d.value)->has_mvar());
        }
    }
}

TEST_CASE("goal conservation: recorded goals are exactly unassigned metavariables") {
    for (const char* f : {"flagship.mpl", "strengthening_messy.mpl", "strengthening_clean.mpl"}) {
        auto r = check(test_util::read_corpus(f));
        for (const auto& s : r.snapshots)
            for (auto g : s.goals) CHECK_FALSE(s.mctx->is_assigned(g));
    }
}
