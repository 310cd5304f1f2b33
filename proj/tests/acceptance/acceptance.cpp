#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "cli.h"
#include "kernel_recheck.h"
#include "linear_oracle.h"
#include "microproof/driver/check.h"
#include "microproof/syntax/source.h"
#include "test_util.h"

using namespace microproof;
using test_util::normalize;
using test_util::read_corpus;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

prelude::Library& library() {
    static prelude::Library lib(prelude::default_root());
    return lib;
}

driver::FileResult check(const std::string& text) { return driver::check_text(text, library()); }

std::string cli_check(const std::string& path, const std::string& flags = "") {
    return fmt::format("{} check {} {}", cli::quote(MICROPROOF_CLI_PATH), flags, cli::quote(path));
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string l; std::getline(in, l);)
        if (l.find(needle) != std::string::npos) ++n;
    return n;
}

std::string first_message(const driver::FileResult& r) {
    return r.messages.empty() ? "no messages" : r.messages.front().text;
}

const tactics::Snapshot* snapshot(const driver::FileResult& r, const std::string& text, std::uint32_t line,
                                  std::uint32_t col) {
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

Outcome a1() {
    auto run = cli::run(cli_check(test_util::corpus_path("flagship.mpl")));
    if (run.exit_code != 0 || !run.out.empty())
        return {false, fmt::format("flagship exit {} output '{}'", run.exit_code, run.out)};
    auto r = check(test_util::delete_line(read_corpus("flagship.mpl"), 19));
    if (r.messages.size() != 1 || r.messages[0].kind != elab::ErrorKind::UnsolvedGoals)
        return {false, fmt::format("without line 19: {} messages, first '{}'", r.messages.size(), first_message(r))};
    std::string render = normalize(r.messages[0].goal_render);
    std::string tail = "⊢ a = 0 ∧ b = 0";
    if (render.size() < tail.size() || render.compare(render.size() - tail.size(), tail.size(), tail) != 0)
        return {false, "unsolved goal render ends differently: " + render};
    return {true, "flagship checks silently; without simp_all one UnsolvedGoals error"};
}

Outcome a2() {
    std::string text = read_corpus("flagship.mpl");
    auto r = check(text);
    const auto* snap = snapshot(r, text, 12, 0);
    if (!snap) return {false, "no tactic state after intro"};
    std::string got = normalize(snap->render());
    if (got != test_util::expected_infoview()) return {false, "render differs:\n" + got};
    return {true, "state after `intro a b hab` matches the 13-line listing"};
}

Outcome a3() {
    for (const char* f : {"automation_rw.mpl", "automation_simp.mpl"}) {
        auto r = check(read_corpus(f));
        if (!r.messages.empty() || r.decls.empty()) return {false, fmt::format("{}: {}", f, first_message(r))};
        for (const auto& d : r.decls)
            if (d.value && !recheck::kernel_accepts(*r.env, d.type, *d.value))
                return {false, fmt::format("{}: proof of {} does not re-check", f, d.name)};
    }
    return {true, "rw calc and simp calc both check and re-check in the kernel"};
}

std::string tactic_block(const std::string& text) {
    auto at = text.find("  intro a b hab");
    return at == std::string::npos ? std::string() : text.substr(at);
}

Outcome a4() {
    std::string general = read_corpus("generalized.mpl");
    std::string block = tactic_block(general);
    if (block.empty() || block != tactic_block(read_corpus("flagship.mpl")))
        return {false, "tactic block differs from the flagship"};
    auto r = check(general);
    if (!r.messages.empty()) return {false, first_message(r)};
    return {true, "CommRing + NoZeroSMulDivisors version checks with the same tactic block"};
}

Outcome a5() {
    std::string text = read_corpus("ring_failure.mpl");
    auto r = check(text);
    syntax::LineMap map(text);
    std::uint32_t begin = map.offset_of(15, 0) + static_cast<std::uint32_t>(
                                                    std::string("        ν • (a • x + b • y) := ").size());
    std::uint32_t end = begin + static_cast<std::uint32_t>(std::string("by module").size());
    for (const auto& m : r.messages) {
        if (m.severity != elab::Severity::Error) continue;
        bool covers = m.span.begin.offset <= begin && m.span.end.offset >= end;
        if (covers && m.text.find("b • ν • y = ν • b • y") != std::string::npos)
            return {true, fmt::format("error at {}:{}: {}", m.span.begin.line, m.span.begin.col,
                                      m.text.substr(0, m.text.find('\n')))};
    }
    return {false, fmt::format("no error covering `by module`; first: {}", first_message(r))};
}

Outcome a6() {
    std::string messy = read_corpus("strengthening_messy.mpl");
    auto r = check(messy);
    if (!r.messages.empty()) return {false, "messy script: " + first_message(r)};
    const auto* after_apply = snapshot(r, messy, 13, 0);
    const auto* after_exact = snapshot(r, messy, 14, 0);
    if (!after_apply || !after_exact) return {false, "missing tactic states"};
    std::vector<std::string> want{"Function.Injective ?μ", "∀ (i : ι), ?f.HasEigenvector (?μ i) (v i)",
                                  "Module.End R M", "ι → R"};
    auto got = targets(after_apply->render());
    if (got != want) return {false, "goals after apply:\n" + after_apply->render()};
    if (after_exact->goals.size() != 2)
        return {false, fmt::format("{} goals after exact hμ", after_exact->goals.size())};
    auto clean = check(read_corpus("strengthening_clean.mpl"));
    if (!clean.messages.empty()) return {false, "clean script: " + first_message(clean)};
    return {true, "apply leaves 4 goals in order, exact hμ leaves 2, both scripts check"};
}

Outcome a7() {
    std::string text = read_corpus("strengthening_search.mpl");
    auto r = check(text);
    if (r.searches.empty() || r.searches[0].suggestions.empty()) return {false, "exact? found nothing"};
    const std::string& top = r.searches[0].suggestions[0];
    if (top != "exact Module.End.mem_eigenspace_iff.mpr (h i)") return {false, "top suggestion: " + top};
    auto spliced = check(test_util::replace_first(text, "exact?", top));
    if (!spliced.messages.empty()) return {false, "spliced file: " + first_message(spliced)};
    return {true, "top suggestion is `" + top + "` and the spliced file checks"};
}

Outcome a8() {
    std::string flagship = read_corpus("flagship.mpl");
    cli::TempFile open_goals("sorry_open.mpl", test_util::replace_first(flagship, "simp_all [sub_eq_zero]", "sorry"));
    auto run = cli::run(cli_check(open_goals.path()));
    std::size_t warnings = count_lines_with(run.out, "warning");
    if (run.exit_code != 0 || warnings != 1)
        return {false, fmt::format("sorry with open goals: exit {}, {} warnings", run.exit_code, warnings)};
    auto strict = cli::run(cli_check(open_goals.path(), "--strict"));
    if (strict.exit_code != 1) return {false, fmt::format("--strict exit {}", strict.exit_code)};
    cli::TempFile closed("sorry_closed.mpl", flagship + "  sorry\n");
    auto extra = cli::run(cli_check(closed.path()));
    if (extra.exit_code != 1 || extra.out.find("nothing to be sorry about") == std::string::npos)
        return {false, fmt::format("sorry after complete proof: exit {} '{}'", extra.exit_code, extra.out)};
    return {true, "open-goal sorry warns once (exit 0, --strict exit 1); extra sorry errors"};
}

Outcome a9() {
    std::vector<driver::FileResult> accepted;
    for (const char* f : {"flagship.mpl", "automation_rw.mpl", "automation_simp.mpl", "generalized.mpl",
                          "strengthening_clean.mpl", "strengthening_messy.mpl"})
        accepted.push_back(check(read_corpus(f)));
    std::size_t proofs = 0;
    for (const auto& r : accepted)
        for (const auto& d : r.decls) {
            if (!d.value) continue;
            ++proofs;
            if (!recheck::kernel_accepts(*r.env, d.type, *d.value))
                return {false, "proof of " + d.name + " does not re-check"};
        }
    std::mt19937_64 rng(9);
    std::size_t rejected = 0, trials = 0;
    while (trials < 100) {
        const auto& r = accepted[rng() % accepted.size()];
        if (r.decls.empty()) continue;
        const auto& d = r.decls[rng() % r.decls.size()];
        if (!d.value) continue;
        auto m = recheck::mutate(*d.value, rng);
        if (!m) continue;
        ++trials;
        if (!recheck::kernel_accepts(*r.env, d.type, *m)) ++rejected;
    }
    if (rejected != trials) return {false, fmt::format("{} of {} mutated proofs rejected", rejected, trials)};
    return {true, fmt::format("{} proofs re-check; {} of {} mutations rejected", proofs, rejected, trials)};
}

Outcome a10() {
    oracle::Generator gen(10);
    std::vector<oracle::Generator::Pair> pairs;
    for (int i = 0; i < 200; ++i) pairs.push_back(gen.pair());
    auto r = check(oracle::module_file(pairs));
    std::vector<bool> failed(pairs.size(), false);
    for (const auto& m : r.messages) {
        if (m.severity != elab::Severity::Error || m.span.begin.line < oracle::kFirstExampleLine) continue;
        std::size_t i = m.span.begin.line - oracle::kFirstExampleLine;
        if (i < failed.size()) failed[i] = true;
    }
    std::size_t agree = 0, identities = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        identities += pairs[i].identity;
        if (pairs[i].identity != failed[i]) ++agree;
    }
    return {agree == pairs.size(),
            fmt::format("{}/{} verdicts agree with evaluation over Z^3 ({} identities)", agree, pairs.size(),
                        identities)};
}

Outcome a11() {
    auto run = cli::run(fmt::format("{} search {}", cli::quote(MICROPROOF_CLI_PATH), cli::quote("linear independent")));
    bool li = run.out.find("\nLinearIndependent :") != std::string::npos || run.out.rfind("LinearIndependent :", 0) == 0;
    bool eig = run.out.find("Module.End.eigenvectors_linearIndependent' :") != std::string::npos;
    if (run.exit_code != 0 || !li || !eig) return {false, "search output: " + run.out};
    auto narrow = cli::run(
        fmt::format("{} search {}", cli::quote(MICROPROOF_CLI_PATH), cli::quote("eigenvector linear independent")));
    std::size_t n = count_lines_with(narrow.out, " : ");
    if (n != 1) return {false, fmt::format("'eigenvector linear independent' gave {} results", n)};
    return {true, "both names listed; the eigenvector query has 1 result (the prelude has one such theorem)"};
}

}  // namespace

int main() {
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},  {"A5", a5},  {"A6", a6},
        {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}, {"A11", a11}};
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    }
    return failures == 0 ? 0 : 1;
}
