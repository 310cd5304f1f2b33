#include "doctest.h"

#include <sstream>

#include "cli.h"
#include "fixtures.h"
#include "json.hpp"
#include "test_util.h"

using namespace microproof;
using fixtures::library;

namespace {

struct Checked {
    int code;
    std::string out;
    std::string err;
};

Checked run_check(const std::string& text, driver::CheckFlags flags = {}) {
    cli::TempFile file("input.mpl", text);
    std::ostringstream out, err;
    int code = driver::check_file(file.path(), library(), flags, out, err);
    return {code, out.str(), err.str()};
}

std::string cli_path() { return cli::quote(MICROPROOF_CLI_PATH); }

}  // namespace

TEST_CASE("check_file exit codes") {
    CHECK(run_check(test_util::read_corpus("flagship.mpl")).code == 0);
    CHECK(run_check(test_util::read_corpus("flagship.mpl")).out.empty());
    CHECK(run_check(test_util::read_corpus("ring_failure.mpl")).code == 1);

    std::ostringstream out, err;
    CHECK(driver::check_file("/nonexistent/file.mpl", library(), {}, out, err) == 2);
    CHECK(err.str().find("cannot read") != std::string::npos);
}

TEST_CASE("warnings pass unless strict") {
    std::string text = "import MiniLib.Logic\nexample (p : Prop) : p := by sorry\n";
    auto lax = run_check(text);
    CHECK(lax.code == 0);
    CHECK(lax.out.find("warning: declaration uses 'sorry'") != std::string::npos);
    driver::CheckFlags strict;
    strict.strict = true;
    CHECK(run_check(text, strict).code == 1);
}

TEST_CASE("diagnostics render as file:line:col with the goal") {
    auto r = run_check(test_util::delete_line(test_util::read_corpus("flagship.mpl"), 19));
    CHECK(r.code == 1);
    CHECK(r.out.find(":10:") != std::string::npos);
    CHECK(r.out.find("error[UnsolvedGoals]: unsolved goals") != std::string::npos);
    CHECK(r.out.find("⊢ a = 0 ∧ b = 0") != std::string::npos);
}

TEST_CASE("json output is one diagnostic object per line") {
    driver::CheckFlags flags;
    flags.json = true;
    auto r = run_check(test_util::read_corpus("ring_failure.mpl"), flags);
    std::istringstream in(r.out);
    int n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        auto j = nlohmann::json::parse(line);
        CHECK(j["severity"] == "error");
        CHECK(j["span"]["start"]["line"].is_number());
        CHECK(j["span"]["end"]["col"].is_number());
        CHECK(j.contains("kind"));
        CHECK(j["message"].is_string());
        CHECK(j.contains("goalRender"));
    }
    CHECK(n == 2);
}

TEST_CASE("trace output goes to stderr") {
    driver::CheckFlags flags;
    flags.trace_simp = true;
    auto r = run_check(test_util::read_corpus("automation_simp.mpl"), flags);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("[simp] map_add") != std::string::npos);
}

TEST_CASE("command line interface") {
    auto ok = cli::run(cli_path() + " check " + cli::quote(test_util::corpus_path("flagship.mpl")));
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.empty());

    CHECK(cli::run(cli_path() + " check 2>/dev/null").exit_code == 2);
    CHECK(cli::run(cli_path() + " frobnicate 2>/dev/null").exit_code == 2);
    CHECK(cli::run(cli_path() + " check /nonexistent.mpl 2>/dev/null").exit_code == 2);
    CHECK(cli::run(cli_path() + " --help").exit_code == 0);

    auto bad_prelude = cli::run(cli_path() + " check --prelude-path /nonexistent " +
                                cli::quote(test_util::corpus_path("flagship.mpl")));
    CHECK(bad_prelude.exit_code == 1);
    CHECK(bad_prelude.out.find("UnknownModule") != std::string::npos);
    auto env_prelude = cli::run("MICROPROOF_PRELUDE=/nonexistent " + cli_path() + " check " +
                                cli::quote(test_util::corpus_path("flagship.mpl")));
    CHECK(env_prelude.exit_code == 1);

    auto search = cli::run(cli_path() + " search linear independent");
    CHECK(search.exit_code == 0);
    CHECK(search.out.find("LinearIndependent : ") != std::string::npos);
}

TEST_CASE("serve over stdio answers until shutdown") {
    std::string requests =
        "{\"id\":1,\"method\":\"open\",\"params\":{\"path\":\"a.mpl\",\"text\":\"import MiniLib.Logic\\n\"}}\n"
        "not json\n"
        "{\"id\":2,\"method\":\"shutdown\"}\n"
        "{\"id\":3,\"method\":\"diagnostics\",\"params\":{\"path\":\"a.mpl\"}}\n";
    auto r = cli::run("printf '%s' " + cli::quote(requests) + " | " + cli_path() + " serve");
    CHECK(r.exit_code == 0);
    std::istringstream in(r.out);
    std::vector<nlohmann::json> replies;
    for (std::string line; std::getline(in, line);) replies.push_back(nlohmann::json::parse(line));
    REQUIRE(replies.size() == 3);
    CHECK(replies[0]["id"] == 1);
    CHECK(replies[0]["result"]["diagnostics"].empty());
    CHECK(replies[1]["error"]["code"] == -32700);
    CHECK(replies[2]["result"]["ok"] == true);
}
