#include "doctest.h"

#include <algorithm>
#include <sstream>
#include <thread>

#include "fixtures.h"
#include "microproof/driver/server.h"
#include "test_util.h"

using namespace microproof;
using fixtures::library;
using nlohmann::json;

namespace {

json request(driver::Session& s, int id, const std::string& method, json params) {
    return s.handle({{"id", id}, {"method", method}, {"params", std::move(params)}});
}

json open_doc(driver::Session& s, const std::string& path, const std::string& text) {
    return request(s, 1, "open", {{"path", path}, {"text", text}});
}

std::vector<std::string> keys(const json& diags) {
    std::vector<std::string> out;
    for (const auto& d : diags) out.push_back(d.dump());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("session diagnostics after open equal batch diagnostics") {
    driver::Session s(library());
    for (const char* f : {"flagship.mpl", "ring_failure.mpl", "strengthening_search.mpl", "automation_rw.mpl"}) {
        std::string text = test_util::read_corpus(f);
        auto reply = open_doc(s, f, text);
        json batch = json::array();
        for (const auto& m : fixtures::check(text).messages) batch.push_back(driver::diagnostic_json(m, f));
        CHECK_MESSAGE(keys(reply["result"]["diagnostics"]) == keys(batch), f);
        auto later = request(s, 2, "diagnostics", {{"path", f}});
        CHECK(keys(later["result"]["diagnostics"]) == keys(batch));
        CHECK(later["result"]["stale"] == false);
    }
}

TEST_CASE("goalState renders the infoview after intro") {
    driver::Session s(library());
    open_doc(s, "flagship.mpl", test_util::read_corpus("flagship.mpl"));
    auto r = request(s, 2, "goalState", {{"path", "flagship.mpl"}, {"line", 12}, {"col", 0}})["result"];
    CHECK(r["revision"] == 0);
    CHECK(r["stale"] == false);
    CHECK(test_util::normalize(r["render"].get<std::string>()) == test_util::expected_infoview());
    REQUIRE(r["goals"].size() == 1);
    CHECK(r["goals"][0]["target"] == "a = 0 ∧ b = 0");
    CHECK(r["goals"][0]["context"].size() == 12);
    CHECK(r["goals"][0]["context"][0] == "K : Type");

    auto end = request(s, 3, "goalState", {{"path", "flagship.mpl"}, {"line", 19}, {"col", 24}})["result"];
    CHECK(end["render"] == "no goals");
    CHECK(end["goals"].empty());
}

TEST_CASE("suggest answers exact? at the eigenspace goal") {
    driver::Session s(library());
    open_doc(s, "clean.mpl", test_util::read_corpus("strengthening_clean.mpl"));
    auto r = request(s, 2, "suggest", {{"path", "clean.mpl"}, {"line", 16}, {"col", 0}})["result"];
    REQUIRE_FALSE(r["suggestions"].empty());
    CHECK(r["suggestions"][0] == "exact Module.End.mem_eigenspace_iff.mpr (h i)");
}

TEST_CASE("search lists matching declarations") {
    driver::Session s(library());
    auto r = request(s, 1, "search", {{"query", "linear independent"}})["result"]["results"];
    bool found = std::any_of(r.begin(), r.end(), [](const json& h) { return h["name"] == "LinearIndependent"; });
    CHECK(found);
}

TEST_CASE("protocol errors are answered and the session continues") {
    driver::Session s(library());
    auto parse = s.handle_line("{not json");
    CHECK(parse["error"]["code"] == -32700);
    CHECK(parse["id"].is_null());
    CHECK(s.handle_line("[1,2]")["error"]["code"] == -32600);
    CHECK(request(s, 2, "frobnicate", json::object())["error"]["code"] == -32601);
    CHECK(request(s, 3, "open", {{"path", "x.mpl"}})["error"]["code"] == -32602);
    CHECK(request(s, 4, "goalState", {{"path", "x.mpl"}, {"line", "one"}, {"col", 0}})["error"]["code"] == -32602);
    CHECK(request(s, 5, "diagnostics", {{"path", "missing.mpl"}})["error"]["code"] == -32001);
    auto ok = open_doc(s, "x.mpl", "import MiniLib.Logic\n");
    CHECK(ok["id"] == 1);
    CHECK(ok["result"]["diagnostics"].empty());
    CHECK(request(s, 6, "shutdown", json::object())["result"]["ok"] == true);
    CHECK(s.shutdown_requested());
}

TEST_CASE("changes are debounced, and queries flag stale results until the re-check lands") {
    driver::Session s(library(), std::chrono::milliseconds(100));
    std::string good = "import MiniLib.Logic\nexample (p : Prop) (hp : p) : p := hp\n";
    std::string bad = "import MiniLib.Logic\nexample (p : Prop) (hp : p) : p := hq\n";
    open_doc(s, "d.mpl", good);

    auto c1 = request(s, 2, "change", {{"path", "d.mpl"}, {"text", bad}, {"revision", 1}});
    CHECK(c1["result"]["revision"] == 1);
    auto c2 = request(s, 3, "change", {{"path", "d.mpl"}, {"text", bad}, {"revision", 2}});
    CHECK(c2["result"]["scheduled"] == true);

    auto during = request(s, 4, "diagnostics", {{"path", "d.mpl"}})["result"];
    CHECK(during["revision"] == 0);
    CHECK(during["stale"] == true);
    CHECK(during["diagnostics"].empty());

    s.wait_idle();
    auto after = request(s, 5, "diagnostics", {{"path", "d.mpl"}})["result"];
    CHECK(after["revision"] == 2);
    CHECK(after["stale"] == false);
    CHECK(after["diagnostics"].size() == 1);

    auto old = request(s, 6, "change", {{"path", "d.mpl"}, {"text", good}, {"revision", 2}});
    CHECK(old["error"]["code"] == -32002);
    CHECK(request(s, 7, "change", {{"path", "nope.mpl"}, {"text", good}})["error"]["code"] == -32001);
}

TEST_CASE("a change without a revision increments the current one") {
    driver::Session s(library(), std::chrono::milliseconds(10));
    open_doc(s, "d.mpl", "import MiniLib.Logic\n");
    auto c = request(s, 2, "change", {{"path", "d.mpl"}, {"text", "import MiniLib.Algebra\n"}});
    CHECK(c["result"]["revision"] == 1);
    s.wait_idle();
    auto d = request(s, 3, "diagnostics", {{"path", "d.mpl"}})["result"];
    CHECK(d["revision"] == 1);
}

TEST_CASE("serve_stdio handles requests line by line") {
    std::istringstream in(
        "{\"id\":1,\"method\":\"search\",\"params\":{\"query\":\"eigenvector linear\"}}\n"
        "\n"
        "{\"id\":2,\"method\":\"shutdown\"}\n"
        "{\"id\":3,\"method\":\"shutdown\"}\n");
    std::ostringstream out;
    CHECK(driver::serve_stdio(library(), in, out) == 0);
    std::istringstream replies(out.str());
    std::vector<json> got;
    for (std::string line; std::getline(replies, line);) got.push_back(json::parse(line));
    REQUIRE(got.size() == 2);
    CHECK(got[0]["result"]["results"].size() == 1);
    CHECK(got[1]["id"] == 2);
}
