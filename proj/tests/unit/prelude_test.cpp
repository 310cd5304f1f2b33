#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "fixtures.h"
#include "microproof/kernel/builtins.h"
#include "microproof/kernel/type_checker.h"
#include "microproof/rewriter/simp.h"
#include "test_util.h"

using namespace microproof;
using fixtures::check;
using fixtures::has_error;
using fixtures::library;

namespace {

std::vector<std::string> decl_names(const kernel::Environment& env) {
    std::vector<std::string> out;
    for (const auto& d : env.decls()) out.push_back(d->name);
    return out;
}

/// A copy of the prelude tree with one textual edit applied to one file.
class EditedPrelude {
public:
    EditedPrelude(const std::string& file, const std::string& from, const std::string& to) {
        root_ = std::filesystem::temp_directory_path() / ("microproof-prelude-" + std::to_string(std::rand()));
        std::filesystem::copy(prelude::default_root(), root_, std::filesystem::copy_options::recursive);
        auto path = root_ / file;
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), {});
        in.close();
        std::ofstream(path) << test_util::replace_first(text, from, to);
    }
    ~EditedPrelude() {
        std::error_code ec;
        std::filesystem::remove_all(root_, ec);
    }
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

}  // namespace

TEST_CASE("every prelude module checks without messages") {
    for (const auto& module : library().modules()) {
        auto r = check("import " + module + "\n");
        CHECK_MESSAGE(r.messages.empty(), module, ": ", fixtures::messages(r));
    }
}

TEST_CASE("the manifest is the six-module import chain") {
    auto modules = library().modules();
    std::vector<std::string> want{"MiniLib.Algebra",
                                  "MiniLib.LinearAlgebra.Eigenspace",
                                  "MiniLib.LinearAlgebra.LinearIndependent",
                                  "MiniLib.LinearAlgebra.LinearMap",
                                  "MiniLib.Logic",
                                  "MiniLib.Module"};
    std::sort(modules.begin(), modules.end());
    CHECK(modules == want);

    auto env = library().import_module(kernel::builtin_environment(), "MiniLib.LinearAlgebra.LinearIndependent", {});
    for (const auto& m : want) CHECK_MESSAGE(env.import_closure().count(m) == 1, m);
}

TEST_CASE("Mathlib spelling resolves to MiniLib") {
    CHECK(prelude::canonical_module("Mathlib.LinearAlgebra.LinearIndependent") ==
          "MiniLib.LinearAlgebra.LinearIndependent");
    CHECK(prelude::canonical_module("MiniLib.Module") == "MiniLib.Module");
    auto r = check("import Mathlib.LinearAlgebra.LinearIndependent\n"
                   "example {ι R M : Type} [Ring R] [AddCommGroup M] [Module R M] (v : ι → M) "
                   "(h : LinearIndependent R v) : LinearIndependent R v := h\n");
    CHECK(r.messages.empty());
}

TEST_CASE("unknown modules and import cycles are reported") {
    auto r = check("import MiniLib.Nonexistent\n");
    CHECK(has_error(r, elab::ErrorKind::UnknownModule));

    auto dir = std::filesystem::temp_directory_path() / "microproof-cycle";
    std::filesystem::create_directories(dir / "Cyc");
    std::ofstream(dir / "Cyc" / "A.mpl") << "import Cyc.B\n";
    std::ofstream(dir / "Cyc" / "B.mpl") << "import Cyc.A\n";
    prelude::Library lib(dir);
    auto cyc = driver::check_text("import Cyc.A\n", lib);
    CHECK(has_error(cyc, elab::ErrorKind::ImportCycle));
    std::filesystem::remove_all(dir);
}

TEST_CASE("importing twice is idempotent and loading is deterministic") {
    auto base = kernel::builtin_environment();
    auto once = library().import_module(base, "MiniLib.Module", {});
    auto twice = library().import_module(once, "MiniLib.Module", {});
    CHECK(decl_names(once) == decl_names(twice));

    prelude::Library fresh(prelude::default_root());
    auto a = library().load_all();
    auto b = fresh.load_all();
    REQUIRE(decl_names(a) == decl_names(b));
    for (const auto& d : a.decls()) {
        const auto* other = b.find(d->name);
        REQUIRE(other);
        CHECK(kernel::alpha_eq(d->type, other->type));
    }
}

TEST_CASE("no prelude declaration depends on sorry") {
    auto env = library().load_all();
    for (const auto& d : env.decls()) {
        CHECK_FALSE_MESSAGE(d->uses_sorry, d->name);
        if (d->value) CHECK_FALSE_MESSAGE(kernel::mentions_sorry(env, *d->value), d->name);
    }
}

TEST_CASE("mem_eigenspace_iff is proved, the eigenvector theorem is an axiom") {
    auto env = library().load_all();
    const auto* mem = env.find("Module.End.mem_eigenspace_iff");
    REQUIRE(mem);
    CHECK(mem->kind == kernel::DeclKind::Theorem);
    const auto* eig = env.find("Module.End.eigenvectors_linearIndependent'");
    REQUIRE(eig);
    CHECK(eig->kind == kernel::DeclKind::Axiom);
    const auto* li = env.find("LinearIndependent");
    REQUIRE(li);
    CHECK(li->reducibility == kernel::Reducibility::Opaque);
}

TEST_CASE("the simp set is the seventeen tagged lemmas") {
    auto env = library().load_all();
    std::vector<std::string> rejected;
    auto rules = rewriter::simp_set_rules(env, &rejected);
    std::set<std::string> names;
    for (const auto& r : rules) names.insert(r.name);
    std::set<std::string> want{"map_add",  "map_smul", "map_zero", "smul_eq_zero",     "zero_smul", "zero_add",
                               "add_zero", "smul_zero", "sub_self", "sub_zero",        "eq_self_iff_true",
                               "and_true", "true_and", "or_false", "false_or",         "not_true", "ne_eq"};
    CHECK(names == want);
    CHECK(rejected.empty());
}

TEST_CASE("simp attribute on a non-proposition is a warning and is ignored") {
    auto r = check("import MiniLib.Logic\n@[simp] axiom junk : Type\n");
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages[0].severity == elab::Severity::Warning);
    CHECK(rewriter::simp_set_rules(*r.env).size() == rewriter::simp_set_rules(*check("import MiniLib.Logic\n").env).size());
}

TEST_CASE("ablation: without smul_eq_zero in the simp set the flagship does not close") {
    EditedPrelude edited("MiniLib/Module.mpl", "@[simp] axiom smul_eq_zero", "axiom smul_eq_zero");
    prelude::Library lib(edited.root());
    auto r = driver::check_text(test_util::read_corpus("flagship.mpl"), lib);
    CHECK(r.error_count() > 0);
    auto full = check(test_util::read_corpus("flagship.mpl"));
    CHECK(full.messages.empty());
}
