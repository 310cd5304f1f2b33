#include "microproof/prelude/library.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "microproof/kernel/builtins.h"
#include "microproof/kernel/type_checker.h"
#include "microproof/syntax/parser.h"

namespace microproof::prelude {

using elab::ElabError;
using elab::ErrorKind;

std::filesystem::path default_root() {
    if (const char* env = std::getenv("MICROPROOF_PRELUDE"); env && *env) return env;
    return MICROPROOF_DEFAULT_PRELUDE;
}

std::string canonical_module(const std::string& name) {
    const std::string mathlib = "Mathlib.";
    if (name == "Mathlib") return "MiniLib";
    if (name.rfind(mathlib, 0) == 0) return "MiniLib." + name.substr(mathlib.size());
    return name;
}

Library::Library(std::filesystem::path root) : root_(std::move(root)) {}

std::vector<std::string> Library::modules() const {
    std::vector<std::string> out;
    std::error_code ec;
    for (auto it = std::filesystem::recursive_directory_iterator(root_, ec);
         !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (!it->is_regular_file() || it->path().extension() != ".mpl") continue;
        auto rel = std::filesystem::relative(it->path(), root_).replace_extension();
        std::string name;
        for (const auto& part : rel) name += (name.empty() ? "" : ".") + part.string();
        out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

const Library::Compiled& Library::compile(const std::string& module, const syntax::Span& span) {
    if (auto it = cache_.find(module); it != cache_.end()) return it->second;
    if (loading_.count(module)) throw ElabError(ErrorKind::ImportCycle, "import cycle through '" + module + "'", span);

    std::filesystem::path path = root_;
    std::stringstream parts(module);
    for (std::string seg; std::getline(parts, seg, '.');) path /= seg;
    path += ".mpl";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ElabError(ErrorKind::UnknownModule, "unknown module '" + module + "'", span);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string source = ss.str();

    loading_.insert(module);
    driver::FileResult r;
    try {
        r = driver::check_source(source, kernel::builtin_environment(), this, {}, module);
    } catch (...) {
        loading_.erase(module);
        throw;
    }
    loading_.erase(module);
    for (const auto& m : r.messages) {
        if (m.severity != elab::Severity::Error) continue;
        if (m.kind == ErrorKind::ImportCycle || m.text.rfind("module '", 0) == 0) throw ElabError(m.kind, m.text, span);
        throw ElabError(ErrorKind::Kernel,
                        fmt::format("module '{}' failed to check: {}:{}: {}", module, m.span.begin.line,
                                    m.span.begin.col, m.text),
                        span);
    }

    Compiled c;
    for (const auto& d : r.env->decls())
        if (d->module == module) c.decls.push_back(*d);
    for (const auto& cmd : syntax::parse_file(source).commands)
        if (cmd.kind == syntax::CommandKind::Import) c.imports.push_back(canonical_module(cmd.module));
    return cache_.emplace(module, std::move(c)).first->second;
}

Environment Library::replay(const Environment& env, const std::string& module, const syntax::Span& span) {
    if (env.import_closure().count(module)) return env;
    const Compiled& c = compile(module, span);
    Environment out = env;
    for (const auto& imp : c.imports) out = replay(out, imp, span);
    for (const auto& d : c.decls) {
        out = kernel::check_decl(out, d);
    }
    return out.with_import(module);
}

Environment Library::import_module(const Environment& env, const std::string& name, const syntax::Span& span) {
    return replay(env, canonical_module(name), span);
}

Environment Library::load_all(const syntax::Span& span) {
    Environment env = kernel::builtin_environment();
    for (const auto& m : modules()) env = replay(env, m, span);
    return env;
}

}  // namespace microproof::prelude
