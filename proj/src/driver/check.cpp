#include "microproof/driver/check.h"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "microproof/kernel/builtins.h"
#include "microproof/search/search.h"

namespace microproof::driver {

using elab::Severity;

std::string format_diagnostic(const elab::Message& m, const std::string& file) {
    std::string kind = m.severity == Severity::Error ? fmt::format("[{}]", elab::to_string(m.kind)) : "";
    std::string out = fmt::format("{}:{}:{}: {}{}: {}", file, m.span.begin.line, m.span.begin.col,
                                  elab::to_string(m.severity), kind, m.text);
    if (!m.goal_render.empty() && m.text.find(m.goal_render) == std::string::npos)
        out += "\n" + m.goal_render;
    return out;
}

nlohmann::json diagnostic_json(const elab::Message& m, const std::string& file) {
    auto pos = [](const syntax::Position& p) { return nlohmann::json{{"line", p.line}, {"col", p.col}}; };
    nlohmann::json j{{"severity", std::string(elab::to_string(m.severity))},
                     {"file", file},
                     {"span", {{"start", pos(m.span.begin)}, {"end", pos(m.span.end)}}},
                     {"message", m.text}};
    if (m.severity == Severity::Error) j["kind"] = std::string(elab::to_string(m.kind));
    if (!m.goal_render.empty()) j["goalRender"] = m.goal_render;
    return j;
}

FileResult check_text(std::string_view source, prelude::Library& lib, const Options& opts) {
    return check_source(source, kernel::builtin_environment(), &lib, opts);
}

int check_file(const std::filesystem::path& path, prelude::Library& lib, const CheckFlags& flags, std::ostream& out,
               std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << fmt::format("error: cannot read '{}'\n", path.string());
        return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    FileResult r = check_text(ss.str(), lib, {flags.trace_simp, flags.trace_module});
    for (const auto& line : r.trace) err << line << '\n';
    for (const auto& m : r.messages) {
        if (flags.json) {
            out << diagnostic_json(m, path.string()).dump() << '\n';
        } else {
            out << format_diagnostic(m, path.string()) << '\n';
        }
    }
    if (r.error_count() > 0) return 1;
    if (flags.strict && r.warning_count() > 0) return 1;
    return 0;
}

int run_search(const std::string& query, prelude::Library& lib, std::ostream& out) {
    Environment env = lib.load_all();
    for (const auto& hit : search::name_search(env, query)) out << hit.name << " : " << hit.signature << '\n';
    return 0;
}

}  // namespace microproof::driver
