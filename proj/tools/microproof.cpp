#include <iostream>

#include "CLI11.hpp"
#include "microproof/driver/check.h"
#include "microproof/driver/server.h"

using namespace microproof;

int main(int argc, char** argv) {
    CLI::App app{"microproof"};
    app.require_subcommand(1);

    std::string prelude_path;
    app.add_option("--prelude-path", prelude_path, "prelude directory")->envname("MICROPROOF_PRELUDE");

    driver::CheckFlags flags;
    std::string file;
    auto* check = app.add_subcommand("check", "check a .mpl file");
    check->add_option("file", file)->required();
    check->add_flag("--json", flags.json, "one JSON diagnostic per line");
    check->add_flag("--strict", flags.strict, "treat warnings as errors");
    check->add_flag("--trace-simp", flags.trace_simp, "print simp rewrites to stderr");
    check->add_flag("--trace-module", flags.trace_module, "print module normal forms to stderr");
    check->add_option("--prelude-path", prelude_path, "prelude directory")->envname("MICROPROOF_PRELUDE");

    std::vector<std::string> words;
    auto* search = app.add_subcommand("search", "search declaration names");
    search->add_option("query", words)->required();
    search->add_option("--prelude-path", prelude_path, "prelude directory")->envname("MICROPROOF_PRELUDE");

    int port = 0;
    auto* serve = app.add_subcommand("serve", "run the session server");
    serve->add_option("--port", port, "TCP port (stdio when omitted)");
    serve->add_option("--prelude-path", prelude_path, "prelude directory")->envname("MICROPROOF_PRELUDE");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : 2;
    }

    prelude::Library lib(prelude_path.empty() ? prelude::default_root() : std::filesystem::path(prelude_path));
    try {
        if (*check) return driver::check_file(file, lib, flags, std::cout, std::cerr);
        if (*search) {
            std::string query;
            for (const auto& w : words) query += (query.empty() ? "" : " ") + w;
            return driver::run_search(query, lib, std::cout);
        }
        if (*serve) return port > 0 ? driver::serve_tcp(lib, port) : driver::serve_stdio(lib, std::cin, std::cout);
    } catch (const elab::ElabError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
