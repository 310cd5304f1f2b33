#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "microproof/driver/frontend.h"
#include "microproof/prelude/library.h"

namespace microproof::driver {

/// `file:line:col: severity[Kind]: message`, followed by the goal render when present.
std::string format_diagnostic(const elab::Message& m, const std::string& file);
nlohmann::json diagnostic_json(const elab::Message& m, const std::string& file);

/// Checks `source` against the builtin environment, resolving imports in `lib`.
FileResult check_text(std::string_view source, prelude::Library& lib, const Options& opts = {});

struct CheckFlags {
    bool json = false;
    bool strict = false;
    bool trace_simp = false;
    bool trace_module = false;
};

/// Exit code 0 (accepted), 1 (errors, or warnings under `strict`) or 2 (unreadable file).
int check_file(const std::filesystem::path& path, prelude::Library& lib, const CheckFlags& flags, std::ostream& out,
               std::ostream& err);

/// `name : signature` lines for `search`.
int run_search(const std::string& query, prelude::Library& lib, std::ostream& out);

}  // namespace microproof::driver
