#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "microproof/driver/frontend.h"

namespace microproof::prelude {

using kernel::Declaration;
using kernel::Environment;

/// Default prelude directory: MICROPROOF_PRELUDE if set, else the build-time path.
std::filesystem::path default_root();

/// Maps a module name to its file name below the prelude root; `Mathlib.` is
/// read as `MiniLib.`.
std::string canonical_module(const std::string& name);

/// Loads `.mpl` modules from a directory tree. Each module is checked once on
/// top of its own imports; importing replays the checked declarations.
class Library : public driver::ImportResolver {
public:
    explicit Library(std::filesystem::path root);

    Environment import_module(const Environment& env, const std::string& name, const syntax::Span& span) override;

    /// Environment with every module below the root imported.
    Environment load_all(const syntax::Span& span = {});
    /// Module names found below the root.
    std::vector<std::string> modules() const;
    const std::filesystem::path& root() const { return root_; }

private:
    struct Compiled {
        std::vector<Declaration> decls;
        std::vector<std::string> imports;
    };

    const Compiled& compile(const std::string& module, const syntax::Span& span);
    Environment replay(const Environment& env, const std::string& module, const syntax::Span& span);

    std::filesystem::path root_;
    std::map<std::string, Compiled> cache_;
    std::set<std::string> loading_;
};

}  // namespace microproof::prelude
