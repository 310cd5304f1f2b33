#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microproof/elab/errors.h"
#include "microproof/kernel/environment.h"
#include "microproof/tactics/engine.h"

namespace microproof::driver {

using kernel::Environment;
using kernel::Term;
using syntax::Span;

struct Options {
    bool trace_simp = false;
    bool trace_module = false;
};

/// A declaration accepted by the kernel, closed over its variables.
struct CheckedDecl {
    std::string name;
    kernel::DeclKind kind = kernel::DeclKind::Example;
    Term type;
    std::optional<Term> value;
    Span span;
};

struct FileResult {
    std::shared_ptr<const Environment> env;
    std::vector<elab::Message> messages;
    std::vector<tactics::Snapshot> snapshots;
    std::vector<tactics::SearchRecord> searches;
    std::vector<std::string> trace;
    std::vector<CheckedDecl> decls;

    std::size_t error_count() const;
    std::size_t warning_count() const;
};

/// The state after the last tactic step whose span starts at or before `offset`.
const tactics::Snapshot* snapshot_at(const FileResult& r, std::uint32_t offset);

/// Resolves `import` commands. Throws ElabError (UnknownModule, ImportCycle).
class ImportResolver {
public:
    virtual ~ImportResolver() = default;
    virtual Environment import_module(const Environment& env, const std::string& name, const Span& span) = 0;
};

/// Elaborates and kernel-checks every command of a source file on top of `base`.
FileResult check_source(std::string_view source, const Environment& base, ImportResolver* resolver,
                        const Options& opts = {}, const std::string& module = "_user");

}  // namespace microproof::driver
