#pragma once

#include <algorithm>
#include <string>

#include "microproof/driver/check.h"
#include "microproof/elab/elaborator.h"
#include "microproof/elab/printer.h"
#include "microproof/syntax/parser.h"

namespace fixtures {

namespace driver = microproof::driver;
namespace elab = microproof::elab;
namespace kernel = microproof::kernel;
namespace syntax = microproof::syntax;

using microproof::driver::FileResult;
using microproof::elab::ErrorKind;
using microproof::elab::Severity;

inline microproof::prelude::Library& library() {
    static microproof::prelude::Library lib(microproof::prelude::default_root());
    return lib;
}

inline FileResult check(const std::string& text, const microproof::driver::Options& opts = {}) {
    return microproof::driver::check_text(text, library(), opts);
}

inline bool has_error(const FileResult& r, ErrorKind kind) {
    return std::any_of(r.messages.begin(), r.messages.end(),
                       [&](const auto& m) { return m.severity == Severity::Error && m.kind == kind; });
}

inline std::string messages(const FileResult& r) {
    std::string out;
    for (const auto& m : r.messages) out += microproof::driver::format_diagnostic(m, "test.mpl") + "\n";
    return out;
}

inline constexpr const char* kModuleHeader =
    "import MiniLib.LinearAlgebra.LinearIndependent\n"
    "variable {R M : Type} [CommRing R] [AddCommGroup M] [Module R M]\n";

/// Elaborates the statement of the last command of `source` in its binder context.
struct Statement {
    explicit Statement(const std::string& source) : result(check(source)), meta(*result.env, mctx) {
        auto parsed = syntax::parse_file(source);
        const auto& cmd = parsed.commands.back();
        elab::MessageLog log;
        elab::Elaborator el(meta, log);
        for (const auto& c : parsed.commands)
            if (c.kind == syntax::CommandKind::Variable) el.elab_binders(c.binders);
        el.elab_binders(cmd.binders);
        type = el.elab_type(cmd.type);
        el.synthesize_pending(true);
        type = meta.instantiate(type);
    }
    std::string render(const kernel::Term& t) const { return elab::Printer(*result.env, &mctx).term(t, meta.lctx()); }

    driver::FileResult result;
    elab::MetaContext mctx;
    elab::Meta meta;
    kernel::Term type;
};

}  // namespace fixtures
