#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "microproof/elab/meta_context.h"
#include "microproof/kernel/environment.h"

namespace microproof::elab {

/// Renders kernel terms back into surface notation: implicit and instance
/// arguments are hidden, operators are printed infix, linear-map application
/// is printed as plain application and metavariables as `?name`.
class Printer {
public:
    explicit Printer(const kernel::Environment& env, const MetaContext* mctx = nullptr);

    std::string term(const Term& t, const LocalContext& lctx) const;
    /// Context lines (like-typed consecutive hypotheses grouped, instance
    /// binders hidden) followed by `⊢ target`.
    std::string goal(std::uint64_t mvar) const;
    std::string goal(const LocalContext& lctx, const Term& target) const;
    /// `no goals`, a single goal, or `goal k of n` sections separated by blank lines.
    std::string goals(const std::vector<std::uint64_t>& goals) const;

private:
    struct Out {
        std::string text;
        int prec;
    };
    struct Scope {
        const LocalContext* lctx;
        std::unordered_map<std::uint64_t, std::string> fvar_names;
        std::vector<std::string> bound;  // innermost last
    };

    Out pp(const Term& t, Scope& s) const;
    Out pp_app(const Term& t, Scope& s) const;
    Out pp_binding(const Term& t, Scope& s) const;
    std::string paren(const Out& o, int prec) const;
    std::string fresh_name(const std::string& base, const Term& body, const Scope& s) const;
    std::string mvar_name(std::uint64_t id) const;
    Scope scope_for(const LocalContext& lctx) const;
    std::vector<bool> explicit_mask(const Term& fn, std::size_t nargs, const Scope& s) const;
    Term type_of_head(const Term& fn, const Scope& s) const;

    const kernel::Environment& env_;
    const MetaContext* mctx_;
};

}  // namespace microproof::elab
