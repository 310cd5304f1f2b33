#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "microproof/kernel/expr.h"
#include "microproof/kernel/local_context.h"
#include "microproof/kernel/type_checker.h"

namespace microproof::elab {

using kernel::LocalContext;
using kernel::Term;

enum class MVarKind : std::uint8_t {
    Natural,    // solvable by unification (`_`, implicit arguments)
    Instance,   // pending instance-implicit argument
    Goal,       // proof obligation owned by the tactic framework
};

struct MVarDecl {
    std::uint64_t id = 0;
    Term type;
    LocalContext lctx;
    std::string user_name;  // shown as `?name`; empty for anonymous
    MVarKind kind = MVarKind::Natural;
    std::size_t creation_index = 0;
};

/// `?m := fun fvars => ?inner`, materialized once `?inner` is fully assigned.
struct DelayedAssignment {
    std::vector<std::uint64_t> fvars;
    std::uint64_t inner = 0;
};

/// Metavariable declarations and assignments, with an undo trail so that
/// failed unification attempts can be rolled back.
class MetaContext : public kernel::MetaView {
public:
    Term new_mvar(Term type, LocalContext lctx, std::string user_name = {}, MVarKind kind = MVarKind::Natural);

    const MVarDecl* decl(std::uint64_t id) const;
    const MVarDecl& get(std::uint64_t id) const;
    bool is_assigned(std::uint64_t id) const;
    bool is_delayed_assigned(std::uint64_t id) const { return delayed_.count(id) != 0; }
    std::optional<Term> assignment(std::uint64_t id) const;

    void assign(std::uint64_t id, Term value);
    void assign_delayed(std::uint64_t id, std::vector<std::uint64_t> fvars, std::uint64_t inner);
    void set_user_name(std::uint64_t id, std::string name);
    void set_kind(std::uint64_t id, MVarKind kind);

    /// Replaces every assigned metavariable (transitively) and beta-reduces the
    /// resulting `(fun x => b) a` heads.
    Term instantiate(const Term& t) const;
    /// Unassigned metavariables occurring in `t` after instantiation, in order of first occurrence.
    std::vector<std::uint64_t> unassigned_in(const Term& t) const;
    bool has_unassigned(const Term& t) const { return !unassigned_in(t).empty(); }

    using Checkpoint = std::size_t;
    Checkpoint checkpoint() const { return trail_.size(); }
    void rollback(Checkpoint cp);

    std::vector<std::uint64_t> creation_order() const { return order_; }

    // kernel::MetaView
    std::optional<Term> mvar_type(std::uint64_t id) const override;
    std::optional<Term> mvar_assignment(std::uint64_t id) const override;

private:
    struct TrailEntry {
        enum class Op { Assign, Delayed, Rename, Kind } op;
        std::uint64_t id;
        std::string old_name;
        MVarKind old_kind = MVarKind::Natural;
    };

    std::unordered_map<std::uint64_t, MVarDecl> decls_;
    std::unordered_map<std::uint64_t, Term> assignments_;
    std::unordered_map<std::uint64_t, DelayedAssignment> delayed_;
    std::vector<std::uint64_t> order_;
    std::vector<TrailEntry> trail_;
};

}  // namespace microproof::elab
