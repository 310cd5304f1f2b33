#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "microproof/elab/meta.h"

namespace microproof::rewriter {

using elab::Meta;
using elab::MetaContext;
using kernel::Environment;
using kernel::Term;

/// A rewrite rule source: a constant or local proof together with its type, a
/// telescope ending in an equation, an iff or some other proposition.
struct SimpRule {
    std::string name;
    Term proof;
    Term type;
    std::optional<std::uint64_t> hyp;  // local hypothesis the rule was built from
};

SimpRule rule_from_const(const Environment& env, const std::string& name);

/// Whether a statement can orient a rewrite: after its binders it must be an
/// equation, an iff or a proposition, and an equation may not rewrite a bare
/// metavariable.
bool usable_as_rule(Meta& meta, const Term& type);

/// Rules for the environment's simp set in environment order. Unusable entries
/// are skipped and reported in `rejected`.
std::vector<SimpRule> simp_set_rules(const Environment& env, std::vector<std::string>* rejected = nullptr);

struct SimpConfig {
    std::size_t max_steps = 10000;
    std::size_t max_depth = 64;
    std::size_t discharge_depth = 8;
    std::vector<std::string>* trace = nullptr;
    /// Limits congruence descent to applications whose head constant passes.
    std::function<bool(const std::string&)> descend;
};

/// `proof : input = expr`; no proof means nothing changed.
struct SimpResult {
    Term expr;
    std::optional<Term> proof;
};

/// Innermost-first rewriting to a fixpoint. At each subterm the rules are tried
/// in order; conditional premises are discharged by instance synthesis or by a
/// nested simp to `True`. Permutative rules fire only when they make the term
/// smaller in the total term order.
class Simplifier {
public:
    Simplifier(Meta& meta, std::vector<SimpRule> rules, SimpConfig cfg = {});

    SimpResult simp(const Term& e);
    std::size_t steps() const { return steps_; }

private:
    struct Prepared;
    SimpResult visit(const Term& e, std::size_t depth);
    SimpResult congr(const Term& e, std::size_t depth);
    std::optional<SimpResult> rewrite_root(const Term& e, std::size_t depth);
    std::optional<SimpResult> try_rule(const SimpRule& rule, const Term& e, std::size_t depth);
    bool discharge(const Term& prop, Term& proof, std::size_t depth);
    void tick();

    Meta& meta_;
    std::vector<SimpRule> rules_;
    SimpConfig cfg_;
    std::size_t steps_ = 0;
    std::size_t discharge_level_ = 0;
};

// Proof-term helpers shared with the `module` tactic.
Term mk_eq_refl(Meta& meta, const Term& a);
Term mk_eq_symm(Meta& meta, const Term& a, const Term& b, const Term& h);
Term mk_eq_trans(Meta& meta, const Term& a, const Term& b, const Term& c, const Term& p, const Term& q);
/// `congrArg motive h : motive a = motive b` for `h : a = b`.
Term mk_congr_arg(Meta& meta, const Term& motive, const Term& a, const Term& b, const Term& h);
/// Chains `a = b` and `b = c` results, either of which may be reflexivity.
SimpResult chain(Meta& meta, const Term& a, const SimpResult& first, const SimpResult& second);

/// Rewrites `e` itself with one rule, ignoring permutativity. Fails when the
/// rule does not match or leaves premises or data arguments open.
std::optional<SimpResult> rewrite_once(Meta& meta, const SimpRule& rule, const Term& e);

/// `rw`: rewrites every instance of the first match of the rule's left-hand side
/// in the target of `goal`. Returns the replacing goals: the rewritten goal
/// (omitted when it closes by reflexivity) followed by unsolved premises.
std::vector<std::uint64_t> rewrite_target(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                          const SimpRule& rule, bool reverse);

/// `simp`: returns the remaining goals (none when the target simplified to `True`).
std::vector<std::uint64_t> simp_target(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                       const std::vector<SimpRule>& rules, const SimpConfig& cfg);

/// `simp_all`: simplifies every propositional hypothesis with the others and then
/// the target, repeating until nothing changes.
std::vector<std::uint64_t> simp_all(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                    const std::vector<SimpRule>& rules, const SimpConfig& cfg);

}  // namespace microproof::rewriter
