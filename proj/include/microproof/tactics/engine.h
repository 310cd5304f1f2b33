#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "microproof/elab/elaborator.h"
#include "microproof/elab/meta_context.h"

namespace microproof::search {
class HeadIndex;
}

namespace microproof::tactics {

using elab::ElabError;
using elab::MessageLog;
using elab::MetaContext;
using kernel::Environment;
using kernel::Term;
using syntax::Span;

using Goals = std::vector<std::uint64_t>;

/// The proof state after one tactic step.
struct Snapshot {
    Span span;
    std::shared_ptr<const Environment> env;
    std::shared_ptr<const MetaContext> mctx;
    Goals goals;

    std::string render() const;
};

struct SearchRecord {
    Span span;
    std::vector<std::string> suggestions;
};

struct Config {
    bool trace_simp = false;
    bool trace_module = false;
    std::vector<std::string>* trace = nullptr;
};

/// Runs tactic blocks over a shared metavariable context. A failing tactic is
/// logged, the remaining goals are admitted and the block stops; goals left
/// open at the end of a block are reported as unsolved.
class Engine : public elab::TacticHost {
public:
    Engine(std::shared_ptr<const Environment> env, MetaContext& mctx, MessageLog& log, Config cfg = {});
    ~Engine() override;

    /// Runs the tactic proof of a declaration against the goal metavariable.
    void run(const syntax::TacticBlock& block, std::uint64_t goal, const Span& by_span);
    Term run_nested(elab::Elaborator& el, const syntax::TacticBlock& block, const Term& expected,
                    const Span& by_span) override;

    /// Applies one tactic to `goals` (throws ElabError).
    void step(const syntax::TacticSyntax& tac, Goals& goals);

    bool used_sorry() const { return used_sorry_; }
    const Span& sorry_span() const { return sorry_span_; }
    std::vector<Snapshot>& snapshots() { return snapshots_; }
    std::vector<SearchRecord>& searches() { return searches_; }
    std::string render(const Goals& goals) const;

private:
    bool run_block(const syntax::TacticBlock& block, Goals& goals, const Span& report_span, bool whole_span,
                   elab::ErrorKind open_kind);
    void record(const Span& span, const Goals& goals);
    void admit(Goals& goals);
    void prune(Goals& goals) const;
    Term target(std::uint64_t goal) const;
    const search::HeadIndex& index();

    void intro(const syntax::TacticSyntax& tac, Goals& goals);
    void exact(const syntax::TermPtr& stx, Goals& goals, const Span& span);
    void apply(const syntax::TacticSyntax& tac, Goals& goals);
    void constructor(const syntax::TacticSyntax& tac, Goals& goals);
    void have(const syntax::TacticSyntax& tac, Goals& goals);
    void sorry(const syntax::TacticSyntax& tac, Goals& goals);
    void bullet(const syntax::TacticSyntax& tac, Goals& goals);
    void rfl(const syntax::TacticSyntax& tac, Goals& goals);
    void assumption(const syntax::TacticSyntax& tac, Goals& goals);
    void rewrite(const syntax::TacticSyntax& tac, Goals& goals);
    void simp(const syntax::TacticSyntax& tac, Goals& goals, bool all);
    void module(const syntax::TacticSyntax& tac, Goals& goals);
    void exact_search(const syntax::TacticSyntax& tac, Goals& goals);

    std::shared_ptr<const Environment> env_;
    MetaContext& mctx_;
    MessageLog& log_;
    Config cfg_;
    bool used_sorry_ = false;
    Span sorry_span_;
    std::vector<Snapshot> snapshots_;
    std::vector<SearchRecord> searches_;
    std::unique_ptr<search::HeadIndex> index_;
};

}  // namespace microproof::tactics
