#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "microproof/elab/meta.h"

namespace microproof::search {

using elab::MetaContext;
using kernel::Environment;
using kernel::Term;

struct Candidate {
    std::string display;  // `Module.End.mem_eigenspace_iff.mpr`
    Term fn;              // the constant, or Iff.mp/Iff.mpr applied to it
    Term type;
};

/// Candidates keyed by the head constant of their conclusion. Iff-valued
/// declarations also contribute `.mp` and `.mpr` candidates.
class HeadIndex {
public:
    explicit HeadIndex(const Environment& env);
    const std::vector<Candidate>& lookup(const std::string& head) const;
    std::size_t size() const;

private:
    std::map<std::string, std::vector<Candidate>> by_head_;
};

/// `exact?`: ranked `exact …` suggestions that close `goal`, fewest premises first.
/// The goal is left unassigned.
std::vector<std::string> exact_search(const Environment& env, MetaContext& mctx, std::uint64_t goal,
                                      const HeadIndex& index);

struct NameHit {
    std::string name;
    std::string signature;
};

/// Case-insensitive all-words match against the camel-case words of each name.
std::vector<NameHit> name_search(const Environment& env, const std::string& query);

}  // namespace microproof::search
