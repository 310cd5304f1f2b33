#pragma once

// Re-checks accepted proofs with the kernel alone and mutates proof terms.

#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "microproof/driver/frontend.h"
#include "microproof/kernel/type_checker.h"

namespace recheck {

using microproof::kernel::Environment;
using microproof::kernel::Term;

/// True when `value` has type `type` according to a fresh kernel type checker.
inline bool kernel_accepts(const Environment& env, const Term& type, const Term& value) {
    try {
        microproof::kernel::TypeChecker tc(env);
        tc.infer(type);
        return tc.is_def_eq(tc.infer(value), type);
    } catch (const microproof::kernel::KernelError&) {
        return false;
    }
}

/// Subterm positions are numbered in pre-order over the term tree (shared
/// subterms counted once per occurrence).
class Positions {
public:
    explicit Positions(Term root) : root_(std::move(root)) {}

    std::uint64_t count() { return size(root_); }
    Term at(std::uint64_t k) { return at(root_, k); }
    Term replace_at(std::uint64_t k, const Term& with) { return replace_at(root_, k, with); }

private:
    std::uint64_t size(const Term& t) {
        if (auto it = sizes_.find(t.get()); it != sizes_.end()) return it->second;
        std::uint64_t n = 1;
        if (t->is_app()) n += size(t->fn()) + size(t->arg());
        if (t->is_binding()) n += size(t->binder_type()) + size(t->body());
        sizes_[t.get()] = n;
        return n;
    }
    const Term& first(const Term& t) { return t->is_app() ? t->fn() : t->binder_type(); }
    const Term& second(const Term& t) { return t->is_app() ? t->arg() : t->body(); }

    Term at(const Term& t, std::uint64_t k) {
        if (k == 0) return t;
        std::uint64_t a = size(first(t));
        return k - 1 < a ? at(first(t), k - 1) : at(second(t), k - 1 - a);
    }
    Term replace_at(const Term& t, std::uint64_t k, const Term& with) {
        if (k == 0) return with;
        std::uint64_t a = size(first(t));
        Term x = first(t), y = second(t);
        if (k - 1 < a) {
            x = replace_at(x, k - 1, with);
        } else {
            y = replace_at(y, k - 1 - a, with);
        }
        if (t->is_app()) return microproof::kernel::mk_app(x, y);
        return microproof::kernel::mk_binding(t->kind(), t->name(), x, y, t->binder_mode());
    }

    Term root_;
    std::unordered_map<const void*, std::uint64_t> sizes_;
};

/// One random node swap: the subterm at one position is replaced by a
/// structurally different subterm taken from another position.
inline std::optional<Term> mutate(const Term& t, std::mt19937_64& rng) {
    Positions pos(t);
    if (pos.count() < 2) return std::nullopt;
    std::uniform_int_distribution<std::uint64_t> pick(0, pos.count() - 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::uint64_t i = pick(rng), j = pick(rng);
        Term with = pos.at(j);
        if (microproof::kernel::alpha_eq(pos.at(i), with)) continue;
        return pos.replace_at(i, with);
    }
    return std::nullopt;
}

}  // namespace recheck
