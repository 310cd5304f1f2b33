#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "microproof/kernel/environment.h"
#include "microproof/kernel/expr.h"
#include "microproof/kernel/local_context.h"

namespace microproof::kernel {

enum class KernelErrorKind {
    UnboundVariable,
    UnknownConstant,
    AppTypeMismatch,
    NotAFunction,
    NotASort,
    TypeMismatch,
    DuplicateName,
    UnexpectedMVar,
    MalformedDeclaration,
};

std::string to_string(KernelErrorKind k);

class KernelError : public std::runtime_error {
public:
    KernelError(KernelErrorKind kind, std::string message, std::optional<Term> expected = std::nullopt,
                std::optional<Term> actual = std::nullopt)
        : std::runtime_error(std::move(message)),
          kind_(kind),
          expected_(std::move(expected)),
          actual_(std::move(actual)) {}

    KernelErrorKind kind() const { return kind_; }
    const std::optional<Term>& expected() const { return expected_; }
    const std::optional<Term>& actual() const { return actual_; }

private:
    KernelErrorKind kind_;
    std::optional<Term> expected_;
    std::optional<Term> actual_;
};

/// How much delta reduction is allowed.
enum class Transparency : std::uint8_t {
    All,        // reducible and default definitions
    Reducible,  // only @[reducible] definitions
    None,
};

/// Read access to metavariables for callers above the kernel. The kernel
/// proper never constructs one, so MVar-containing terms are rejected there.
class MetaView {
public:
    virtual ~MetaView() = default;
    virtual std::optional<Term> mvar_type(std::uint64_t id) const = 0;
    virtual std::optional<Term> mvar_assignment(std::uint64_t id) const = 0;
};

/// Type inference, weak head normalization and definitional equality.
/// All three are pure functions of (environment, local context, term).
class TypeChecker {
public:
    explicit TypeChecker(const Environment& env, LocalContext lctx = {}, const MetaView* meta = nullptr);

    const Environment& env() const { return env_; }
    LocalContext& lctx() { return lctx_; }
    const LocalContext& lctx() const { return lctx_; }

    /// Infers the type of `t`. With `infer_only`, argument types are not checked.
    Term infer(const Term& t, bool infer_only = false);
    /// Infers and whnf's the type, requiring a sort.
    SortKind ensure_sort(const Term& type);

    Term whnf_core(const Term& t);
    Term whnf(const Term& t, Transparency tr = Transparency::All);
    /// Unfolds the head constant once if `tr` permits; nullopt otherwise.
    std::optional<Term> unfold_head(const Term& t, Transparency tr = Transparency::All);

    bool is_def_eq(const Term& a, const Term& b);
    bool is_prop(const Term& type);
    bool is_proof(const Term& t);

    void set_transparency(Transparency tr) { transparency_ = tr; }

private:
    Term infer_core(const Term& t, bool infer_only);
    Term infer_app(const Term& t, bool infer_only);
    Term infer_binding(const Term& t, bool infer_only);
    Term instantiate_mvar_head(const Term& t) const;

    std::optional<bool> lazy_delta(Term& a, Term& b);
    bool def_eq_core(const Term& a, const Term& b);
    bool def_eq_args(const Term& a, const Term& b);
    bool can_unfold(const Declaration& d) const;

    const Environment& env_;
    LocalContext lctx_;
    const MetaView* meta_;
    Transparency transparency_ = Transparency::All;
    std::unordered_map<const Expr*, std::pair<Term, Term>> infer_cache_;
    std::map<std::pair<const Expr*, const Expr*>, std::pair<std::pair<Term, Term>, bool>> eq_cache_;
};

/// Checks `d` against `env` and returns the extended environment. Examples are
/// checked and discarded (the returned environment equals `env`).
Environment check_decl(const Environment& env, const Declaration& d);

/// True if the term mentions `sorryAx` or a declaration flagged as using sorry.
bool mentions_sorry(const Environment& env, const Term& t);

}  // namespace microproof::kernel
