#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "microproof/syntax/source.h"

namespace microproof::elab {

using syntax::Span;

enum class ErrorKind {
    UnknownIdentifier,
    UnknownModule,
    ImportCycle,
    TypeMismatch,
    InstanceResolutionFailed,
    InstanceDepthExceeded,
    FunctionExpected,
    InvalidField,
    UnsolvedMVars,
    CalcChainBroken,
    UnsolvedGoals,
    NoGoals,
    IntroOnNonPi,
    ApplyUnifyFailure,
    ConstructorHeadUnknown,
    BulletLeftGoalsOpen,
    RwNoMatch,
    RwMotiveIllTyped,
    SimpFailed,
    SimpStepBudgetExceeded,
    ModuleNotEqual,
    NonCommutativeScalars,
    NotModuleTyped,
    SearchNoResult,
    Syntax,
    Kernel,
    Unsupported,
};

std::string_view to_string(ErrorKind k);

/// A located elaboration or tactic failure. `goal_render` carries the tactic
/// state at the failure point when one exists.
class ElabError : public std::runtime_error {
public:
    ElabError(ErrorKind kind, std::string message, Span span, std::string goal_render = {})
        : std::runtime_error(std::move(message)), kind_(kind), span_(span), goal_render_(std::move(goal_render)) {}

    ErrorKind kind() const { return kind_; }
    const Span& span() const { return span_; }
    const std::string& goal_render() const { return goal_render_; }
    void set_span(Span s) { span_ = s; }
    void set_goal_render(std::string g) { goal_render_ = std::move(g); }

private:
    ErrorKind kind_;
    Span span_;
    std::string goal_render_;
};

enum class Severity { Error, Warning, Info };

std::string_view to_string(Severity s);

struct Message {
    Severity severity = Severity::Error;
    Span span;
    std::string text;
    std::string goal_render;
    ErrorKind kind = ErrorKind::Unsupported;  // meaningful for errors only
};

/// Append-only diagnostics sink shared by elaboration and tactics.
class MessageLog {
public:
    void error(const ElabError& e) { messages_.push_back({Severity::Error, e.span(), e.what(), e.goal_render(), e.kind()}); }
    void error(ErrorKind kind, std::string text, Span span, std::string goal = {}) {
        messages_.push_back({Severity::Error, span, std::move(text), std::move(goal), kind});
    }
    void warning(std::string text, Span span) { messages_.push_back({Severity::Warning, span, std::move(text), {}, {}}); }
    void info(std::string text, Span span) { messages_.push_back({Severity::Info, span, std::move(text), {}, {}}); }

    const std::vector<Message>& messages() const { return messages_; }
    std::size_t error_count() const;
    std::size_t size() const { return messages_.size(); }

private:
    std::vector<Message> messages_;
};

}  // namespace microproof::elab
