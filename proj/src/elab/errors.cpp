#include "microproof/elab/errors.h"

namespace microproof::elab {

std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorKind::UnknownModule: return "UnknownModule";
        case ErrorKind::ImportCycle: return "ImportCycle";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::InstanceResolutionFailed: return "InstanceResolutionFailed";
        case ErrorKind::InstanceDepthExceeded: return "InstanceDepthExceeded";
        case ErrorKind::FunctionExpected: return "FunctionExpected";
        case ErrorKind::InvalidField: return "InvalidField";
        case ErrorKind::UnsolvedMVars: return "UnsolvedMVars";
        case ErrorKind::CalcChainBroken: return "CalcChainBroken";
        case ErrorKind::UnsolvedGoals: return "UnsolvedGoals";
        case ErrorKind::NoGoals: return "NoGoals";
        case ErrorKind::IntroOnNonPi: return "IntroOnNonPi";
        case ErrorKind::ApplyUnifyFailure: return "ApplyUnifyFailure";
        case ErrorKind::ConstructorHeadUnknown: return "ConstructorHeadUnknown";
        case ErrorKind::BulletLeftGoalsOpen: return "BulletLeftGoalsOpen";
        case ErrorKind::RwNoMatch: return "RwNoMatch";
        case ErrorKind::RwMotiveIllTyped: return "RwMotiveIllTyped";
        case ErrorKind::SimpFailed: return "SimpFailed";
        case ErrorKind::SimpStepBudgetExceeded: return "SimpStepBudgetExceeded";
        case ErrorKind::ModuleNotEqual: return "ModuleNotEqual";
        case ErrorKind::NonCommutativeScalars: return "NonCommutativeScalars";
        case ErrorKind::NotModuleTyped: return "NotModuleTyped";
        case ErrorKind::SearchNoResult: return "SearchNoResult";
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::Kernel: return "KernelError";
        case ErrorKind::Unsupported: return "Unsupported";
    }
    return "Unknown";
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
    }
    return "error";
}

std::size_t MessageLog::error_count() const {
    std::size_t n = 0;
    for (const auto& m : messages_)
        if (m.severity == Severity::Error) ++n;
    return n;
}

}  // namespace microproof::elab
