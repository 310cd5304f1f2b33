#pragma once

#include <optional>
#include <stdexcept>

#include "microproof/elab/meta.h"

namespace microproof::elab {

constexpr int kInstanceDepthLimit = 32;

class InstanceDepthExceeded : public std::runtime_error {
public:
    InstanceDepthExceeded() : std::runtime_error("maximum instance resolution depth reached") {}
};

enum class InstanceStatus { Success, Failure, Stuck };

struct InstanceResult {
    InstanceStatus status = InstanceStatus::Failure;
    Term value;
};

/// Depth-first search over local instances (most recent first) and then the
/// environment's instances in declaration order. Throws InstanceDepthExceeded
/// past kInstanceDepthLimit nested subgoals. Problems still containing
/// metavariables are reported as Stuck.
InstanceResult synthesize_instance(Meta& meta, const Term& type);

/// Whether `type` is an application of a class.
bool is_class_type(Meta& meta, const Term& type);

}  // namespace microproof::elab
