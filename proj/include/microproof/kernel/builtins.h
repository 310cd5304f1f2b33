#pragma once

#include "microproof/kernel/environment.h"

namespace microproof::kernel {

/// The hardcoded logic every environment starts from: Eq (refl, rec), True,
/// False (elim), And, Or, Iff, Not and sorryAx. Declared under module "Init".
Environment builtin_environment();

}  // namespace microproof::kernel
