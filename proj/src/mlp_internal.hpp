#pragma once

#include <span>
#include <vector>

#include "geocert/model.hpp"

namespace geocert::detail {

// Forward pass keeping the post-activation values of every layer;
// acts[0] = x and acts.back() are the logits.
void forward_cached(const MlpParams& p, std::span<const double> x, std::vector<Vec>& acts);

}  // namespace geocert::detail
