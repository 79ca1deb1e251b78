#pragma once

#include <conelab/cone.hpp>

#include <string>

namespace conelab::runner {

// Presets: euclidean, cone:<a>, tanh:<a_in>:<a_out>, bump:<eps>, poly:<c1>:<c2>:...
// Throws std::invalid_argument on anything else.
WarpedModel make_model(const std::string& preset);

}  // namespace conelab::runner
