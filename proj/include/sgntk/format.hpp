#pragma once

#include <string>

namespace sgntk {

/// Round-trip decimal form of a double (%.17g).
std::string format_real(double v);

}  // namespace sgntk
