#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "sgntk/network.hpp"

namespace sgntk {

/// {"config": {...}, "layers": [{"weights": [row-major], "biases": [...]}, ...]}
/// Only built-in activations round-trip; the activation is stored by name.
std::string network_to_json(const Network& net);
Network network_from_json(std::string_view text);

/// "SGNTKNET", u32 format version, u64 header length, JSON config header,
/// then the flat layer-ordered parameters as little-endian doubles.
void write_network_binary(const Network& net, std::ostream& out);
Network read_network_binary(std::istream& in);

}  // namespace sgntk
