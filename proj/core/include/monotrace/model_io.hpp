#pragma once

#include "monotrace/model.hpp"

#include <string>

namespace monotrace {

// Model file: a 4-byte magic, a length-prefixed JSON header (metadata and
// configuration), then one length-prefixed little-endian f64 array per
// parameter tensor. The round trip is bit-exact.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path); // throws ModelError

} // namespace monotrace
