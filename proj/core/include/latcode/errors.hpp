#pragma once

#include <stdexcept>
#include <string>

namespace latcode {

// A lattice/code definition violates one of its structural constraints
// (e.g. a shaping generator whose columns are not integer multiples of
// their diagonal entry).
class specification_error : public std::invalid_argument {
 public:
  explicit specification_error(const std::string& what) : std::invalid_argument(what) {}
};

// Randomized construction could not satisfy its structural requirements
// (degree too large for the requested size, etc.).
class construction_error : public std::runtime_error {
 public:
  explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

// Data reaching an inverse mapping is not something the forward mapping
// could have produced; signals a decoding failure upstream.
class corruption_error : public std::runtime_error {
 public:
  explicit corruption_error(const std::string& what) : std::runtime_error(what) {}
};

// A prefix-coded bit stream ended in the middle of a codeword.
class truncation_error : public std::runtime_error {
 public:
  explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

// Parameters put a formula outside its usable numerical regime.
class numerical_regime_error : public std::runtime_error {
 public:
  explicit numerical_regime_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace latcode
