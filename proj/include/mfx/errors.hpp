#pragma once

#include <stdexcept>
#include <string>

namespace mfx {

/// Data-dependent degeneracy: constant series, zero variance, zero
/// denominators, all segments excluded. Distinct from contract violations,
/// which throw std::invalid_argument.
class DegenerateInput : public std::runtime_error {
public:
    explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

/// File or format problem while reading/writing artifacts.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mfx
