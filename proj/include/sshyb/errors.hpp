#pragma once

#include <stdexcept>
#include <string>

namespace sshyb {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Covariance model that stays numerically unusable even after diagonal loading.
struct SingularModel : Error {
    explicit SingularModel(const std::string& what) : Error(what) {}
};

// Mismatched channel counts, band counts, or vector lengths.
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

// Violated argument contract (empty input, out-of-range parameter, ...).
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// Malformed file content (wav, ATF1/WDC1 container, config/scene JSON).
struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(what) {}
};

}  // namespace sshyb
