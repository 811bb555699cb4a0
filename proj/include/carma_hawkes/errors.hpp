#pragma once

#include <stdexcept>
#include <string>

namespace carma_hawkes {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally malformed model specification (bad orders, non-finite or
// out-of-range coefficients).
class InvalidSpec : public Error {
public:
    using Error::Error;
};

class SpectralError : public Error {
public:
    using Error::Error;
};

// Two roots of the characteristic polynomial closer than the distinctness
// tolerance: the companion matrix is treated as non-diagonalizable.
class DegenerateEigenvalues : public SpectralError {
public:
    using SpectralError::SpectralError;
};

class RootFindingFailure : public SpectralError {
public:
    using SpectralError::SpectralError;
};

class NumericalOverflow : public SpectralError {
public:
    using SpectralError::SpectralError;
};

// Intensity fell below the baseline for a spec that passed validation.
class NegativeIntensity : public Error {
public:
    using Error::Error;
};

class HorizonNonPositive : public Error {
public:
    using Error::Error;
};

class NonStationarySpec : public Error {
public:
    using Error::Error;
};

// The exact intensity exceeded the dominating bound during thinning.
class BoundViolation : public Error {
public:
    using Error::Error;
};

class SpecLogMismatch : public Error {
public:
    using Error::Error;
};

class EmptySample : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace carma_hawkes
