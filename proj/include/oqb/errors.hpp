#pragma once

#include <stdexcept>
#include <string>

namespace oqb {

// Base class for every library error so callers can catch the whole family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonHermitianInput : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct DimensionTooLarge : Error {
    using Error::Error;
};
struct NegativeRate : Error {
    using Error::Error;
};
struct InvalidAmplitudes : Error {
    using Error::Error;
};

// Propagation failures carry the time at which the guard tripped.
struct PhysicalityViolation : Error {
    double time;
    double magnitude;
    PhysicalityViolation(const std::string& what, double t, double mag)
        : Error(what), time(t), magnitude(mag) {}
};
struct ToleranceFailure : Error {
    using Error::Error;
};
struct NonzeroRates : Error {
    using Error::Error;
};

// Eigenstate tracking / phase extraction.
struct InitialStateNotPure : Error {
    using Error::Error;
};
struct BranchAmbiguity : Error {
    double time;
    double separation;
    BranchAmbiguity(const std::string& what, double t, double sep)
        : Error(what), time(t), separation(sep) {}
};
struct OrthogonalNeighbors : Error {
    double time;
    OrthogonalNeighbors(const std::string& what, double t) : Error(what), time(t) {}
};
struct GridMismatch : Error {
    using Error::Error;
};

// Experiment layer.
struct UnknownFigure : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace oqb
