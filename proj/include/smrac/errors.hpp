#pragma once

#include <stdexcept>
#include <string>

namespace smrac {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Matrix failed the Hurwitz requirement (Lyapunov equation has no PD solution).
struct NotHurwitz : Error {
    using Error::Error;
};

/// Input matrix is (numerically) rank deficient.
struct RankDeficient : Error {
    using Error::Error;
};

/// Linear system could not be solved (pivot collapsed).
struct SingularMatrix : Error {
    using Error::Error;
};

/// A state or derivative stopped being finite during integration.
struct NumericalBlowup : Error {
    using Error::Error;
};

/// Matching condition (reference-model assumption) violated by the scenario.
struct MatchingInfeasible : Error {
    using Error::Error;
};

/// Excitation-dependent quantity queried before the subsystem reached IIE.
struct NotYetExcited : Error {
    using Error::Error;
};

/// Decay fit requested before all subsystems reached IIE.
struct IIEIncomplete : Error {
    using Error::Error;
};

/// Scenario file or simulation configuration is invalid.
struct ConfigError : Error {
    using Error::Error;
};

/// Two runs being compared were produced by incompatible configurations.
struct ConfigMismatch : Error {
    using Error::Error;
};

/// Filesystem-level failure while emitting outputs.
struct IoError : Error {
    using Error::Error;
};

} // namespace smrac
