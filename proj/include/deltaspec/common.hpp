#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace deltaspec {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Input rejection (bad geometry, bad parameters). CLI maps these to exit 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateAngle : ValidationError {
    using ValidationError::ValidationError;
};
struct NotClosed : ValidationError {
    using ValidationError::ValidationError;
};
struct NotSimple : ValidationError {
    using ValidationError::ValidationError;
};
struct IndexOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

// Numerical failure on valid input. CLI maps these to exit 3.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoRoot : SolverError {
    using SolverError::SolverError;
};
struct NoConvergence : SolverError {
    using SolverError::SolverError;
};
struct FactorizationFailure : SolverError {
    using SolverError::SolverError;
};
struct MeshFailure : SolverError {
    using SolverError::SolverError;
};
struct DegenerateFit : SolverError {
    using SolverError::SolverError;
};
struct BranchNotBound : SolverError {
    using SolverError::SolverError;
};

inline double sqr(double x) { return x * x; }

}  // namespace deltaspec
