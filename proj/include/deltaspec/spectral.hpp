#pragma once

// Result record shared by the spectral backends.

#include <string>
#include <vector>

namespace deltaspec {

struct Discretization {
    double h = 0.0;          // largest element / mesh size used
    int elements = 0;        // element or triangle count
    double kappa_tol = 0.0;  // root-iteration tolerance (0 for direct solves)
};

// Eigenvalues ascending; genuine multiplicities are kept as repeated
// entries (values within the deduplication tolerance of each other count as
// one multiplet, never as an ordering violation).  `truncated` flags a
// result that carries fewer states than requested because the remaining
// branches are not bound.
struct SpectralResult {
    std::vector<double> eigenvalues;
    std::string backend;
    Discretization discretization;
    std::vector<double> error_estimates;
    bool truncated = false;
};

}  // namespace deltaspec
