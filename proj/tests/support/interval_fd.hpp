#pragma once

// Independent finite-difference oracle for the point-interaction interval
// operator.  Uniform grid on [-L, L] with an even number of subintervals so
// a node lands exactly on the well; the well contributes -alpha to the
// stiffness diagonal at that node (equivalently -alpha/h after mass
// normalization), endpoint conditions are imposed in the standard
// second-order way, and the lumped mass turns the pencil into a symmetric
// tridiagonal problem solved by Sturm bisection.  This shares no code path
// with the secular-equation solver it cross-checks.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "deltaspec/eigs.hpp"
#include "deltaspec/model1d.hpp"

namespace oracle {

inline std::vector<double> interval_fd_eigs(const deltaspec::PointInteractionSpec& spec,
                                            int subintervals, int count) {
    using deltaspec::IntervalBc;
    if (subintervals % 2 != 0)
        throw std::invalid_argument("subinterval count must be even");
    const double L = spec.half_length;
    const double h = 2.0 * L / subintervals;
    const int nodes = subintervals + 1;
    const int center = subintervals / 2;
    const double beta = spec.bc == IntervalBc::robin ? spec.robin_beta : 0.0;

    // Stiffness (P1): diag 2/h interior, 1/h at free ends; off-diagonal -1/h.
    // Lumped mass: h interior, h/2 at free ends.
    std::vector<double> kdiag(nodes, 2.0 / h), mass(nodes, h);
    kdiag.front() = kdiag.back() = 1.0 / h;
    mass.front() = mass.back() = 0.5 * h;
    kdiag[center] -= spec.alpha;
    if (spec.bc == IntervalBc::robin) {
        kdiag.front() -= beta;
        kdiag.back() -= beta;
    }

    const bool drop_left = spec.bc == IntervalBc::dirichlet;
    const bool drop_right = spec.bc == IntervalBc::dirichlet ||
                            spec.bc == IntervalBc::neumann_dirichlet;
    const int first = drop_left ? 1 : 0;
    const int last = drop_right ? nodes - 2 : nodes - 1;

    std::vector<double> diag, off;
    for (int i = first; i <= last; ++i) {
        diag.push_back(kdiag[i] / mass[i]);
        if (i < last) off.push_back(-1.0 / h / std::sqrt(mass[i] * mass[i + 1]));
    }
    return deltaspec::tridiag_lowest(diag, off, count);
}

}  // namespace oracle
