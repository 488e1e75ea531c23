#pragma once

#include <Eigen/Dense>

#include "xxz/analytic.hpp"
#include "xxz/basis.hpp"

namespace xxz {

// Reduced state of sites (i, j) from an eigenvector with definite total
// magnetization. Unit trace, PSD, block diagonal in the pair magnetization.
PairDensityMatrix partial_trace(const Eigen::VectorXd& state, const SectorBasis& basis,
                                int site_i, int site_j);

struct NegativityResult {
    int i = -1, j = -1;
    double value = 0.0;
    PairProvenance source = PairProvenance::partial_trace;
};

// (Tr|rho^pt| - 1)/2 with the partial transpose taken on the second subsystem.
double negativity(const PairDensityMatrix& rho);

// Standard two-qubit concurrence; requires s_i = s_j = 1/2.
double concurrence(const PairDensityMatrix& rho);

Eigen::MatrixXd partial_transpose_second(const PairDensityMatrix& rho);

}  // namespace xxz
