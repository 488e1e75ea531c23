#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace xxz {

// y = A x for a symmetric operator of the given dimension.
struct SymmetricOp {
    std::size_t dim = 0;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
};

struct LanczosOptions {
    double tol = 1e-12;            // relative residual target
    int max_subspace = 0;          // 0: min(dim, 360)
    int max_restarts = 40;
    std::uint64_t seed = 1;        // deterministic start vector
    const Eigen::VectorXd* warm_start = nullptr;
};

struct LanczosResult {
    std::vector<double> values;    // ascending
    Eigen::MatrixXd vectors;       // one column per value
    std::vector<double> residuals; // explicit ||A v - theta v||
    bool converged = false;
    int iterations = 0;
};

// Lowest-k eigenpairs by Lanczos with full reorthogonalization. Degenerate
// multiplicities are resolved by locking converged vectors and restarting in
// the orthogonal complement with a fresh deterministic start.
LanczosResult lanczos_lowest(const SymmetricOp& op, int k, const LanczosOptions& opts = {});

}  // namespace xxz
