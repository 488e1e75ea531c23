#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xxz/bigint.hpp"
#include "xxz/lattice.hpp"

namespace xxz {

// Per-edge branch choice in the tan-half-angle relation. nu[k] is the sign for
// the stored orientation edges()[k].i -> edges()[k].j; the reverse direction
// carries the opposite sign.
struct SignAssignment {
    std::vector<std::int8_t> nu;

    int operator()(int from, int to, const SpinGraph& g) const;  // +1 or -1
};

// Orientation angles of a factorized product state. phi is zero by convention;
// theta is kept in (-pi,0) u (0,pi): negative-Delta edges flip the sign of
// tan(theta/2) along the edge, and we store that sign in theta itself.
struct AngleConfig {
    std::vector<double> theta;
    std::vector<double> phi;
};

struct FactorizedSolution {
    AngleConfig angles;
    FieldConfig fields;
    double energy = 0.0;
    SignAssignment signs;
};

// tan(theta_j/2)/tan(theta_i/2) ratio for one edge: Delta +/- sqrt(Delta^2-1).
// The two branches multiply to 1 and average (eta + 1/eta)/2 = Delta.
double eta_ratio(double delta, int sign);

// Ratios t_i / t_0 of tan-half-angles relative to site 0, stored as log|.|
// plus sign. Computed along a BFS spanning tree and re-verified on every
// non-tree edge; throws LoopInconsistency naming the violating cycle.
struct SiteRatios {
    std::vector<double> log_abs;
    std::vector<std::int8_t> sign;
};
SiteRatios site_ratios(const SpinGraph& g, const SignAssignment& signs);

AngleConfig propagate_angles(const SpinGraph& g, const SignAssignment& signs, double seed_theta);

// h^i = sum_j s_j nu_ij J_ij sqrt(Delta_ij^2 - 1); satisfies the weighted zero
// sum identically.
FieldConfig factorizing_fields(const SpinGraph& g, const SignAssignment& signs);

// Energy of any factorized eigenstate: -sum_edges s_i s_j J_z^ij.
double separable_energy(const SpinGraph& g);

FactorizedSolution solve_factorized(const SpinGraph& g, const SignAssignment& signs,
                                    double seed_theta);

// Lazy stream over all loop-consistent sign assignments, each yielded exactly
// once in a deterministic order. Edges with |Delta| = 1 are canonicalized to
// +1 (both branches coincide there).
class SignAssignmentStream {
public:
    explicit SignAssignmentStream(const SpinGraph& g);

    std::optional<SignAssignment> next();

    // Non-empty once the stream is exhausted having yielded nothing.
    const std::string& diagnostic() const { return diagnostic_; }
    std::uint64_t yielded() const { return yielded_; }

private:
    bool candidate(std::uint64_t mask, SignAssignment& out);

    const SpinGraph* graph_;
    std::vector<int> bfs_order_;        // sites in traversal order
    std::vector<int> parent_edge_;      // edge index into graph edges, -1 for root
    std::vector<int> parent_site_;
    std::vector<int> free_edges_;       // tree edges with |Delta| > 1, mask bits
    std::vector<int> fixed_tree_edges_; // tree edges with |Delta| = 1
    std::vector<int> chord_edges_;      // non-tree edges, signs derived
    std::uint64_t mask_ = 0, end_ = 0;
    bool done_ = false;
    std::uint64_t yielded_ = 0;
    std::string diagnostic_;
    std::vector<double> log_eta_plus_;  // per edge
    std::vector<std::int8_t> eta_sign_; // sign of eta (negative for Delta <= -1)
    std::vector<double> logr_;          // scratch: per site
    std::vector<std::int8_t> sgn_;
};

std::vector<SignAssignment> enumerate_sign_assignments(const SpinGraph& g);

// Transfer-matrix count of factorized configurations of a rows x cols open
// rectangle with uniform anisotropy, exact integer arithmetic.
BigUInt count_configurations(int rows, int cols);

// Integer matrix (i + j - k)/2 with k the signed step count from the seed at
// (0,0); nondecreasing along rows and columns, adjacent entries differ by at
// most one. Bijective image of the factorized configurations.
Eigen::MatrixXi terrace_map(const SpinGraph& g, const SignAssignment& signs);

struct ExtremalReport {
    bool ok = false;
    bool applicable = false;       // false when J_z changes sign across edges
    bool expect_maximum = false;   // true when all J_z < 0
    double separable = 0.0;        // E_Theta
    double extremal = 0.0;         // matching extreme eigenvalue from the spectrum
    std::string detail;
};

}  // namespace xxz
