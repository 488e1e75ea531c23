#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "xxz/basis.hpp"
#include "xxz/factorization.hpp"
#include "xxz/lattice.hpp"

namespace xxz {

// Log-magnitude + sign pair for quantities that overflow doubles.
struct LogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// Definite-magnetization component of a factorized state, normalized over the
// sector basis. Seed-independent: only the anisotropies and branch signs enter.
struct ProjectedState {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::VectorXd amplitudes;
    int twice_m = 0;
    std::vector<double> eta_chain;  // tan-half-angle ratio per spanning-tree edge, BFS order
};

ProjectedState projected_state(const SpinGraph& g, const SignAssignment& signs, int twice_m);

// Q_n^{m,k}(eta): normalization polynomial of the projected pair states,
// evaluated as the binomial sum with max-term rescaling (overflow safe).
// Indices may be half-integers as long as n+m-k and n+m+k are integers.
LogValue jacobi_q_log(int n, double m, double k, double eta);
double jacobi_q(int n, double m, double k, double eta);

// Projected state of a single pair in its Schmidt form.
ProjectedState pair_projected_state(int twice_spin, double delta, int sign, int twice_m);

enum class PairClass { odd_even, odd_odd, even_even };
enum class PairProvenance { analytic, partial_trace, w_state };

// Reduced two-site state, block diagonal in the pair magnetization. Row/col
// index is (m_i + s_i) * (2 s_j + 1) + (m_j + s_j), both local m ascending.
// For odd_even pairs site i belongs to the seed sublattice and site j to the
// eta-carrying one.
struct PairDensityMatrix {
    int twice_si = 1, twice_sj = 1;
    PairProvenance provenance = PairProvenance::partial_trace;
    Eigen::MatrixXd matrix;

    int dim() const { return (twice_si + 1) * (twice_sj + 1); }
    double trace() const { return matrix.trace(); }
    double min_eigenvalue() const;
    // Largest |element| connecting different pair-magnetization blocks.
    double max_offblock() const;
    std::vector<int> block_twice_m() const;
    Eigen::MatrixXd block(int twice_m) const;
};

// Reduced pair states of the alternating configuration on N uniform spins, any
// even separation of the pair; closed form, no diagonalization involved.
PairDensityMatrix reduced_pair_alternating(int n_sites, int twice_spin, double delta,
                                           PairClass cls, int twice_m);

// --- phase boundary of the aligned sector (alternating fields) ---

class HyperbolaBranch {
public:
    HyperbolaBranch(int twice_spin, double j, double delta, int branch);

    double h2_of_h1(double h1) const;      // throws on out-of-domain queries
    bool in_domain(double h1) const;
    int branch() const { return branch_; }
    double crossing_field() const;          // 2 h_s

private:
    double two_sj_;
    double delta_;
    int branch_;
};

HyperbolaBranch boundary_hyperbola(int twice_spin, double j, double delta, int branch);
std::vector<std::pair<double, double>> sample_boundary(const HyperbolaBranch& b, double h1_min,
                                                       double h1_max, double step);

// --- one-magnon package for the cyclic alternating chain ---

struct WStateData {
    double alpha = 0.0;        // mixing angle between odd and even one-magnon states
    double lambda = 0.0;
    double cos_alpha = 0.0, sin_alpha = 0.0;
    double e_aligned = 0.0;    // energy of the aligned state
    double e_one_flip = 0.0;   // lowest energy one magnetization step below
};

struct WStatePackage {
    WStateData data;
    PairDensityMatrix rho_oe, rho_oo, rho_ee;
    double neg_oe = 0.0, neg_oo = 0.0, neg_ee = 0.0;
    double conc_oe = 0.0, conc_oo = 0.0, conc_ee = 0.0;  // two-qubit closed forms
};

// Analytic data for the M = Ns-1 ground state of a cyclic uniform chain in the
// alternating field (h1 on even 0-based sites, h2 on odd ones). Mirror
// h -> -h for M = -Ns+1.
WStatePackage w_state_package(int n_sites, int twice_spin, double j, double jz, double h1,
                              double h2);

// --- mean field for the alternating configuration ---

enum class MeanFieldPhase { aligned, symmetry_breaking, antiferromagnetic };

struct MeanFieldResult {
    MeanFieldPhase phase = MeanFieldPhase::aligned;
    std::optional<std::pair<double, double>> angles;  // (theta_odd, theta_even) when SB
    double energy_per_cell = 0.0;                     // two sites, two bonds
    bool degenerate = false;                          // distinct minima tie
};

MeanFieldResult mean_field(double h_odd, double h_even, int twice_spin, double j, double delta);

// Antiferromagnetic region test for strong opposite fields.
bool afm_region(double h_odd, double h_even, int twice_spin, double j, double delta);

// --- plateau fan directions at the factorizing point ---

struct PlateauDirection {
    double angle = 0.0;      // radians in (-pi/2, pi/2]
    double tan_gamma = 0.0;  // meaningless when vertical
    bool vertical = false;
};

// Direction in the (h1, h2) plane along which the plateau of magnetization M
// first emerges from the factorizing point; built from the definite-M
// expectations of sites 0 and 1.
PlateauDirection plateau_direction(const SpinGraph& g, const SignAssignment& signs,
                                   int twice_m);

}  // namespace xxz
