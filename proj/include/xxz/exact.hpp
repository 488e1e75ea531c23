#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xxz/basis.hpp"
#include "xxz/factorization.hpp"
#include "xxz/lattice.hpp"

namespace xxz {

// Field-independent structure of H restricted to one magnetization sector:
// hopping off-diagonals, the J_z part of the diagonal, and the per-site
// magnetization columns. Only the diagonal depends on the fields, which is
// what makes grid sweeps cheap.
class SectorMatrix {
public:
    SectorMatrix(const SpinGraph& g, std::shared_ptr<const SectorBasis> basis);

    const SectorBasis& basis() const { return *basis_; }
    std::shared_ptr<const SectorBasis> basis_ptr() const { return basis_; }
    std::size_t dim() const { return basis_->dim(); }

    Eigen::VectorXd diagonal(const FieldConfig& fields) const;

    // y = offdiag_scale * (offdiagonal part) x + diag .* x
    void apply(const Eigen::VectorXd& diag, const Eigen::VectorXd& x, Eigen::VectorXd& y,
               double offdiag_scale = 1.0) const;

    Eigen::MatrixXd dense(const FieldConfig& fields) const;

    // Crude infinity-norm bound, used to scale residual tolerances.
    double norm_bound(const FieldConfig& fields) const;

    // 2m of `site` over all basis states (for <S_z> and diagonal assembly).
    const Eigen::VectorXd& m_column(int site) const { return m_cols_[site]; }

private:
    std::shared_ptr<const SectorBasis> basis_;
    Eigen::VectorXd diag_jz_;
    std::vector<Eigen::VectorXd> m_cols_;  // values m_i (not 2m)
    std::vector<int> row_ptr_;
    std::vector<int> col_;
    std::vector<double> val_;
    double offdiag_row_max_ = 0.0;
};

// One sector of H at fixed fields.
struct BlockHamiltonian {
    std::shared_ptr<const SectorMatrix> structure;
    Eigen::VectorXd diag;
    int twice_m = 0;

    std::size_t dim() const { return structure->dim(); }
    Eigen::MatrixXd dense() const;
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        structure->apply(diag, x, y);
    }
};

struct SolveOptions {
    int dense_threshold = 4096;
    std::size_t max_sector_dim = 200000;
    bool want_vectors = true;
    double degeneracy_tol = 1e-8;   // x max(1, |E|)
    double lanczos_tol = 1e-11;
    int workers = 1;
};

enum class SpectrumSide { lowest, highest };

struct SectorSpectrum {
    int twice_m = 0;
    std::vector<double> values;         // ascending (side == lowest) lowest-k
    Eigen::MatrixXd vectors;            // one column per value, empty if not requested
    std::vector<double> residuals;      // ||H v - E v|| per reported pair
    std::shared_ptr<const SectorBasis> basis;
    std::size_t dim = 0;
};

struct SpectrumResult {
    std::vector<SectorSpectrum> sectors;    // ascending twice_m
    SpectrumSide side = SpectrumSide::lowest;
    double extreme_energy = 0.0;            // min (lowest) or max (highest)
    std::vector<int> extreme_twice_m;       // sector(s) attaining it within tolerance
    int degeneracy = 0;                     // states within tol of the extreme energy
    bool degeneracy_saturated = false;      // true if k was too small to count fully
    double degeneracy_tol = 0.0;

    const SectorSpectrum& sector(int twice_m) const;
};

BlockHamiltonian build_sector(const SpinGraph& g, const FieldConfig& fields, int twice_m,
                              const SolveOptions& opts = {});

// Reusable solver: sector bases and hopping structures are built once per
// graph and shared across field configurations (and across threads).
class SpectrumSolver {
public:
    explicit SpectrumSolver(const SpinGraph& g, const SolveOptions& opts = {});

    SpectrumResult scan(const FieldConfig& fields, int k,
                        SpectrumSide side = SpectrumSide::lowest) const;

    // Lowest eigenvalue of one sector, optionally warm-started; used by sweeps.
    double sector_lowest(int twice_m, const FieldConfig& fields,
                         Eigen::VectorXd* warm_inout = nullptr) const;

    const std::vector<int>& twice_m_values() const { return twice_ms_; }
    const SectorMatrix& sector_matrix(int twice_m) const;
    const SpinGraph& graph() const { return *graph_; }

private:
    const SpinGraph* graph_;
    SolveOptions opts_;
    std::vector<int> twice_ms_;
    std::vector<std::shared_ptr<const SectorMatrix>> matrices_;
};

SpectrumResult ground_scan(const SpinGraph& g, const FieldConfig& fields, int k,
                           const SolveOptions& opts = {});

double expectation_sz(const Eigen::VectorXd& state, const SectorBasis& basis, int site);

// Checks that the separable energy is the global minimum (all J_z > 0) or the
// global maximum (all J_z < 0) of the given spectrum, to 1e-10 relative.
ExtremalReport verify_extremal(const SpinGraph& g, const FactorizedSolution& sol,
                               const SpectrumResult& spectrum);

// --- local parallel fields (full Hilbert space, S^z no longer conserved) ---

struct LocalFieldTarget {
    int site = 0;
    double theta = 0.0;
    double phi = 0.0;  // must be the same for all targets; rotated away
};

struct LocalFieldSpectra {
    std::vector<double> strengths;
    std::vector<std::vector<double>> energies;   // lowest-k per strength, ascending
    bool compatible = true;
    std::string warning;
};

// Spectra of H - h_par * sum_targets n.S_site for each strength. The base
// fields stay fixed; expected slope of the ground energy is -sum s_i when the
// directions match a factorized state's alignment.
LocalFieldSpectra local_parallel_field_spectrum(
    const SpinGraph& g, const FieldConfig& base_fields,
    std::span<const LocalFieldTarget> targets, std::span<const double> strengths, int k,
    const SolveOptions& opts = {}, const SignAssignment* signs_for_check = nullptr);

LocalFieldSpectra local_parallel_field_spectrum(
    const SpinGraph& g, const FieldConfig& base_fields, int site, double theta, double phi,
    std::span<const double> strengths, int k, const SolveOptions& opts = {});

// Full-space helpers (small dimensions; used by oracles and tests).
std::size_t full_hilbert_dim(const SpinGraph& g);
int full_basis_twice_m(const SpinGraph& g, std::size_t idx, int site);
Eigen::MatrixXd full_dense_hamiltonian(const SpinGraph& g, const FieldConfig& fields);

}  // namespace xxz
