#include "xxz/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "xxz/lanczos.hpp"

namespace xxz {

namespace {

double hop_amplitude(int twice_s_up, int twice_m_up, int twice_s_down, int twice_m_down) {
    // sqrt(s(s+1) - m(m+1)) for the raised site, sqrt(s(s+1) - m(m-1)) for the
    // lowered one; arguments are the 2m values *before* the hop.
    const double su = 0.5 * twice_s_up;
    const double sd = 0.5 * twice_s_down;
    const double mu = 0.5 * twice_m_up;
    const double md = 0.5 * twice_m_down;
    return std::sqrt((su * (su + 1) - mu * (mu + 1)) * (sd * (sd + 1) - md * (md - 1)));
}

void run_indexed(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int n = std::min(workers, count);
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

SectorMatrix::SectorMatrix(const SpinGraph& g, std::shared_ptr<const SectorBasis> basis)
    : basis_(std::move(basis)) {
    const std::size_t dim = basis_->dim();
    const int n = g.size();
    diag_jz_ = Eigen::VectorXd::Zero(dim);
    m_cols_.assign(n, Eigen::VectorXd::Zero(dim));
    for (std::size_t q = 0; q < dim; ++q)
        for (int i = 0; i < n; ++i) m_cols_[i][q] = 0.5 * basis_->twice_m_at(q, i);
    for (const Edge& e : g.edges())
        diag_jz_ -= e.j_z * m_cols_[e.i].cwiseProduct(m_cols_[e.j]);

    row_ptr_.assign(dim + 1, 0);
    std::vector<std::pair<int, double>> scratch;
    std::vector<std::int8_t> tuple(n);
    std::vector<std::vector<std::pair<int, double>>> rows(dim);
    for (std::size_t q = 0; q < dim; ++q) {
        auto st = basis_->state(q);
        for (const Edge& e : g.edges()) {
            for (const auto [up, down] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
                if (st[up] + 2 > g.sites()[up].twice_spin) continue;
                if (st[down] - 2 < -g.sites()[down].twice_spin) continue;
                std::copy(st.begin(), st.end(), tuple.begin());
                tuple[up] += 2;
                tuple[down] -= 2;
                const std::size_t p = basis_->index_of(tuple);
                const double amp =
                    -0.5 * e.j_xy * hop_amplitude(g.sites()[up].twice_spin, st[up],
                                                  g.sites()[down].twice_spin, st[down]);
                rows[p].push_back({static_cast<int>(q), amp});
            }
        }
    }
    std::size_t nnz = 0;
    for (auto& r : rows) nnz += r.size();
    col_.reserve(nnz);
    val_.reserve(nnz);
    for (std::size_t p = 0; p < dim; ++p) {
        row_ptr_[p] = static_cast<int>(col_.size());
        double row_sum = 0.0;
        for (const auto& [c, v] : rows[p]) {
            col_.push_back(c);
            val_.push_back(v);
            row_sum += std::abs(v);
        }
        offdiag_row_max_ = std::max(offdiag_row_max_, row_sum);
    }
    row_ptr_[dim] = static_cast<int>(col_.size());
}

Eigen::VectorXd SectorMatrix::diagonal(const FieldConfig& fields) const {
    Eigen::VectorXd d = diag_jz_;
    for (int i = 0; i < static_cast<int>(fields.size()); ++i)
        if (fields[i] != 0.0) d.noalias() -= fields[i] * m_cols_[i];
    return d;
}

void SectorMatrix::apply(const Eigen::VectorXd& diag, const Eigen::VectorXd& x,
                         Eigen::VectorXd& y, double offdiag_scale) const {
    const std::size_t dim = basis_->dim();
    y.resize(dim);
    for (std::size_t p = 0; p < dim; ++p) {
        double acc = 0.0;
        for (int k = row_ptr_[p]; k < row_ptr_[p + 1]; ++k) acc += val_[k] * x[col_[k]];
        y[p] = offdiag_scale * acc + diag[p] * x[p];
    }
}

Eigen::MatrixXd SectorMatrix::dense(const FieldConfig& fields) const {
    const std::size_t dim = basis_->dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::VectorXd d = diagonal(fields);
    for (std::size_t p = 0; p < dim; ++p) {
        h(p, p) = d[p];
        for (int k = row_ptr_[p]; k < row_ptr_[p + 1]; ++k) h(p, col_[k]) += val_[k];
    }
    return h;
}

double SectorMatrix::norm_bound(const FieldConfig& fields) const {
    const Eigen::VectorXd d = diagonal(fields);
    const double dmax = basis_->dim() ? d.cwiseAbs().maxCoeff() : 0.0;
    return dmax + offdiag_row_max_;
}

Eigen::MatrixXd BlockHamiltonian::dense() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
    FieldConfig zero(diag.size() > 0 ? structure->basis().sites() : 0, 0.0);
    h = structure->dense(zero);
    h.diagonal() = diag;
    return h;
}

const SectorSpectrum& SpectrumResult::sector(int twice_m) const {
    for (const auto& s : sectors)
        if (s.twice_m == twice_m) return s;
    throw InvalidArgument("sector not present in spectrum result");
}

BlockHamiltonian build_sector(const SpinGraph& g, const FieldConfig& fields, int twice_m,
                              const SolveOptions& opts) {
    if (fields.size() != static_cast<std::size_t>(g.size()))
        throw InvalidArgument("field configuration length does not match the graph");
    auto basis = SectorBasis::build(g, twice_m);
    if (basis->dim() > opts.max_sector_dim)
        throw BudgetExceeded("sector dimension " + std::to_string(basis->dim()) +
                             " exceeds budget " + std::to_string(opts.max_sector_dim));
    auto structure = std::make_shared<SectorMatrix>(g, basis);
    BlockHamiltonian block;
    block.diag = structure->diagonal(fields);
    block.structure = std::move(structure);
    block.twice_m = twice_m;
    return block;
}

SpectrumSolver::SpectrumSolver(const SpinGraph& g, const SolveOptions& opts)
    : graph_(&g), opts_(opts), twice_ms_(realizable_twice_m(g)) {
    matrices_.resize(twice_ms_.size());
    run_indexed(static_cast<int>(twice_ms_.size()), opts.workers, [&](int i) {
        auto basis = SectorBasis::build(g, twice_ms_[i]);
        if (basis->dim() > opts_.max_sector_dim)
            throw BudgetExceeded("sector dimension " + std::to_string(basis->dim()) +
                                 " exceeds budget " + std::to_string(opts_.max_sector_dim));
        matrices_[i] = std::make_shared<SectorMatrix>(g, std::move(basis));
    });
}

const SectorMatrix& SpectrumSolver::sector_matrix(int twice_m) const {
    for (std::size_t i = 0; i < twice_ms_.size(); ++i)
        if (twice_ms_[i] == twice_m) return *matrices_[i];
    throw InvalidArgument("sector not realizable for this graph");
}

SpectrumResult SpectrumSolver::scan(const FieldConfig& fields, int k, SpectrumSide side) const {
    if (fields.size() != static_cast<std::size_t>(graph_->size()))
        throw InvalidArgument("field configuration length does not match the graph");
    const int nsec = static_cast<int>(twice_ms_.size());
    SpectrumResult out;
    out.side = side;
    out.sectors.resize(nsec);
    // Full per-sector eigenvalue lists where the dense path ran, so that the
    // degeneracy count is exact; Lanczos sectors may saturate at k.
    std::vector<std::vector<double>> all_values(nsec);
    std::vector<char> full_spectrum(nsec, 0);
    const double sgn = side == SpectrumSide::lowest ? 1.0 : -1.0;

    run_indexed(nsec, opts_.workers, [&](int i) {
        const SectorMatrix& sm = *matrices_[i];
        const std::size_t dim = sm.dim();
        SectorSpectrum& sec = out.sectors[i];
        sec.twice_m = twice_ms_[i];
        sec.basis = sm.basis_ptr();
        sec.dim = dim;
        const Eigen::VectorXd diag = sm.diagonal(fields);
        const int kk = static_cast<int>(std::min<std::size_t>(k, dim));
        if (dim <= static_cast<std::size_t>(opts_.dense_threshold)) {
            Eigen::MatrixXd h = sm.dense(fields);
            if (side == SpectrumSide::highest) h = -h;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
                h, opts_.want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
            all_values[i].assign(solver.eigenvalues().data(),
                                 solver.eigenvalues().data() + dim);
            full_spectrum[i] = 1;
            sec.values.assign(all_values[i].begin(), all_values[i].begin() + kk);
            if (opts_.want_vectors) {
                sec.vectors = solver.eigenvectors().leftCols(kk);
                sec.residuals.resize(kk);
                Eigen::VectorXd y(dim);
                for (int q = 0; q < kk; ++q) {
                    sm.apply(diag, sec.vectors.col(q), y);
                    sec.residuals[q] = (y - sgn * sec.values[q] * sec.vectors.col(q)).norm();
                }
            }
        } else {
            SymmetricOp op{dim, [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                               if (side == SpectrumSide::lowest)
                                   sm.apply(diag, x, y);
                               else
                                   sm.apply(-diag, x, y, -1.0);
                           }};
            LanczosOptions lopts;
            lopts.tol = opts_.lanczos_tol;
            lopts.seed = static_cast<std::uint64_t>(twice_ms_[i] + 4096);
            LanczosResult r = lanczos_lowest(op, kk, lopts);
            all_values[i] = r.values;
            sec.values = r.values;
            sec.residuals = r.residuals;
            if (opts_.want_vectors) sec.vectors = std::move(r.vectors);
        }
        if (side == SpectrumSide::highest) {
            for (auto& v : all_values[i]) v = -v;
            for (auto& v : sec.values) v = -v;
            std::reverse(all_values[i].begin(), all_values[i].end());
            std::reverse(sec.values.begin(), sec.values.end());
            std::reverse(sec.residuals.begin(), sec.residuals.end());
            if (sec.vectors.size() > 0) sec.vectors = sec.vectors.rowwise().reverse().eval();
        }
    });

    // Extreme energy, attaining sectors, degeneracy.
    double extreme = side == SpectrumSide::lowest ? all_values[0].front()
                                                  : all_values[0].back();
    for (int i = 0; i < nsec; ++i) {
        const double cand =
            side == SpectrumSide::lowest ? all_values[i].front() : all_values[i].back();
        extreme = side == SpectrumSide::lowest ? std::min(extreme, cand)
                                               : std::max(extreme, cand);
    }
    out.extreme_energy = extreme;
    const double tol = opts_.degeneracy_tol * std::max(1.0, std::abs(extreme));
    out.degeneracy_tol = tol;
    for (int i = 0; i < nsec; ++i) {
        int count = 0;
        for (double v : all_values[i])
            if (std::abs(v - extreme) <= tol) ++count;
        if (count > 0) out.extreme_twice_m.push_back(twice_ms_[i]);
        out.degeneracy += count;
        if (!full_spectrum[i] && count == static_cast<int>(all_values[i].size()))
            out.degeneracy_saturated = true;
    }
    return out;
}

double SpectrumSolver::sector_lowest(int twice_m, const FieldConfig& fields,
                                     Eigen::VectorXd* warm_inout) const {
    const SectorMatrix& sm = sector_matrix(twice_m);
    const std::size_t dim = sm.dim();
    const Eigen::VectorXd diag = sm.diagonal(fields);
    if (dim <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sm.dense(fields),
                                                              Eigen::EigenvaluesOnly);
        return solver.eigenvalues()[0];
    }
    SymmetricOp op{dim, [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                       sm.apply(diag, x, y);
                   }};
    LanczosOptions lopts;
    lopts.tol = opts_.lanczos_tol;
    lopts.seed = static_cast<std::uint64_t>(twice_m + 4096);
    if (warm_inout && warm_inout->size() == static_cast<long>(dim))
        lopts.warm_start = warm_inout;
    LanczosResult r = lanczos_lowest(op, 1, lopts);
    if (warm_inout) *warm_inout = r.vectors.col(0);
    return r.values[0];
}

SpectrumResult ground_scan(const SpinGraph& g, const FieldConfig& fields, int k,
                           const SolveOptions& opts) {
    return SpectrumSolver(g, opts).scan(fields, k, SpectrumSide::lowest);
}

double expectation_sz(const Eigen::VectorXd& state, const SectorBasis& basis, int site) {
    if (state.size() != static_cast<long>(basis.dim()))
        throw InvalidArgument("state length does not match the sector basis");
    double acc = 0.0;
    for (std::size_t q = 0; q < basis.dim(); ++q)
        acc += 0.5 * basis.twice_m_at(q, site) * state[q] * state[q];
    return acc;
}

ExtremalReport verify_extremal(const SpinGraph& g, const FactorizedSolution& sol,
                               const SpectrumResult& spectrum) {
    ExtremalReport rep;
    rep.separable = sol.energy;
    bool all_pos = true, all_neg = true;
    for (const Edge& e : g.edges()) {
        all_pos = all_pos && e.j_z > 0;
        all_neg = all_neg && e.j_z < 0;
    }
    if (!all_pos && !all_neg) {
        rep.applicable = false;
        rep.detail = "J_z changes sign across edges; no extremality statement applies";
        return rep;
    }
    rep.applicable = true;
    rep.expect_maximum = all_neg;
    const SpectrumSide want = all_pos ? SpectrumSide::lowest : SpectrumSide::highest;
    if (spectrum.side != want) {
        rep.detail = "spectrum was computed for the wrong end; request side=" +
                     std::string(all_pos ? "lowest" : "highest");
        return rep;
    }
    rep.extremal = spectrum.extreme_energy;
    const double tol = 1e-10 * std::max(1.0, std::abs(rep.separable));
    rep.ok = std::abs(rep.extremal - rep.separable) <= tol;
    if (!rep.ok)
        rep.detail = "separable energy does not match the extreme eigenvalue "
                     "(difference " +
                     std::to_string(rep.extremal - rep.separable) +
                     "); check the sign assignment for loop consistency";
    return rep;
}

// ---------------------------------------------------------------------------
// full Hilbert space (transverse local fields)

namespace {

struct FullBasis {
    std::vector<int> dims;     // 2s_i + 1
    std::vector<std::size_t> strides;
    std::size_t dim = 1;

    explicit FullBasis(const SpinGraph& g) {
        const int n = g.size();
        dims.resize(n);
        strides.assign(n, 1);
        for (int i = 0; i < n; ++i) dims[i] = g.sites()[i].dim();
        for (int i = n - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];
        dim = strides[0] * dims[0];
    }
    int digit(std::size_t idx, int site) const {
        return static_cast<int>(idx / strides[site] % dims[site]);
    }
    int twice_m(std::size_t idx, int site, const SpinGraph& g) const {
        return 2 * digit(idx, site) - g.sites()[site].twice_spin;
    }
};

struct FullOperator {
    std::size_t dim;
    Eigen::VectorXd diag0;          // longitudinal fields + J_z
    Eigen::VectorXd diag_t;         // per unit strength
    std::vector<int> row_ptr, col;
    std::vector<double> val0, val_t;

    void apply(double strength, const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.resize(dim);
        for (std::size_t p = 0; p < dim; ++p) {
            double acc = 0.0;
            for (int k = row_ptr[p]; k < row_ptr[p + 1]; ++k)
                acc += (val0[k] + strength * val_t[k]) * x[col[k]];
            y[p] = acc + (diag0[p] + strength * diag_t[p]) * x[p];
        }
    }
    Eigen::MatrixXd dense(double strength) const {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (std::size_t p = 0; p < dim; ++p) {
            h(p, p) = diag0[p] + strength * diag_t[p];
            for (int k = row_ptr[p]; k < row_ptr[p + 1]; ++k)
                h(p, col[k]) += val0[k] + strength * val_t[k];
        }
        return h;
    }
};

FullOperator build_full_operator(const SpinGraph& g, const FieldConfig& fields,
                                 std::span<const LocalFieldTarget> targets) {
    const FullBasis basis(g);
    FullOperator op;
    op.dim = basis.dim;
    op.diag0 = Eigen::VectorXd::Zero(basis.dim);
    op.diag_t = Eigen::VectorXd::Zero(basis.dim);
    const int n = g.size();
    std::vector<std::vector<std::pair<int, double>>> rows0(basis.dim), rows_t(basis.dim);
    for (std::size_t q = 0; q < basis.dim; ++q) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) d -= fields[i] * 0.5 * basis.twice_m(q, i, g);
        for (const Edge& e : g.edges())
            d -= e.j_z * 0.25 * basis.twice_m(q, e.i, g) * basis.twice_m(q, e.j, g);
        op.diag0[q] = d;
        for (const Edge& e : g.edges()) {
            for (const auto [up, down] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
                const int tu = basis.twice_m(q, up, g), td = basis.twice_m(q, down, g);
                if (tu + 2 > g.sites()[up].twice_spin) continue;
                if (td - 2 < -g.sites()[down].twice_spin) continue;
                const std::size_t p = q + basis.strides[up] - basis.strides[down];
                rows0[p].push_back(
                    {static_cast<int>(q),
                     -0.5 * e.j_xy * hop_amplitude(g.sites()[up].twice_spin, tu,
                                                   g.sites()[down].twice_spin, td)});
            }
        }
        for (const auto& t : targets) {
            const double s = 0.5 * g.sites()[t.site].twice_spin;
            const int tm = basis.twice_m(q, t.site, g);
            op.diag_t[q] -= std::cos(t.theta) * 0.5 * tm;
            const double half_sin = 0.5 * std::sin(t.theta);
            if (half_sin == 0.0) continue;
            const double m = 0.5 * tm;
            if (tm + 2 <= g.sites()[t.site].twice_spin) {
                const std::size_t p = q + basis.strides[t.site];
                rows_t[p].push_back(
                    {static_cast<int>(q), -half_sin * std::sqrt(s * (s + 1) - m * (m + 1))});
            }
            if (tm - 2 >= -g.sites()[t.site].twice_spin) {
                const std::size_t p = q - basis.strides[t.site];
                rows_t[p].push_back(
                    {static_cast<int>(q), -half_sin * std::sqrt(s * (s + 1) - m * (m - 1))});
            }
        }
    }
    op.row_ptr.assign(basis.dim + 1, 0);
    for (std::size_t p = 0; p < basis.dim; ++p) {
        op.row_ptr[p] = static_cast<int>(op.col.size());
        for (const auto& [c, v] : rows0[p]) {
            op.col.push_back(c);
            op.val0.push_back(v);
            op.val_t.push_back(0.0);
        }
        for (const auto& [c, v] : rows_t[p]) {
            op.col.push_back(c);
            op.val0.push_back(0.0);
            op.val_t.push_back(v);
        }
    }
    op.row_ptr[basis.dim] = static_cast<int>(op.col.size());
    return op;
}

}  // namespace

LocalFieldSpectra local_parallel_field_spectrum(
    const SpinGraph& g, const FieldConfig& base_fields,
    std::span<const LocalFieldTarget> targets, std::span<const double> strengths, int k,
    const SolveOptions& opts, const SignAssignment* signs_for_check) {
    if (targets.empty()) throw InvalidArgument("at least one target site is required");
    for (const auto& t : targets) {
        if (t.site < 0 || t.site >= g.size()) throw InvalidArgument("target site out of range");
        if (std::abs(t.phi - targets[0].phi) > 1e-12)
            throw InvalidArgument("all targets must share the same phi (a common phi is a "
                                  "symmetry of H and is rotated away)");
    }
    const FullBasis fb(g);
    if (fb.dim > opts.max_sector_dim)
        throw BudgetExceeded("full Hilbert dimension " + std::to_string(fb.dim) +
                             " exceeds budget " + std::to_string(opts.max_sector_dim));

    LocalFieldSpectra out;
    out.strengths.assign(strengths.begin(), strengths.end());
    if (signs_for_check && targets.size() > 1) {
        const SiteRatios r = site_ratios(g, *signs_for_check);
        const auto& ref = targets[0];
        const double t_ref = std::tan(0.5 * ref.theta);
        for (const auto& t : targets) {
            const double expect = t_ref * r.sign[t.site] / r.sign[ref.site] *
                                  std::exp(r.log_abs[t.site] - r.log_abs[ref.site]);
            if (std::abs(std::tan(0.5 * t.theta) - expect) >
                1e-9 * std::max(1.0, std::abs(expect))) {
                out.compatible = false;
                out.warning = "target directions do not match any factorized alignment of "
                              "the given sign assignment; spectra computed anyway";
                break;
            }
        }
    }

    const FullOperator op = build_full_operator(g, base_fields, targets);
    const int kk = static_cast<int>(std::min<std::size_t>(k, op.dim));
    const int dense_cap = std::min(opts.dense_threshold, 1024);
    out.energies.resize(strengths.size());
    for (std::size_t si = 0; si < strengths.size(); ++si) {
        const double h = strengths[si];
        if (op.dim <= static_cast<std::size_t>(dense_cap)) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense(h),
                                                                  Eigen::EigenvaluesOnly);
            out.energies[si].assign(solver.eigenvalues().data(),
                                    solver.eigenvalues().data() + kk);
        } else {
            SymmetricOp sop{op.dim, [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                                op.apply(h, x, y);
                            }};
            LanczosOptions lopts;
            lopts.tol = opts.lanczos_tol;
            lopts.seed = 77 + si;
            out.energies[si] = lanczos_lowest(sop, kk, lopts).values;
        }
    }
    return out;
}

LocalFieldSpectra local_parallel_field_spectrum(const SpinGraph& g,
                                                const FieldConfig& base_fields, int site,
                                                double theta, double phi,
                                                std::span<const double> strengths, int k,
                                                const SolveOptions& opts) {
    const LocalFieldTarget t{site, theta, phi};
    return local_parallel_field_spectrum(g, base_fields, std::span(&t, 1), strengths, k, opts);
}

std::size_t full_hilbert_dim(const SpinGraph& g) { return FullBasis(g).dim; }

int full_basis_twice_m(const SpinGraph& g, std::size_t idx, int site) {
    return FullBasis(g).twice_m(idx, site, g);
}

Eigen::MatrixXd full_dense_hamiltonian(const SpinGraph& g, const FieldConfig& fields) {
    const FullBasis fb(g);
    if (fb.dim > 4096) throw BudgetExceeded("full dense Hamiltonian limited to dim 4096");
    return build_full_operator(g, fields, {}).dense(0.0);
}

}  // namespace xxz
