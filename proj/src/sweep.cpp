#include "xxz/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "xxz/entanglement.hpp"
#include "xxz/lanczos.hpp"

namespace xxz {

namespace {

// Coefficients from the net branch sign nu_i = sum_j nu_ij of a reference
// assignment: positive classes ride h1, negative ones h2, both scaled by
// |nu_i|/2 so the factorizing point sits at (2 h_s, -2 h_s).
std::vector<std::array<double, 2>> coeff_from_signs(const SpinGraph& g,
                                                    const SignAssignment& signs) {
    std::vector<std::array<double, 2>> coeff(g.size(), {0.0, 0.0});
    for (int i = 0; i < g.size(); ++i) {
        int nu = 0;
        for (const auto& [nb, e] : g.neighbors(i)) nu += signs(i, nb, g);
        if (nu > 0) coeff[i][0] = 0.5 * nu;
        if (nu < 0) coeff[i][1] = -0.5 * nu;
    }
    return coeff;
}

SignAssignment chain_signs(const SpinGraph& g, const std::function<int(int)>& step_of) {
    SignAssignment signs;
    signs.nu.resize(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& edge = g.edges()[e];
        if (edge.j == edge.i + 1) {
            signs.nu[e] = static_cast<std::int8_t>(step_of(edge.i));
        } else {
            // wrap-around edge (0, N-1), oriented 0 -> N-1: reverse of step N-1 -> 0
            signs.nu[e] = static_cast<std::int8_t>(-step_of(edge.j));
        }
    }
    return signs;
}

bool is_chain(const SpinGraph& g) {
    return g.geometry() == Geometry::open_chain || g.geometry() == Geometry::cyclic_chain;
}

}  // namespace

FieldPattern FieldPattern::alternating(const SpinGraph& g) {
    if (is_chain(g)) {
        if (g.geometry() == Geometry::cyclic_chain && g.size() % 2 != 0)
            throw InvalidArgument("alternating pattern on a cyclic chain needs even N");
        auto signs = chain_signs(g, [](int i) { return i % 2 == 0 ? 1 : -1; });
        auto coeff = coeff_from_signs(g, signs);
        return FieldPattern("alternating", std::move(coeff), std::move(signs));
    }
    return lattice_alternating(g);
}

FieldPattern FieldPattern::next_alternating(const SpinGraph& g) {
    if (!is_chain(g)) throw InvalidArgument("next-alternating pattern is a chain pattern");
    if (g.geometry() == Geometry::cyclic_chain && g.size() % 4 != 0)
        throw InvalidArgument("next-alternating pattern on a cyclic chain needs N divisible by 4");
    auto signs = chain_signs(g, [](int i) { return i % 4 < 2 ? 1 : -1; });
    auto coeff = coeff_from_signs(g, signs);
        return FieldPattern("next_alternating", std::move(coeff), std::move(signs));
}

FieldPattern FieldPattern::zero_bulk(const SpinGraph& g) {
    if (is_chain(g)) {
        if (g.geometry() == Geometry::cyclic_chain) {
            if (g.size() % 2 != 0)
                throw InvalidArgument("zero-bulk pattern on a cyclic chain needs even N");
            const int turn = g.size() / 2;
            auto signs = chain_signs(g, [turn](int i) { return i < turn ? 1 : -1; });
            auto coeff = coeff_from_signs(g, signs);
        return FieldPattern("zero_bulk", std::move(coeff), std::move(signs));
        }
        auto signs = chain_signs(g, [](int) { return 1; });
        auto coeff = coeff_from_signs(g, signs);
        return FieldPattern("zero_bulk", std::move(coeff), std::move(signs));
    }
    return lattice_zero_bulk(g);
}

FieldPattern FieldPattern::zero_bulk_at(const SpinGraph& g, int site_a, int site_b) {
    if (site_a == site_b || site_a < 0 || site_b < 0 || site_a >= g.size() ||
        site_b >= g.size())
        throw InvalidArgument("zero-bulk pattern needs two distinct sites");
    std::vector<std::array<double, 2>> coeff(g.size(), {0.0, 0.0});
    coeff[site_a][0] = 1.0;
    coeff[site_b][1] = 1.0;
    return FieldPattern("zero_bulk_at", std::move(coeff));
}

FieldPattern FieldPattern::lattice_alternating(const SpinGraph& g) {
    if (g.geometry() != Geometry::rectangular)
        throw InvalidArgument("lattice patterns need a rectangular graph");
    SignAssignment signs;
    signs.nu.resize(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& edge = g.edges()[e];
        const int ri = edge.i / g.cols(), ci = edge.i % g.cols();
        signs.nu[e] = static_cast<std::int8_t>((ri + ci) % 2 == 0 ? 1 : -1);
    }
    auto coeff = coeff_from_signs(g, signs);
        return FieldPattern("lattice_alternating", std::move(coeff), std::move(signs));
}

FieldPattern FieldPattern::lattice_zero_bulk(const SpinGraph& g) {
    if (g.geometry() != Geometry::rectangular)
        throw InvalidArgument("lattice patterns need a rectangular graph");
    SignAssignment signs;
    signs.nu.assign(g.edges().size(), 1);  // angles increase along rows and columns
    auto coeff = coeff_from_signs(g, signs);
        return FieldPattern("lattice_zero_bulk", std::move(coeff), std::move(signs));
}

FieldPattern FieldPattern::custom(std::vector<std::array<double, 2>> coeffs) {
    return FieldPattern("custom", std::move(coeffs));
}

FieldPattern FieldPattern::from_name(const SpinGraph& g, const std::string& name) {
    if (name == "alternating") return alternating(g);
    if (name == "next_alternating") return next_alternating(g);
    if (name == "zero_bulk") return zero_bulk(g);
    if (name == "lattice_alternating") return lattice_alternating(g);
    if (name == "lattice_zero_bulk") return lattice_zero_bulk(g);
    throw InvalidArgument("unknown field pattern: " + name);
}

FieldConfig FieldPattern::instantiate(double h1, double h2) const {
    FieldConfig f(coeff_.size(), 0.0);
    for (std::size_t i = 0; i < coeff_.size(); ++i)
        f[i] = coeff_[i][0] * h1 + coeff_[i][1] * h2;
    return f;
}

std::vector<double> GridSpec::h1_values() const {
    std::vector<double> v;
    if (step <= 0) throw InvalidArgument("grid step must be positive");
    const int n = static_cast<int>(std::floor((h1_max - h1_min) / step + 1.5));
    for (int i = 0; i < n; ++i) v.push_back(h1_min + i * step);
    return v;
}

std::vector<double> GridSpec::h2_values() const {
    std::vector<double> v;
    if (step <= 0) throw InvalidArgument("grid step must be positive");
    const int n = static_cast<int>(std::floor((h2_max - h2_min) / step + 1.5));
    for (int i = 0; i < n; ++i) v.push_back(h2_min + i * step);
    return v;
}

namespace {

struct PointResult {
    int twice_m;
    bool boundary;
    double energy;
};

// Lowest energy over sectors with warm starts carried along a row.
PointResult classify(const SpectrumSolver& solver, const FieldConfig& fields,
                     double boundary_tol, std::vector<Eigen::VectorXd>* warm) {
    const auto& tms = solver.twice_m_values();
    double best = 0, second = 0;
    int best_tm = 0;
    bool first = true;
    for (std::size_t i = 0; i < tms.size(); ++i) {
        Eigen::VectorXd* w = warm ? &(*warm)[i] : nullptr;
        const double e = solver.sector_lowest(tms[i], fields, w);
        if (first) {
            best = e;
            best_tm = tms[i];
            second = std::numeric_limits<double>::infinity();
            first = false;
        } else if (e < best) {
            second = best;
            best = e;
            best_tm = tms[i];
        } else {
            second = std::min(second, e);
        }
    }
    const double tol = boundary_tol * std::max(1.0, std::abs(best));
    return {best_tm, second - best <= tol, best};
}

}  // namespace

DiagramCell classify_point(const SpectrumSolver& solver, const FieldPattern& pattern, double h1,
                           double h2, double boundary_tol) {
    const PointResult r = classify(solver, pattern.instantiate(h1, h2), boundary_tol, nullptr);
    return {h1, h2, r.twice_m, r.boundary, r.energy};
}

PhaseDiagram scan_diagram(const SpinGraph& g, const FieldPattern& pattern, const GridSpec& grid,
                          const ScanOptions& opts) {
    PhaseDiagram d;
    d.grid = grid;
    d.h1s = grid.h1_values();
    d.h2s = grid.h2_values();
    d.pattern_kind = pattern.kind();
    d.sites = g.size();
    d.twice_spin = g.sites()[0].twice_spin;
    d.delta = g.edges().empty() || g.edges()[0].j_xy == 0.0 ? 0.0 : g.edges()[0].delta();
    d.cells.resize(d.h1s.size() * d.h2s.size());

    SolveOptions sopts;
    sopts.dense_threshold = opts.dense_threshold;
    sopts.max_sector_dim = opts.max_sector_dim;
    sopts.lanczos_tol = opts.lanczos_tol;
    sopts.want_vectors = false;
    const SpectrumSolver solver(g, sopts);
    const int nsec = static_cast<int>(solver.twice_m_values().size());

    // Rows (fixed h1) are the parallel unit; the warm-start chain runs along
    // h2 inside a row, so results do not depend on the worker count.
    std::atomic<std::size_t> next{0};
    auto run_row = [&](std::size_t i1) {
        std::vector<Eigen::VectorXd> warm(nsec);
        for (std::size_t i2 = 0; i2 < d.h2s.size(); ++i2) {
            const FieldConfig f = pattern.instantiate(d.h1s[i1], d.h2s[i2]);
            const PointResult r = classify(solver, f, opts.boundary_tol, &warm);
            d.cells[i1 * d.h2s.size() + i2] =
                DiagramCell{d.h1s[i1], d.h2s[i2], r.twice_m, r.boundary, r.energy};
        }
    };
    if (opts.workers <= 1) {
        for (std::size_t i1 = 0; i1 < d.h1s.size(); ++i1) run_row(i1);
    } else {
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < d.h1s.size(); i = next.fetch_add(1))
                run_row(i);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < opts.workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return d;
}

std::vector<NegativityRecord> scan_negativity(const SpinGraph& g, const FieldPattern& pattern,
                                              const std::vector<std::pair<int, int>>& pairs,
                                              const std::vector<std::pair<double, double>>& pts,
                                              std::optional<int> select_twice_m,
                                              const ScanOptions& opts) {
    SolveOptions sopts;
    sopts.dense_threshold = std::max(opts.dense_threshold, 512);
    sopts.max_sector_dim = opts.max_sector_dim;
    sopts.lanczos_tol = opts.lanczos_tol;
    sopts.degeneracy_tol = opts.boundary_tol;
    const SpectrumSolver solver(g, sopts);

    std::vector<NegativityRecord> out(pts.size() * pairs.size());
    std::atomic<std::size_t> next{0};
    auto run_point = [&](std::size_t pi) {
        const auto [h1, h2] = pts[pi];
        const FieldConfig f = pattern.instantiate(h1, h2);
        int tm = 0;
        bool boundary = false;
        Eigen::VectorXd ground;
        std::shared_ptr<const SectorBasis> basis;
        if (select_twice_m) {
            tm = *select_twice_m;
            const SectorMatrix& sm = solver.sector_matrix(tm);
            const Eigen::VectorXd diag = sm.diagonal(f);
            if (sm.dim() <= static_cast<std::size_t>(sopts.dense_threshold)) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sm.dense(f));
                ground = es.eigenvectors().col(0);
            } else {
                SymmetricOp op{sm.dim(), [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                                   sm.apply(diag, x, y);
                               }};
                LanczosOptions lo;
                lo.tol = sopts.lanczos_tol;
                ground = lanczos_lowest(op, 1, lo).vectors.col(0);
            }
            basis = sm.basis_ptr();
        } else {
            const SpectrumResult res = solver.scan(f, 2);
            boundary = res.degeneracy > 1;
            if (!boundary) {
                tm = res.extreme_twice_m.front();
                const auto& sec = res.sector(tm);
                ground = sec.vectors.col(0);
                basis = sec.basis;
            }
        }
        for (std::size_t qi = 0; qi < pairs.size(); ++qi) {
            NegativityRecord& rec = out[pi * pairs.size() + qi];
            rec = NegativityRecord{h1, h2, pairs[qi].first, pairs[qi].second, tm, boundary, 0.0};
            if (!boundary)
                rec.value = negativity(partial_trace(ground, *basis, pairs[qi].first,
                                                     pairs[qi].second));
        }
    };
    if (opts.workers <= 1) {
        for (std::size_t pi = 0; pi < pts.size(); ++pi) run_point(pi);
    } else {
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < pts.size(); i = next.fetch_add(1))
                run_point(i);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < opts.workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<std::pair<double, double>> grid_points(const GridSpec& grid) {
    std::vector<std::pair<double, double>> pts;
    for (double h1 : grid.h1_values())
        for (double h2 : grid.h2_values()) pts.push_back({h1, h2});
    return pts;
}

std::vector<std::pair<double, double>> line_points(double h1_a, double h2_a, double h1_b,
                                                   double h2_b, int count) {
    if (count < 2) throw InvalidArgument("a line scan needs at least 2 points");
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        pts.push_back({h1_a + t * (h1_b - h1_a), h2_a + t * (h2_b - h2_a)});
    }
    return pts;
}

namespace {

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

void write_diagram_csv(const PhaseDiagram& d, std::ostream& os) {
    os << "h1,h2,M2,E,boundary_flag\n";
    for (const DiagramCell& c : d.cells)
        os << fmt(c.h1) << ',' << fmt(c.h2) << ',' << c.twice_m << ','
           << fmt(c.energy, "%.12e") << ',' << (c.boundary ? 1 : 0) << '\n';
}

void write_diagram_json(const PhaseDiagram& d, std::ostream& os) {
    os << "{\n  \"pattern\": \"" << d.pattern_kind << "\",\n  \"sites\": " << d.sites
       << ",\n  \"twice_spin\": " << d.twice_spin << ",\n  \"delta\": " << fmt(d.delta)
       << ",\n  \"step\": " << fmt(d.grid.step) << ",\n  \"cells\": [\n";
    for (std::size_t i = 0; i < d.cells.size(); ++i) {
        const DiagramCell& c = d.cells[i];
        os << "    {\"h1\": " << fmt(c.h1) << ", \"h2\": " << fmt(c.h2)
           << ", \"M2\": " << c.twice_m << ", \"E\": " << fmt(c.energy, "%.12e")
           << ", \"boundary\": " << (c.boundary ? "true" : "false") << '}'
           << (i + 1 < d.cells.size() ? ",\n" : "\n");
    }
    os << "  ]\n}\n";
}

void write_negativity_csv(const std::vector<NegativityRecord>& recs, std::ostream& os) {
    os << "h1,h2,i,j,M2,boundary_flag,negativity\n";
    for (const auto& r : recs)
        os << fmt(r.h1) << ',' << fmt(r.h2) << ',' << r.i << ',' << r.j << ',' << r.twice_m
           << ',' << (r.boundary ? 1 : 0) << ',' << fmt(r.value, "%.12e") << '\n';
}

void write_negativity_json(const std::vector<NegativityRecord>& recs, std::ostream& os) {
    os << "[\n";
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        os << "  {\"h1\": " << fmt(r.h1) << ", \"h2\": " << fmt(r.h2) << ", \"i\": " << r.i
           << ", \"j\": " << r.j << ", \"M2\": " << r.twice_m
           << ", \"boundary\": " << (r.boundary ? "true" : "false")
           << ", \"negativity\": " << fmt(r.value, "%.12e") << '}'
           << (i + 1 < recs.size() ? ",\n" : "\n");
    }
    os << "]\n";
}

}  // namespace xxz
