#pragma once

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "xxz/exact.hpp"
#include "xxz/factorization.hpp"
#include "xxz/lattice.hpp"

namespace xxz {

// Maps a point (h1, h2) to a per-site field configuration. Coefficients come
// from a reference sign assignment so that every pattern passes through the
// factorizing point at (h1, h2) = (2 h_s, -2 h_s).
class FieldPattern {
public:
    static FieldPattern alternating(const SpinGraph& g);
    static FieldPattern next_alternating(const SpinGraph& g);
    static FieldPattern zero_bulk(const SpinGraph& g);
    static FieldPattern zero_bulk_at(const SpinGraph& g, int site_a, int site_b);
    static FieldPattern lattice_alternating(const SpinGraph& g);
    static FieldPattern lattice_zero_bulk(const SpinGraph& g);
    static FieldPattern custom(std::vector<std::array<double, 2>> coeffs);
    static FieldPattern from_name(const SpinGraph& g, const std::string& name);

    FieldConfig instantiate(double h1, double h2) const;
    const std::string& kind() const { return kind_; }
    const std::vector<std::array<double, 2>>& coefficients() const { return coeff_; }
    // Reference assignment the coefficients were derived from (empty for custom).
    const std::optional<SignAssignment>& reference_signs() const { return ref_signs_; }

private:
    FieldPattern(std::string kind, std::vector<std::array<double, 2>> coeff,
                 std::optional<SignAssignment> ref = std::nullopt)
        : kind_(std::move(kind)), coeff_(std::move(coeff)), ref_signs_(std::move(ref)) {}

    std::string kind_;
    std::vector<std::array<double, 2>> coeff_;
    std::optional<SignAssignment> ref_signs_;
};

struct GridSpec {
    double h1_min = 0, h1_max = 0;
    double h2_min = 0, h2_max = 0;
    double step = 0.05;

    std::vector<double> h1_values() const;
    std::vector<double> h2_values() const;
};

struct DiagramCell {
    double h1 = 0, h2 = 0;
    int twice_m = 0;        // winning sector (meaningless when boundary)
    bool boundary = false;  // true when two sectors tie within tolerance
    double energy = 0;
};

struct PhaseDiagram {
    GridSpec grid;
    std::vector<double> h1s, h2s;
    std::vector<DiagramCell> cells;  // index = i1 * h2s.size() + i2
    std::string pattern_kind;
    int sites = 0;
    int twice_spin = 0;
    double delta = 0;

    const DiagramCell& at(std::size_t i1, std::size_t i2) const {
        return cells[i1 * h2s.size() + i2];
    }
};

struct ScanOptions {
    int workers = 1;
    double boundary_tol = 1e-8;   // x max(1, |E|)
    double lanczos_tol = 1e-11;
    int dense_threshold = 256;
    std::size_t max_sector_dim = 200000;
};

PhaseDiagram scan_diagram(const SpinGraph& g, const FieldPattern& pattern, const GridSpec& grid,
                          const ScanOptions& opts = {});

// Ground sector (or boundary) at a single field point.
DiagramCell classify_point(const SpectrumSolver& solver, const FieldPattern& pattern, double h1,
                           double h2, double boundary_tol);

struct NegativityRecord {
    double h1 = 0, h2 = 0;
    int i = 0, j = 0;
    int twice_m = 0;
    bool boundary = false;  // degenerate ground state and no M selected
    double value = 0;
};

// Negativities of the listed pairs at each point. With `select_twice_m` the
// in-sector ground state is used (well defined even at degeneracies);
// otherwise points with a degenerate ground state are flagged as boundaries.
std::vector<NegativityRecord> scan_negativity(const SpinGraph& g, const FieldPattern& pattern,
                                              const std::vector<std::pair<int, int>>& pairs,
                                              const std::vector<std::pair<double, double>>& pts,
                                              std::optional<int> select_twice_m,
                                              const ScanOptions& opts = {});

std::vector<std::pair<double, double>> grid_points(const GridSpec& grid);
std::vector<std::pair<double, double>> line_points(double h1_a, double h2_a, double h1_b,
                                                   double h2_b, int count);

void write_diagram_csv(const PhaseDiagram& d, std::ostream& os);
void write_diagram_json(const PhaseDiagram& d, std::ostream& os);
void write_negativity_csv(const std::vector<NegativityRecord>& recs, std::ostream& os);
void write_negativity_json(const std::vector<NegativityRecord>& recs, std::ostream& os);

}  // namespace xxz
