#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "xxz/errors.hpp"

namespace xxz {

enum class Geometry { open_chain, cyclic_chain, rectangular, spin_star, custom };

std::string_view to_string(Geometry g);
Geometry geometry_from_string(std::string_view name);

// Spins are stored as the integer 2s so that sector bookkeeping stays exact.
struct Site {
    int index = 0;
    int twice_spin = 1;

    double spin() const { return 0.5 * twice_spin; }
    int dim() const { return twice_spin + 1; }
};

struct Edge {
    int i = 0;  // i < j after graph normalization
    int j = 0;
    double j_xy = 0.0;
    double j_z = 0.0;

    double delta() const;  // J_z / J_xy; throws if j_xy == 0
};

// Per-site longitudinal field, in units of the couplings.
struct FieldConfig {
    std::vector<double> h;

    FieldConfig() = default;
    explicit FieldConfig(std::vector<double> values) : h(std::move(values)) {}
    FieldConfig(std::initializer_list<double> values) : h(values) {}
    explicit FieldConfig(std::size_t n, double value = 0.0) : h(n, value) {}

    std::size_t size() const { return h.size(); }
    double operator[](std::size_t i) const { return h[i]; }
    double& operator[](std::size_t i) { return h[i]; }
};

// Immutable spin array: sites with spin quantum numbers plus weighted coupling
// edges. Shared read-only across workers.
class SpinGraph {
public:
    SpinGraph(std::vector<Site> sites, std::vector<Edge> edges, Geometry tag = Geometry::custom);

    int size() const { return static_cast<int>(sites_.size()); }
    const std::vector<Site>& sites() const { return sites_; }
    const std::vector<Edge>& edges() const { return edges_; }
    Geometry geometry() const { return tag_; }

    // (neighbor site, edge index) pairs per site.
    const std::vector<std::pair<int, int>>& neighbors(int site) const { return adj_[site]; }

    int twice_total_spin() const { return twice_total_spin_; }
    std::size_t hilbert_dim() const;  // throws BudgetExceeded past 2^62

    // Row-major bookkeeping, nonzero only for rectangular graphs.
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int site_at(int row, int col) const { return row * cols_ + col; }

    bool uniform_spin() const;
    bool uniform_coupling() const;  // same (j_xy, j_z) on every edge

private:
    friend SpinGraph build_rectangular(int, int, int, double, double);

    std::vector<Site> sites_;
    std::vector<Edge> edges_;
    Geometry tag_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    int twice_total_spin_ = 0;
    int rows_ = 0, cols_ = 0;
};

// Uniform first-neighbor chain; cyclic adds the (N-1, 0) edge.
SpinGraph build_chain(int n, int twice_spin, double j_xy, double j_z, bool cyclic);

// Open rectangular lattice with first-neighbor edges only, row-major site order.
SpinGraph build_rectangular(int rows, int cols, int twice_spin, double j_xy, double j_z);

// Site 0 is the hub, coupled to N-1 otherwise free spins.
SpinGraph build_spin_star(int n, int twice_spin, double j_xy, double j_z);

// Validates that 2s is a positive integer when given a spin as a double.
int twice_spin_from(double spin);

}  // namespace xxz
