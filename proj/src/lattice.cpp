#include "xxz/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace xxz {

std::string_view to_string(Geometry g) {
    switch (g) {
        case Geometry::open_chain: return "open_chain";
        case Geometry::cyclic_chain: return "cyclic_chain";
        case Geometry::rectangular: return "rectangular";
        case Geometry::spin_star: return "spin_star";
        case Geometry::custom: return "custom";
    }
    return "custom";
}

Geometry geometry_from_string(std::string_view name) {
    if (name == "open_chain") return Geometry::open_chain;
    if (name == "cyclic_chain") return Geometry::cyclic_chain;
    if (name == "rectangular") return Geometry::rectangular;
    if (name == "spin_star") return Geometry::spin_star;
    if (name == "custom") return Geometry::custom;
    throw InvalidArgument("unknown geometry tag: " + std::string(name));
}

double Edge::delta() const {
    if (j_xy == 0.0) throw InvalidArgument("anisotropy undefined: edge has j_xy = 0");
    return j_z / j_xy;
}

SpinGraph::SpinGraph(std::vector<Site> sites, std::vector<Edge> edges, Geometry tag)
    : sites_(std::move(sites)), edges_(std::move(edges)), tag_(tag) {
    const int n = static_cast<int>(sites_.size());
    if (n < 2) throw InvalidArgument("a spin graph needs at least 2 sites");
    for (int i = 0; i < n; ++i) {
        if (sites_[i].index != i)
            throw InvalidArgument("site indices must be contiguous 0..N-1");
        if (sites_[i].twice_spin < 1)
            throw InvalidArgument("each site needs 2s >= 1");
        twice_total_spin_ += sites_[i].twice_spin;
    }
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
        if (e.i == e.j) throw InvalidArgument("self-edges are not allowed");
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n) throw InvalidArgument("edge endpoint out of range");
        if (!seen.insert({e.i, e.j}).second)
            throw InvalidArgument("duplicate edge between a site pair");
    }
    adj_.resize(n);
    for (int k = 0; k < static_cast<int>(edges_.size()); ++k) {
        adj_[edges_[k].i].push_back({edges_[k].j, k});
        adj_[edges_[k].j].push_back({edges_[k].i, k});
    }
}

std::size_t SpinGraph::hilbert_dim() const {
    std::size_t d = 1;
    for (const auto& s : sites_) {
        const auto local = static_cast<std::size_t>(s.dim());
        if (d > (std::size_t{1} << 62) / local)
            throw BudgetExceeded("Hilbert dimension exceeds 2^62");
        d *= local;
    }
    return d;
}

bool SpinGraph::uniform_spin() const {
    return std::all_of(sites_.begin(), sites_.end(),
                       [&](const Site& s) { return s.twice_spin == sites_[0].twice_spin; });
}

bool SpinGraph::uniform_coupling() const {
    return std::all_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
        return e.j_xy == edges_[0].j_xy && e.j_z == edges_[0].j_z;
    });
}

SpinGraph build_chain(int n, int twice_spin, double j_xy, double j_z, bool cyclic) {
    if (n < 2) throw InvalidArgument("chain needs N >= 2");
    if (cyclic && n < 3) throw InvalidArgument("cyclic chain needs N >= 3");
    std::vector<Site> sites(n);
    for (int i = 0; i < n; ++i) sites[i] = {i, twice_spin};
    std::vector<Edge> edges;
    edges.reserve(cyclic ? n : n - 1);
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, j_xy, j_z});
    if (cyclic) edges.push_back({0, n - 1, j_xy, j_z});
    return SpinGraph(std::move(sites), std::move(edges),
                     cyclic ? Geometry::cyclic_chain : Geometry::open_chain);
}

SpinGraph build_rectangular(int rows, int cols, int twice_spin, double j_xy, double j_z) {
    if (rows < 1 || cols < 1) throw InvalidArgument("rectangle needs rows, cols >= 1");
    if (rows * cols < 2) throw InvalidArgument("rectangle needs at least 2 sites");
    std::vector<Site> sites(rows * cols);
    for (int i = 0; i < rows * cols; ++i) sites[i] = {i, twice_spin};
    std::vector<Edge> edges;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int s = r * cols + c;
            if (c + 1 < cols) edges.push_back({s, s + 1, j_xy, j_z});
            if (r + 1 < rows) edges.push_back({s, s + cols, j_xy, j_z});
        }
    SpinGraph g(std::move(sites), std::move(edges), Geometry::rectangular);
    g.rows_ = rows;
    g.cols_ = cols;
    return g;
}

SpinGraph build_spin_star(int n, int twice_spin, double j_xy, double j_z) {
    if (n < 2) throw InvalidArgument("spin star needs N >= 2");
    std::vector<Site> sites(n);
    for (int i = 0; i < n; ++i) sites[i] = {i, twice_spin};
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (int k = 1; k < n; ++k) edges.push_back({0, k, j_xy, j_z});
    return SpinGraph(std::move(sites), std::move(edges), Geometry::spin_star);
}

int twice_spin_from(double spin) {
    const double ts = 2.0 * spin;
    const auto rounded = static_cast<int>(std::lround(ts));
    if (rounded < 1 || std::abs(ts - rounded) > 1e-9)
        throw InvalidArgument("spin must be a positive half-integer");
    return rounded;
}

}  // namespace xxz
