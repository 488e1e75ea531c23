#include "xxz/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace xxz {

namespace {

constexpr double kLoopTol = 1e-9;

bool is_unit_delta(double delta) { return std::abs(std::abs(delta) - 1.0) == 0.0; }

// Walk up the BFS tree from a and b to their meeting point; returns the cycle
// a -> ... -> root-side meet -> ... -> b -> a as a site list.
std::vector<int> tree_cycle(const std::vector<int>& parent_site, int a, int b) {
    std::vector<int> pa{a}, pb{b};
    auto depth = [&](int s) {
        int d = 0;
        for (int c = s; parent_site[c] >= 0; c = parent_site[c]) ++d;
        return d;
    };
    int da = depth(a), db = depth(b);
    int ca = a, cb = b;
    while (da > db) { ca = parent_site[ca]; pa.push_back(ca); --da; }
    while (db > da) { cb = parent_site[cb]; pb.push_back(cb); --db; }
    while (ca != cb) {
        ca = parent_site[ca]; pa.push_back(ca);
        cb = parent_site[cb]; pb.push_back(cb);
    }
    std::vector<int> cycle(pa.begin(), pa.end());
    for (auto it = pb.rbegin() + 1; it != pb.rend(); ++it) cycle.push_back(*it);
    return cycle;
}

}  // namespace

int SignAssignment::operator()(int from, int to, const SpinGraph& g) const {
    for (const auto& [nb, e] : g.neighbors(from))
        if (nb == to) return g.edges()[e].i == from ? nu[e] : -nu[e];
    throw InvalidArgument("sign lookup on a non-edge");
}

double eta_ratio(double delta, int sign) {
    if (sign != 1 && sign != -1) throw InvalidArgument("branch sign must be +1 or -1");
    const double disc = delta * delta - 1.0;
    if (disc < 0.0)
        throw InfeasibleAnisotropy("no real nontrivial solution: |Delta| < 1");
    return delta + sign * std::sqrt(disc);
}

SiteRatios site_ratios(const SpinGraph& g, const SignAssignment& signs) {
    const int n = g.size();
    if (static_cast<int>(signs.nu.size()) != static_cast<int>(g.edges().size()))
        throw InvalidArgument("sign assignment does not match the graph edge count");
    SiteRatios out;
    out.log_abs.assign(n, 0.0);
    out.sign.assign(n, 0);
    std::vector<int> parent_site(n, -1);
    out.sign[0] = 1;
    std::deque<int> queue{0};
    std::vector<std::pair<int, int>> chords;  // (site, edge) seen from the far side
    std::vector<char> edge_used(g.edges().size(), 0);
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (const auto& [nb, e] : g.neighbors(s)) {
            if (out.sign[nb] != 0) {
                if (!edge_used[e]) {
                    edge_used[e] = 1;
                    chords.push_back({s, e});
                }
                continue;
            }
            edge_used[e] = 1;
            const double eta = eta_ratio(g.edges()[e].delta(), signs(s, nb, g));
            out.log_abs[nb] = out.log_abs[s] + std::log(std::abs(eta));
            out.sign[nb] = static_cast<std::int8_t>(out.sign[s] * (eta < 0 ? -1 : 1));
            parent_site[nb] = s;
            queue.push_back(nb);
        }
    }
    for (int s = 0; s < n; ++s)
        if (out.sign[s] == 0) throw InvalidArgument("graph is not connected");
    for (const auto& [s, e] : chords) {
        const int nb = g.edges()[e].i == s ? g.edges()[e].j : g.edges()[e].i;
        const double eta = eta_ratio(g.edges()[e].delta(), signs(s, nb, g));
        const double want = out.log_abs[s] + std::log(std::abs(eta));
        const int want_sign = out.sign[s] * (eta < 0 ? -1 : 1);
        if (std::abs(want - out.log_abs[nb]) > kLoopTol || want_sign != out.sign[nb]) {
            auto cycle = tree_cycle(parent_site, s, nb);
            std::ostringstream msg;
            msg << "sign assignment is not single-valued around the cycle";
            for (int c : cycle) msg << ' ' << c;
            msg << " (edge " << g.edges()[e].i << '-' << g.edges()[e].j << " closes it)";
            throw LoopInconsistency(msg.str(), std::move(cycle));
        }
    }
    return out;
}

AngleConfig propagate_angles(const SpinGraph& g, const SignAssignment& signs, double seed_theta) {
    constexpr double kPi = 3.14159265358979323846;
    if (!(seed_theta > 0.0 && seed_theta < kPi))
        throw InvalidArgument("seed theta must lie in (0, pi)");
    const SiteRatios r = site_ratios(g, signs);
    AngleConfig out;
    out.theta.resize(g.size());
    out.phi.assign(g.size(), 0.0);
    const double t0 = std::tan(0.5 * seed_theta);
    for (int i = 0; i < g.size(); ++i) {
        const double t = r.sign[i] * t0 * std::exp(r.log_abs[i]);
        out.theta[i] = 2.0 * std::atan(t);  // in (-pi,0) u (0,pi); never 0 for finite t
    }
    return out;
}

FieldConfig factorizing_fields(const SpinGraph& g, const SignAssignment& signs) {
    if (static_cast<int>(signs.nu.size()) != static_cast<int>(g.edges().size()))
        throw InvalidArgument("sign assignment does not match the graph edge count");
    FieldConfig h(static_cast<std::size_t>(g.size()), 0.0);
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const Edge& e = g.edges()[k];
        const double disc = e.delta() * e.delta() - 1.0;
        if (disc < 0.0)
            throw InfeasibleAnisotropy("factorizing fields need |Delta| >= 1 on every edge");
        const double root = std::sqrt(disc) * std::abs(e.j_xy);
        const double si = 0.5 * g.sites()[e.i].twice_spin;
        const double sj = 0.5 * g.sites()[e.j].twice_spin;
        h[e.i] += sj * signs.nu[k] * root;
        h[e.j] += si * -signs.nu[k] * root;
    }
    return h;
}

double separable_energy(const SpinGraph& g) {
    double e = 0.0;
    for (const Edge& edge : g.edges())
        e -= 0.25 * g.sites()[edge.i].twice_spin * g.sites()[edge.j].twice_spin * edge.j_z;
    return e;
}

FactorizedSolution solve_factorized(const SpinGraph& g, const SignAssignment& signs,
                                    double seed_theta) {
    FactorizedSolution sol;
    sol.angles = propagate_angles(g, signs, seed_theta);
    sol.fields = factorizing_fields(g, signs);
    sol.energy = separable_energy(g);
    sol.signs = signs;
    return sol;
}

SignAssignmentStream::SignAssignmentStream(const SpinGraph& g) : graph_(&g) {
    const int n = g.size();
    log_eta_plus_.resize(g.edges().size());
    eta_sign_.resize(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const double d = g.edges()[e].delta();
        if (std::abs(d) < 1.0)
            throw InfeasibleAnisotropy("enumeration needs |Delta| >= 1 on every edge");
        const double eta = eta_ratio(d, +1);
        log_eta_plus_[e] = std::log(std::abs(eta));
        eta_sign_[e] = eta < 0 ? -1 : 1;
    }
    // BFS spanning tree from site 0.
    std::vector<char> visited(n, 0), edge_used(g.edges().size(), 0);
    parent_edge_.assign(n, -1);
    parent_site_.assign(n, -1);
    visited[0] = 1;
    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        bfs_order_.push_back(s);
        for (const auto& [nb, e] : g.neighbors(s)) {
            if (visited[nb]) {
                if (!edge_used[e]) {
                    edge_used[e] = 1;
                    chord_edges_.push_back(e);
                }
                continue;
            }
            visited[nb] = 1;
            edge_used[e] = 1;
            parent_edge_[nb] = e;
            parent_site_[nb] = s;
            queue.push_back(nb);
        }
    }
    for (int s = 0; s < n; ++s)
        if (!visited[s]) throw InvalidArgument("enumeration needs a connected graph");
    for (int s : bfs_order_) {
        const int e = parent_edge_[s];
        if (e < 0) continue;
        if (is_unit_delta(graph_->edges()[e].delta()))
            fixed_tree_edges_.push_back(e);
        else
            free_edges_.push_back(e);
    }
    if (free_edges_.size() >= 63)
        throw BudgetExceeded("too many free edges to enumerate (2^" +
                             std::to_string(free_edges_.size()) + " candidates)");
    end_ = std::uint64_t{1} << free_edges_.size();
    logr_.resize(n);
    sgn_.resize(n);
}

bool SignAssignmentStream::candidate(std::uint64_t mask, SignAssignment& out) {
    const SpinGraph& g = *graph_;
    out.nu.assign(g.edges().size(), 0);
    // Tree edges: free ones from the mask (bit set = minus branch), |Delta|=1
    // ones canonically +1.
    for (std::size_t b = 0; b < free_edges_.size(); ++b)
        out.nu[free_edges_[b]] = (mask >> b) & 1 ? -1 : 1;
    for (int e : fixed_tree_edges_) out.nu[e] = 1;
    // Ratios along the tree.
    logr_[0] = 0.0;
    sgn_[0] = 1;
    for (int s : bfs_order_) {
        const int e = parent_edge_[s];
        if (e < 0) continue;
        const int p = parent_site_[s];
        const int oriented = g.edges()[e].i == p ? out.nu[e] : -out.nu[e];
        logr_[s] = logr_[p] + oriented * log_eta_plus_[e];
        sgn_[s] = static_cast<std::int8_t>(sgn_[p] * eta_sign_[e]);
    }
    // Chords: the branch is determined by the ratio already fixed on both
    // endpoints, or the candidate is inconsistent.
    for (int e : chord_edges_) {
        const Edge& edge = g.edges()[e];
        const double target = logr_[edge.j] - logr_[edge.i];
        if (sgn_[edge.i] * eta_sign_[e] != sgn_[edge.j]) return false;
        if (std::abs(target - log_eta_plus_[e]) <= kLoopTol)
            out.nu[e] = 1;
        else if (std::abs(target + log_eta_plus_[e]) <= kLoopTol)
            out.nu[e] = -1;
        else
            return false;
        if (is_unit_delta(edge.delta())) out.nu[e] = 1;
    }
    return true;
}

std::optional<SignAssignment> SignAssignmentStream::next() {
    if (done_) return std::nullopt;
    SignAssignment out;
    while (mask_ < end_) {
        const std::uint64_t m = mask_++;
        if (candidate(m, out)) {
            ++yielded_;
            return out;
        }
    }
    done_ = true;
    if (yielded_ == 0) {
        std::ostringstream msg;
        msg << "no loop-consistent sign assignment exists for this graph ("
            << end_ << " spanning-tree branch choices checked)";
        if (graph_->geometry() == Geometry::cyclic_chain && graph_->size() % 2 == 1)
            msg << "; odd cyclic chains admit none for |Delta| > 1";
        diagnostic_ = msg.str();
    }
    return std::nullopt;
}

std::vector<SignAssignment> enumerate_sign_assignments(const SpinGraph& g) {
    SignAssignmentStream stream(g);
    std::vector<SignAssignment> out;
    while (auto a = stream.next()) out.push_back(std::move(*a));
    return out;
}

BigUInt count_configurations(int rows, int cols) {
    if (rows < 1 || cols < 1) throw InvalidArgument("count needs rows, cols >= 1");
    if (rows > cols) std::swap(rows, cols);  // L is symmetric; keep the matrix small
    if (rows > 24) throw BudgetExceeded("transfer matrix dimension 2^" +
                                        std::to_string(rows - 1) + " too large");
    // A(1) = (1); A(M+1) = [[A, A^T], [0, A]]; B = A + A^T.
    std::size_t dim = 1;
    std::vector<std::vector<BigUInt>> a(1, std::vector<BigUInt>(1, BigUInt(1)));
    for (int m = 1; m < rows; ++m) {
        std::vector<std::vector<BigUInt>> next(2 * dim, std::vector<BigUInt>(2 * dim, BigUInt(0)));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                next[i][j] = a[i][j];
                next[i][dim + j] = a[j][i];
                next[dim + i][dim + j] = a[i][j];
            }
        a = std::move(next);
        dim *= 2;
    }
    std::vector<std::vector<BigUInt>> b(dim, std::vector<BigUInt>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) b[i][j] = a[i][j] + a[j][i];
    // sum of entries of B^(cols-1) = 1^T B^(cols-1) 1
    std::vector<BigUInt> v(dim, BigUInt(1));
    for (int step = 1; step < cols; ++step) {
        std::vector<BigUInt> w(dim, BigUInt(0));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) w[i] += b[i][j] * v[j];
        v = std::move(w);
    }
    BigUInt total(0);
    for (const auto& x : v) total += x;
    return total;
}

Eigen::MatrixXi terrace_map(const SpinGraph& g, const SignAssignment& signs) {
    if (g.geometry() != Geometry::rectangular || g.rows() < 1)
        throw InvalidArgument("terrace map needs a rectangular graph");
    const int rows = g.rows(), cols = g.cols();
    // Signed step counts from site (0,0); verified single-valued on every edge.
    std::vector<int> k(g.size(), 0);
    std::vector<char> visited(g.size(), 0);
    visited[0] = 1;
    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (const auto& [nb, e] : g.neighbors(s)) {
            const int step = signs(s, nb, g);
            if (visited[nb]) {
                if (k[nb] != k[s] + step)
                    throw LoopInconsistency("sign assignment has no single-valued step count",
                                            {s, nb});
                continue;
            }
            visited[nb] = 1;
            k[nb] = k[s] + step;
            queue.push_back(nb);
        }
    }
    Eigen::MatrixXi t(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int steps = k[g.site_at(r, c)];
            if ((r + c - steps) % 2 != 0)
                throw LoopInconsistency("step parity violated", {g.site_at(r, c)});
            t(r, c) = (r + c - steps) / 2;
        }
    return t;
}

}  // namespace xxz
