#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "xxz/exact.hpp"
#include "xxz/factorization.hpp"

using namespace xxz;

namespace {

double zero_sum(const SpinGraph& g, const FieldConfig& h) {
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) acc += 0.5 * g.sites()[i].twice_spin * h[i];
    return acc;
}

SignAssignment signs_from_steps(const SpinGraph& g, const std::vector<int>& step) {
    // step[i] is the branch choice on the consecutive edge (i, i+1)
    SignAssignment s;
    s.nu.resize(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& edge = g.edges()[e];
        if (edge.j == edge.i + 1)
            s.nu[e] = static_cast<std::int8_t>(step[edge.i]);
        else
            s.nu[e] = static_cast<std::int8_t>(-step[edge.j]);  // wrap edge (0, N-1)
    }
    return s;
}

}  // namespace

TEST_CASE("eta_ratio branches") {
    CHECK(eta_ratio(1.0, +1) == doctest::Approx(1.0));
    CHECK(eta_ratio(1.2, +1) == doctest::Approx(1.2 + std::sqrt(0.44)));
    CHECK(eta_ratio(1.2, +1) == doctest::Approx(1.8633249580710799).epsilon(1e-12));
    CHECK(eta_ratio(2.0, -1) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(eta_ratio(0.9, +1), InfeasibleAnisotropy);

    // branch product is one, average recovers the anisotropy
    for (double d : {1.0, 1.2, 2.0, 5.0, -1.3, -2.5}) {
        const double p = eta_ratio(d, +1), m = eta_ratio(d, -1);
        CHECK(p * m == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(0.5 * (p + 1.0 / p) == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("angle propagation on a pair") {
    const SpinGraph pair = build_chain(2, 1, 1.0, 2.0, false);
    SignAssignment plus{{+1}};
    const AngleConfig a = propagate_angles(pair, plus, 1.5707963267948966);
    CHECK(a.theta[0] == doctest::Approx(1.5707963267948966));
    CHECK(a.theta[1] == doctest::Approx(2.0 * std::atan(2.0 + std::sqrt(3.0))).epsilon(1e-12));

    // Delta = 1 on all edges keeps theta constant
    const SpinGraph iso = build_chain(5, 1, 1.0, 1.0, false);
    SignAssignment s{{+1, +1, +1, +1}};
    const AngleConfig u = propagate_angles(iso, s, 0.7);
    for (double t : u.theta) CHECK(t == doctest::Approx(0.7).epsilon(1e-12));

    CHECK_THROWS_AS(propagate_angles(pair, plus, 0.0), InvalidArgument);
    CHECK_THROWS_AS(propagate_angles(pair, plus, 3.15), InvalidArgument);
}

TEST_CASE("alternating signs give the two-angle pattern") {
    const SpinGraph chain = build_chain(4, 1, 1.0, 1.4, false);
    const SignAssignment alt = signs_from_steps(chain, {+1, -1, +1});
    const AngleConfig a = propagate_angles(chain, alt, 1.0);
    CHECK(a.theta[0] == doctest::Approx(a.theta[2]).epsilon(1e-12));
    CHECK(a.theta[1] == doctest::Approx(a.theta[3]).epsilon(1e-12));
    CHECK(a.theta[0] != doctest::Approx(a.theta[1]));

    // tan-half-angle ratio matches the chosen branch on every edge
    for (std::size_t e = 0; e < chain.edges().size(); ++e) {
        const Edge& edge = chain.edges()[e];
        const double ratio =
            std::tan(0.5 * a.theta[edge.j]) / std::tan(0.5 * a.theta[edge.i]);
        CHECK(ratio == doctest::Approx(eta_ratio(edge.delta(), alt.nu[e])).epsilon(1e-12));
    }
}

TEST_CASE("negative anisotropy flips the angle sign across an edge") {
    const SpinGraph pair = build_chain(2, 1, 1.0, -1.5, false);
    SignAssignment plus{{+1}};
    const AngleConfig a = propagate_angles(pair, plus, 1.0);
    CHECK(a.theta[0] > 0);
    CHECK(a.theta[1] < 0);
    const double ratio = std::tan(0.5 * a.theta[1]) / std::tan(0.5 * a.theta[0]);
    CHECK(ratio == doctest::Approx(eta_ratio(-1.5, +1)).epsilon(1e-12));
}

TEST_CASE("factorizing fields of the N=4 uniform open chain") {
    const SpinGraph chain = build_chain(4, 1, 1.0, 1.2, false);
    const double hs = 0.5 * std::sqrt(1.2 * 1.2 - 1.0);  // s = 1/2
    const std::vector<std::pair<std::vector<int>, std::vector<double>>> table = {
        {{+1, -1, +1}, {1, -2, 2, -1}},
        {{+1, +1, -1}, {1, 0, -2, 1}},
        {{+1, -1, -1}, {1, -2, 0, 1}},
        {{+1, +1, +1}, {1, 0, 0, -1}},
    };
    for (const auto& [steps, expect] : table) {
        const FieldConfig h = factorizing_fields(chain, signs_from_steps(chain, steps));
        for (int i = 0; i < 4; ++i)
            CHECK(h[i] == doctest::Approx(expect[i] * hs).epsilon(1e-12));
        CHECK(std::abs(zero_sum(chain, h)) <= 1e-12);
        // flipping every sign mirrors the fields
        std::vector<int> neg = steps;
        for (int& v : neg) v = -v;
        const FieldConfig hneg = factorizing_fields(chain, signs_from_steps(chain, neg));
        for (int i = 0; i < 4; ++i) CHECK(hneg[i] == doctest::Approx(-h[i]).epsilon(1e-12));
    }
}

TEST_CASE("pair factorizing field, spin 1, Delta 1.2") {
    const SpinGraph pair = build_chain(2, 2, 1.0, 1.2, false);
    const FieldConfig h = factorizing_fields(pair, SignAssignment{{+1}});
    CHECK(h[0] == doctest::Approx(std::sqrt(0.44)).epsilon(1e-9));
    CHECK(h[0] == doctest::Approx(0.6633249580710799).epsilon(1e-9));
    CHECK(h[1] == doctest::Approx(-h[0]).epsilon(1e-12));
}

TEST_CASE("spin star fields: constant leaves, opposing hub") {
    const int n = 6;
    const SpinGraph star = build_spin_star(n, 1, 1.0, 2.0);
    SignAssignment signs;
    signs.nu.assign(star.edges().size(), -1);  // hub -> leaf minus branch
    const FieldConfig h = factorizing_fields(star, signs);
    const double hs = 0.5 * std::sqrt(3.0);
    for (int leaf = 1; leaf < n; ++leaf) CHECK(h[leaf] == doctest::Approx(hs).epsilon(1e-12));
    CHECK(h[0] == doctest::Approx(-(n - 1) * hs).epsilon(1e-12));
    CHECK(std::abs(zero_sum(star, h)) <= 1e-12);
}

TEST_CASE("separable energy depends only on the z couplings") {
    CHECK(separable_energy(build_chain(2, 1, 1.0, 2.0, false)) == doctest::Approx(-0.5));
    CHECK(separable_energy(build_chain(8, 2, 1.0, 1.2, true)) == doctest::Approx(-9.6));
    CHECK(separable_energy(build_chain(5, 1, 1.0, 0.0, false)) == doctest::Approx(0.0));
}

TEST_CASE("enumeration counts: open, cyclic, star, lattice") {
    CHECK(enumerate_sign_assignments(build_chain(4, 1, 1.0, 1.2, false)).size() == 8);
    CHECK(enumerate_sign_assignments(build_chain(4, 1, 1.0, 1.2, true)).size() == 6);
    CHECK(enumerate_sign_assignments(build_chain(6, 1, 1.0, 1.2, true)).size() == 20);
    CHECK(enumerate_sign_assignments(build_spin_star(5, 1, 1.0, 1.7)).size() == 16);

    SignAssignmentStream odd(build_chain(3, 1, 1.0, 1.2, true));
    CHECK_FALSE(odd.next().has_value());
    CHECK(odd.yielded() == 0);
    CHECK_FALSE(odd.diagnostic().empty());

    // |Delta| = 1 collapses both branches: a single uniform configuration
    CHECK(enumerate_sign_assignments(build_chain(5, 1, 1.0, 1.0, false)).size() == 1);
}

TEST_CASE("enumeration matches the transfer matrix on small rectangles") {
    for (int rows = 1; rows <= 3; ++rows)
        for (int cols = rows; cols <= 4; ++cols) {
            if (rows * cols < 2) continue;
            const SpinGraph g = build_rectangular(rows, cols, 1, 1.0, 1.3);
            const auto assignments = enumerate_sign_assignments(g);
            CHECK(count_configurations(rows, cols) == BigUInt(assignments.size()));
        }
}

TEST_CASE("every enumerated assignment is loop-consistent and zero sum") {
    const SpinGraph g = build_rectangular(3, 3, 1, 1.0, 1.5);
    SignAssignmentStream stream(g);
    std::size_t n = 0;
    while (auto a = stream.next()) {
        ++n;
        CHECK_NOTHROW(site_ratios(g, *a));
        CHECK(std::abs(zero_sum(g, factorizing_fields(g, *a))) <= 1e-12);
        for (double seed : {0.5235987755982988, 1.0471975511965976, 1.5707963267948966}) {
            const AngleConfig ang = propagate_angles(g, *a, seed);
            for (std::size_t e = 0; e < g.edges().size(); ++e) {
                const Edge& edge = g.edges()[e];
                const double ratio =
                    std::tan(0.5 * ang.theta[edge.j]) / std::tan(0.5 * ang.theta[edge.i]);
                CHECK(std::abs(ratio - eta_ratio(edge.delta(), a->nu[e])) < 1e-12);
            }
        }
    }
    CHECK(n == 82);
}

TEST_CASE("loop inconsistency is reported with the violating cycle") {
    const SpinGraph cyc = build_chain(4, 1, 1.0, 1.2, true);
    SignAssignment bad;
    bad.nu.assign(4, +1);  // all-plus cannot close the loop
    CHECK_THROWS_AS(site_ratios(cyc, bad), LoopInconsistency);
    try {
        site_ratios(cyc, bad);
    } catch (const LoopInconsistency& e) {
        CHECK(e.cycle_sites.size() >= 3);
    }
}

TEST_CASE("transfer-matrix counts: closed forms") {
    // 2xN column: 2 * 3^(N-1)
    std::uint64_t p3 = 1;
    for (int n = 1; n <= 12; ++n) {
        CHECK(count_configurations(2, n) == BigUInt(2 * p3));
        p3 *= 3;
    }
    CHECK(count_configurations(3, 3) == BigUInt(82));
    // 3xN closed form with lambda = (5 +/- sqrt 17)/2
    const double rt = std::sqrt(17.0);
    for (int n = 1; n <= 10; ++n) {
        const double value = (1 + 3 / rt) / 2 * std::pow((5 + rt) / 2, n) +
                             (1 - 3 / rt) / 2 * std::pow((5 - rt) / 2, n);
        CHECK(count_configurations(3, n) == BigUInt(std::llround(value)));
    }
    // symmetry and the open-chain row
    CHECK(count_configurations(4, 6) == count_configurations(6, 4));
    CHECK(count_configurations(1, 11) == BigUInt(1024));
    // large counts go through exact big integers
    CHECK(count_configurations(2, 45).to_string() == "1969541804367222465762");
}

TEST_CASE("terrace map of rectangular configurations") {
    const SpinGraph g22 = build_rectangular(2, 2, 1, 1.0, 1.4);
    const auto assignments = enumerate_sign_assignments(g22);
    REQUIRE(assignments.size() == 6);
    std::set<std::vector<int>> distinct;
    for (const auto& a : assignments) {
        const Eigen::MatrixXi t = terrace_map(g22, a);
        CHECK(t(0, 0) == 0);
        std::vector<int> flat;
        for (int r = 0; r < t.rows(); ++r)
            for (int c = 0; c < t.cols(); ++c) {
                flat.push_back(t(r, c));
                if (c > 0) {
                    CHECK(t(r, c) >= t(r, c - 1));
                    CHECK(t(r, c) - t(r, c - 1) <= 1);
                }
                if (r > 0) {
                    CHECK(t(r, c) >= t(r - 1, c));
                    CHECK(t(r, c) - t(r - 1, c) <= 1);
                }
            }
        distinct.insert(flat);
    }
    CHECK(distinct.size() == 6);  // bijection onto terrace forms

    // all-plus signs on one row: k = i + j, all-zero terrace
    const SpinGraph row = build_rectangular(1, 6, 1, 1.0, 1.4);
    SignAssignment plus;
    plus.nu.assign(row.edges().size(), +1);
    CHECK(terrace_map(row, plus).maxCoeff() == 0);

    CHECK_THROWS_AS(terrace_map(build_chain(4, 1, 1.0, 1.4, false), plus), InvalidArgument);
}

TEST_CASE("lazy stream behaves like a generator") {
    const SpinGraph chain = build_chain(20, 1, 1.0, 1.2, false);
    SignAssignmentStream stream(chain);
    // pull only a handful of the 2^19 assignments
    for (int i = 0; i < 5; ++i) CHECK(stream.next().has_value());
    CHECK(stream.yielded() == 5);
}

TEST_CASE("4x4 terraces of the two extremal configurations") {
    const SpinGraph g = build_rectangular(4, 4, 1, 1.0, 1.2);
    // zero bulk: angles increase along rows and columns, k = i + j
    SignAssignment plus;
    plus.nu.assign(g.edges().size(), +1);
    CHECK(terrace_map(g, plus).cwiseAbs().maxCoeff() == 0);
    // alternating: k = (i + j) mod 2, terrace of constant antidiagonals
    SignAssignment alt;
    alt.nu.resize(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const int i = g.edges()[e].i;
        const int parity = (i / g.cols() + i % g.cols()) % 2;
        alt.nu[e] = static_cast<std::int8_t>(parity == 0 ? 1 : -1);
    }
    const Eigen::MatrixXi t = terrace_map(g, alt);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(t(r, c) == (r + c) / 2);
}

TEST_CASE("heterogeneous spins and couplings factorize exactly") {
    // mixed spins 1/2, 1, 3/2, 1/2 and per-edge couplings
    const SpinGraph g({{0, 1}, {1, 2}, {2, 3}, {3, 1}},
                      {{0, 1, 1.0, 1.3}, {1, 2, 0.8, 1.2}, {2, 3, 1.2, 1.56}});
    const auto assignments = enumerate_sign_assignments(g);
    CHECK(assignments.size() == 8);  // open chain: 2^(N-1)
    for (const auto& a : assignments) {
        const FieldConfig h = factorizing_fields(g, a);
        CHECK(std::abs(zero_sum(g, h)) <= 1e-12);
        const AngleConfig ang = propagate_angles(g, a, 0.9);
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            const Edge& edge = g.edges()[e];
            const double ratio =
                std::tan(0.5 * ang.theta[edge.j]) / std::tan(0.5 * ang.theta[edge.i]);
            CHECK(ratio == doctest::Approx(eta_ratio(edge.delta(), a.nu[e])).epsilon(1e-12));
        }
    }
}

TEST_CASE("heterogeneous anisotropy on a cycle restricts the sign choices") {
    // alternating Delta pattern around a 4-cycle: branch steps must cancel
    // per anisotropy value, leaving 4 of the 8 tree choices
    std::vector<Site> sites{{0, 1}, {1, 1}, {2, 1}, {3, 1}};
    std::vector<Edge> edges{{0, 1, 1.0, 1.3},
                            {1, 2, 1.0, 1.5},
                            {2, 3, 1.0, 1.3},
                            {0, 3, 1.0, 1.5}};
    const SpinGraph g(std::move(sites), std::move(edges));
    const auto assignments = enumerate_sign_assignments(g);
    CHECK(assignments.size() == 4);
    for (const auto& a : assignments) CHECK_NOTHROW(site_ratios(g, a));
}

TEST_CASE("cyclic N=4 factorizing field set") {
    const SpinGraph g = build_chain(4, 1, 1.0, 1.2, true);
    const double hs2 = std::sqrt(0.44);  // 2 h_s at s = 1/2
    std::set<std::vector<int>> seen;
    for (const auto& a : enumerate_sign_assignments(g)) {
        const FieldConfig h = factorizing_fields(g, a);
        std::vector<int> units;
        for (double v : h.h) units.push_back(static_cast<int>(std::lround(v / hs2)));
        seen.insert(units);
    }
    const std::set<std::vector<int>> expect = {
        {1, -1, 1, -1}, {-1, 1, -1, 1}, {1, 0, -1, 0},
        {-1, 0, 1, 0},  {0, -1, 0, 1},  {0, 1, 0, -1},
    };
    CHECK(seen == expect);
}

TEST_CASE("spin star admits a zero hub field when the leaf sum cancels") {
    const SpinGraph star = build_spin_star(5, 1, 1.0, 1.5);
    SignAssignment signs{{+1, +1, -1, -1}};
    const FieldConfig h = factorizing_fields(star, signs);
    CHECK(h[0] == doctest::Approx(0.0));
    double zs = 0.0;
    for (int i = 0; i < star.size(); ++i) zs += 0.5 * h[i];
    CHECK(std::abs(zs) <= 1e-12);
    // still an exact factorized ground state
    const SpectrumResult res = ground_scan(star, h, 1);
    CHECK(res.extreme_energy == doctest::Approx(separable_energy(star)).epsilon(1e-11));
}
