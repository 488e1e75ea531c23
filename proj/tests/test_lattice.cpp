#include <doctest.h>

#include "xxz/lattice.hpp"

using namespace xxz;

TEST_CASE("chain builders produce the expected edge sets") {
    const SpinGraph open = build_chain(4, 1, 1.0, 1.2, false);
    CHECK(open.size() == 4);
    CHECK(open.edges().size() == 3);
    CHECK(open.geometry() == Geometry::open_chain);

    const SpinGraph cyc = build_chain(12, 1, 1.0, 1.2, true);
    CHECK(cyc.edges().size() == 12);
    CHECK(cyc.geometry() == Geometry::cyclic_chain);

    const SpinGraph fig2 = build_chain(8, 2, 1.0, 1.2, true);
    CHECK(fig2.size() == 8);
    CHECK(fig2.sites()[3].spin() == doctest::Approx(1.0));
    CHECK(fig2.twice_total_spin() == 16);

    CHECK_THROWS_AS(build_chain(1, 1, 1.0, 1.0, false), InvalidArgument);
    CHECK_THROWS_AS(build_chain(2, 1, 1.0, 1.0, true), InvalidArgument);
}

TEST_CASE("rectangle builder: row-major order, M(N-1)+N(M-1) edges") {
    const SpinGraph r34 = build_rectangular(3, 4, 1, 1.0, 1.2);
    CHECK(r34.size() == 12);
    CHECK(r34.edges().size() == 17);  // 3*3 + 4*2
    CHECK(r34.site_at(1, 2) == 6);

    const SpinGraph r44 = build_rectangular(4, 4, 1, 1.0, 1.2);
    CHECK(r44.edges().size() == 24);

    // a 1xN rectangle has the open-chain edge set
    const SpinGraph row = build_rectangular(1, 5, 1, 1.0, 1.2);
    const SpinGraph chain = build_chain(5, 1, 1.0, 1.2, false);
    REQUIRE(row.edges().size() == chain.edges().size());
    for (std::size_t e = 0; e < row.edges().size(); ++e) {
        CHECK(row.edges()[e].i == chain.edges()[e].i);
        CHECK(row.edges()[e].j == chain.edges()[e].j);
    }
    CHECK_THROWS_AS(build_rectangular(0, 3, 1, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("spin star: all edges incident on the hub") {
    const SpinGraph star = build_spin_star(5, 1, 1.0, 2.0);
    CHECK(star.edges().size() == 4);
    for (const Edge& e : star.edges()) CHECK(e.i == 0);

    const SpinGraph pair = build_spin_star(2, 1, 1.0, 2.0);
    CHECK(pair.edges().size() == 1);
}

TEST_CASE("builders are deterministic") {
    const SpinGraph a = build_rectangular(3, 4, 2, 0.7, 1.3);
    const SpinGraph b = build_rectangular(3, 4, 2, 0.7, 1.3);
    REQUIRE(a.edges().size() == b.edges().size());
    for (std::size_t e = 0; e < a.edges().size(); ++e) {
        CHECK(a.edges()[e].i == b.edges()[e].i);
        CHECK(a.edges()[e].j == b.edges()[e].j);
        CHECK(a.edges()[e].j_xy == b.edges()[e].j_xy);
    }
}

TEST_CASE("graph validation") {
    std::vector<Site> sites{{0, 1}, {1, 1}};
    CHECK_THROWS_AS(SpinGraph(sites, {{0, 0, 1.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(SpinGraph(sites, {{0, 1, 1.0, 1.0}, {1, 0, 1.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(SpinGraph({{0, 1}, {1, 0}}, {}), InvalidArgument);

    // heterogeneous spins and couplings are allowed
    const SpinGraph mixed({{0, 1}, {1, 2}, {2, 3}},
                          {{0, 1, 1.0, 1.5}, {1, 2, 0.5, 0.8}});
    CHECK(mixed.sites()[2].dim() == 4);
    CHECK(mixed.edges()[1].delta() == doctest::Approx(1.6));
    CHECK_FALSE(mixed.uniform_spin());
}

TEST_CASE("spin conversion validates half-integers") {
    CHECK(twice_spin_from(0.5) == 1);
    CHECK(twice_spin_from(4.0) == 8);
    CHECK_THROWS_AS(twice_spin_from(0.3), InvalidArgument);
    CHECK_THROWS_AS(twice_spin_from(0.0), InvalidArgument);
}
