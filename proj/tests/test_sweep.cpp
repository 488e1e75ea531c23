#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "xxz/sweep.hpp"

using namespace xxz;

namespace {

double crossing(const SpinGraph& g) {
    // 2 h_s of the uniform graph
    const Edge& e = g.edges()[0];
    return g.sites()[0].twice_spin * std::abs(e.j_xy) *
           std::sqrt(e.delta() * e.delta() - 1.0);
}

}  // namespace

TEST_CASE("field patterns instantiate the documented configurations") {
    const SpinGraph cyc = build_chain(8, 1, 1.0, 1.2, true);
    const FieldPattern alt = FieldPattern::alternating(cyc);
    const FieldConfig f = alt.instantiate(2.0, -1.0);
    for (int i = 0; i < 8; ++i) CHECK(f[i] == doctest::Approx(i % 2 == 0 ? 2.0 : -1.0));

    const SpinGraph cyc12 = build_chain(12, 1, 1.0, 1.2, true);
    const FieldConfig nf = FieldPattern::next_alternating(cyc12).instantiate(3.0, -2.0);
    for (int i = 0; i < 12; ++i) {
        if (i % 4 == 0) CHECK(nf[i] == doctest::Approx(3.0));
        else if (i % 4 == 2) CHECK(nf[i] == doctest::Approx(-2.0));
        else CHECK(nf[i] == 0.0);
    }

    const FieldConfig zb = FieldPattern::zero_bulk(cyc12).instantiate(1.5, -0.5);
    CHECK(zb[0] == doctest::Approx(1.5));
    CHECK(zb[6] == doctest::Approx(-0.5));
    for (int i : {1, 2, 3, 4, 5, 7, 8, 9, 10, 11}) CHECK(zb[i] == 0.0);

    // open-chain zero bulk: opposite half-weight edge fields
    const SpinGraph open = build_chain(6, 1, 1.0, 1.2, false);
    const FieldConfig ze = FieldPattern::zero_bulk(open).instantiate(2.0, -2.0);
    CHECK(ze[0] == doctest::Approx(1.0));
    CHECK(ze[5] == doctest::Approx(-1.0));

    const FieldConfig custom =
        FieldPattern::zero_bulk_at(open, 1, 4).instantiate(0.7, -0.3);
    CHECK(custom[1] == doctest::Approx(0.7));
    CHECK(custom[4] == doctest::Approx(-0.3));
    CHECK(custom[0] == 0.0);
}

TEST_CASE("every pattern passes through its factorizing point") {
    auto check_ff = [](const SpinGraph& g, const FieldPattern& p) {
        REQUIRE(p.reference_signs().has_value());
        const FieldConfig expect = factorizing_fields(g, *p.reference_signs());
        const double hs2 = crossing(g);
        const FieldConfig got = p.instantiate(hs2, -hs2);
        for (int i = 0; i < g.size(); ++i)
            CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    };
    const SpinGraph cyc = build_chain(12, 1, 1.0, 1.2, true);
    check_ff(cyc, FieldPattern::alternating(cyc));
    check_ff(cyc, FieldPattern::next_alternating(cyc));
    check_ff(cyc, FieldPattern::zero_bulk(cyc));
    const SpinGraph rect = build_rectangular(3, 4, 1, 1.0, 1.2);
    check_ff(rect, FieldPattern::lattice_alternating(rect));
    check_ff(rect, FieldPattern::lattice_zero_bulk(rect));
    const SpinGraph open = build_chain(7, 2, 1.0, 1.5, false);
    check_ff(open, FieldPattern::alternating(open));
    check_ff(open, FieldPattern::zero_bulk(open));
}

TEST_CASE("lattice patterns follow the border structure") {
    const SpinGraph rect = build_rectangular(3, 4, 1, 1.0, 1.2);
    const FieldConfig alt = FieldPattern::lattice_alternating(rect).instantiate(2.0, -2.0);
    // corner (0,0): 2 neighbors -> coefficient 1; bulk (1,1): 4 neighbors -> 2
    CHECK(alt[rect.site_at(0, 0)] == doctest::Approx(2.0));
    CHECK(alt[rect.site_at(1, 1)] == doctest::Approx(4.0));
    CHECK(alt[rect.site_at(0, 1)] == doctest::Approx(-3.0));

    const FieldConfig zb = FieldPattern::lattice_zero_bulk(rect).instantiate(2.0, -2.0);
    CHECK(zb[rect.site_at(0, 0)] == doctest::Approx(2.0));
    CHECK(zb[rect.site_at(2, 3)] == doctest::Approx(-2.0));
    CHECK(zb[rect.site_at(0, 1)] == doctest::Approx(1.0));
    CHECK(zb[rect.site_at(2, 1)] == doctest::Approx(-1.0));
    CHECK(zb[rect.site_at(1, 1)] == 0.0);
    CHECK(zb[rect.site_at(1, 2)] == 0.0);
    CHECK(zb[rect.site_at(0, 3)] == 0.0);  // antidiagonal corners carry no field
    CHECK(zb[rect.site_at(2, 0)] == 0.0);
}

TEST_CASE("small diagram: free spins give an axis-aligned sector fan") {
    const SpinGraph free_spins = build_chain(2, 1, 0.0, 0.0, false);
    const FieldPattern pattern = FieldPattern::zero_bulk_at(free_spins, 0, 1);
    GridSpec grid{-1.0, 1.0, -1.0, 1.0, 0.5};
    const PhaseDiagram d = scan_diagram(free_spins, pattern, grid);
    for (const DiagramCell& c : d.cells) {
        if (c.boundary) continue;
        const int expect = (c.h1 > 0 ? 1 : -1) + (c.h2 > 0 ? 1 : -1);
        CHECK(c.twice_m == expect);
    }
}

TEST_CASE("diagram symmetry: M(-h1,-h2) = -M(h1,h2)") {
    const SpinGraph g = build_chain(4, 1, 1.0, 1.4, true);
    GridSpec grid{-2.0, 2.0, -2.0, 2.0, 0.4};
    const PhaseDiagram d = scan_diagram(g, FieldPattern::alternating(g), grid);
    const std::size_t n1 = d.h1s.size(), n2 = d.h2s.size();
    for (std::size_t i1 = 0; i1 < n1; ++i1)
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            const DiagramCell& a = d.at(i1, i2);
            const DiagramCell& b = d.at(n1 - 1 - i1, n2 - 1 - i2);
            if (a.boundary || b.boundary) {
                CHECK(a.boundary == b.boundary);
                continue;
            }
            CHECK(a.twice_m == -b.twice_m);
            CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-9));
        }
}

TEST_CASE("parallel and serial scans produce identical cells") {
    const SpinGraph g = build_chain(6, 1, 1.0, 1.2, true);
    GridSpec grid{-2.0, 2.0, -2.0, 2.0, 0.25};
    ScanOptions serial;
    serial.workers = 1;
    ScanOptions parallel;
    parallel.workers = 2;
    const PhaseDiagram a = scan_diagram(g, FieldPattern::alternating(g), grid, serial);
    const PhaseDiagram b = scan_diagram(g, FieldPattern::alternating(g), grid, parallel);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].twice_m == b.cells[i].twice_m);
        CHECK(a.cells[i].boundary == b.cells[i].boundary);
        CHECK(a.cells[i].energy == b.cells[i].energy);  // bit identical
    }
    std::ostringstream csv_a, csv_b;
    write_diagram_csv(a, csv_a);
    write_diagram_csv(b, csv_b);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("plateau structure along lines h2 = h1 + offset") {
    const SpinGraph g = build_chain(6, 2, 1.0, 1.4, true);  // spin 1, 2S+1 = 13
    const FieldPattern pattern = FieldPattern::alternating(g);
    const double hs4 = 2 * crossing(g);  // 4 h_s
    SolveOptions sopts;
    sopts.want_vectors = false;
    sopts.dense_threshold = 512;
    const SpectrumSolver solver(g, sopts);

    auto m_at = [&](double t, double offset) {
        return classify_point(solver, pattern, t, t + offset, 1e-8).twice_m;
    };
    // adaptive refinement so that narrow plateaus are not skipped
    auto collect = [&](double offset) {
        std::set<int> seen;
        std::vector<std::pair<double, double>> stack{{-8.0, 8.0}};
        std::vector<std::pair<double, int>> samples;
        seen.insert(m_at(-8.0, offset));
        seen.insert(m_at(8.0, offset));
        auto rec = [&](auto&& self, double a, double b, int ma, int mb) -> void {
            if (ma == mb || b - a < 1e-4) return;
            const double mid = 0.5 * (a + b);
            const int mm = m_at(mid, offset);
            seen.insert(mm);
            self(self, a, mid, ma, mm);
            self(self, mid, b, mm, mb);
        };
        rec(rec, -8.0, 8.0, m_at(-8.0, offset), m_at(8.0, offset));
        (void)stack;
        (void)samples;
        return seen;
    };

    // small offset: a single -S -> S jump, so exactly the two aligned plateaus
    const std::set<int> narrow = collect(0.5 * hs4);
    CHECK(narrow == std::set<int>{-12, 12});

    // wide offset: every magnetization plateau appears
    const std::set<int> wide = collect(1.3 * hs4);
    CHECK(wide.size() == 13);
    for (int tm = -12; tm <= 12; tm += 2) CHECK(wide.count(tm) == 1);
}

TEST_CASE("negativity is constant within each plateau along a field line") {
    const SpinGraph g = build_chain(6, 1, 1.0, 1.4, true);
    const FieldPattern pattern = FieldPattern::alternating(g);
    const double off = 2.4;  // line h2 = h1 - off crossing several plateaus
    const auto pts = line_points(-1.0, -1.0 - off, 3.0, 3.0 - off, 81);
    const auto recs = scan_negativity(g, pattern, {{0, 1}}, pts, std::nullopt);
    std::map<int, std::pair<double, double>> ranges;  // twice_m -> (min, max)
    for (const auto& r : recs) {
        if (r.boundary) continue;
        auto [it, inserted] = ranges.try_emplace(r.twice_m, r.value, r.value);
        it->second.first = std::min(it->second.first, r.value);
        it->second.second = std::max(it->second.second, r.value);
    }
    CHECK(ranges.size() >= 3);
    for (const auto& [tm, mm] : ranges) CHECK(mm.second - mm.first <= 1e-9);
}

TEST_CASE("zero-bulk chain: distant zero-field pair stays entangled at strong fields") {
    // two zero-field sites equidistant from the applied fields remain
    // significantly entangled on the M=0 plateau, non-diminishing with field
    const SpinGraph g = build_chain(12, 1, 1.0, 1.2, true);
    const FieldPattern pattern = FieldPattern::zero_bulk(g);
    std::vector<std::pair<double, double>> pts;
    for (double h : {2.0, 2.5, 3.0, 4.0}) pts.push_back({h, -h});
    const auto recs = scan_negativity(g, pattern, {{3, 9}}, pts, std::nullopt);
    REQUIRE(recs.size() == 4);
    for (const auto& r : recs) {
        CHECK_FALSE(r.boundary);
        CHECK(r.twice_m == 0);
        CHECK(r.value > 0.1);
    }
    for (std::size_t k = 1; k < recs.size(); ++k)
        CHECK(recs[k].value >= recs[k - 1].value - 1e-12);
}
