import math

import numpy as np
import pytest

import xxzfactor as xf


def test_builders_and_counts():
    g = xf.build_chain(8, 1.0, 1.0, 1.2, cyclic=True)
    assert g.n == 8
    assert len(g.edges) == 8
    assert g.spins == [1.0] * 8
    assert xf.count_configurations(3, 3) == 82
    assert xf.count_configurations(2, 12) == 2 * 3**11
    assert xf.count_configurations(2, 45) == 2 * 3**44  # exact big integers


def test_enumeration_and_fields():
    g = xf.build_chain(4, 0.5, 1.0, 1.2, cyclic=False)
    signs = xf.enumerate_sign_assignments(g)
    assert len(signs) == 8
    hs = 0.5 * math.sqrt(1.2**2 - 1.0)
    # first assignment is the all-plus branch: edge fields only
    zero_bulk = xf.factorizing_fields(g, signs[0])
    assert sum(0.5 * h for h in zero_bulk) == pytest.approx(0.0, abs=1e-12)
    assert sorted(abs(h) / hs for h in zero_bulk) == pytest.approx([0, 0, 1, 1])
    # the Neel-type branch pattern gives the alternating fields
    neel = xf.factorizing_fields(g, [1, -1, 1])
    assert [h / hs for h in neel] == pytest.approx([1, -2, 2, -1])


def test_ground_scan_at_factorization():
    g = xf.build_chain(6, 1.0, 1.0, 1.2, cyclic=True)
    signs = xf.enumerate_sign_assignments(g, limit=1)[0]
    fields = xf.factorizing_fields(g, signs)
    res = xf.ground_scan(g, fields, k=2)
    assert res["ground_energy"] == pytest.approx(xf.separable_energy(g), rel=1e-10)
    assert res["degeneracy"] == 13  # 2S+1


def test_projected_state_is_eigenstate():
    g = xf.build_chain(6, 0.5, 1.0, 1.4, cyclic=True)
    signs = xf.enumerate_sign_assignments(g)[1]
    fields = xf.factorizing_fields(g, signs)
    amps, basis = xf.projected_state(g, signs, m=1.0)
    h = xf.sector_dense_hamiltonian(g, fields, m=1.0)
    residual = np.linalg.norm(h @ amps - xf.separable_energy(g) * amps)
    assert residual < 1e-10
    assert all(abs(sum(row) - 1.0) < 1e-12 for row in basis)


def test_reduced_pair_matches_partial_trace():
    n, spin, delta = 6, 0.5, 1.2
    g = xf.build_chain(n, spin, 1.0, delta, cyclic=True)
    # alternating assignment is the first with strictly alternating steps
    alt = None
    for cand in xf.enumerate_sign_assignments(g):
        th = xf.propagate_angles(g, cand, 1.0)
        if abs(th[0] - th[2]) < 1e-12 and abs(th[1] - th[3]) < 1e-12 and th[0] != th[1]:
            alt = cand
            break
    assert alt is not None
    fields = xf.factorizing_fields(g, alt)
    rho_closed = xf.reduced_pair_alternating(n, spin, delta, "oe", m=1.0)
    rho_ed = xf.partial_trace(g, fields, m=1.0, i=0, j=1)
    assert np.abs(rho_closed - rho_ed).max() < 1e-10
    assert xf.negativity_of(rho_closed) == pytest.approx(
        xf.negativity_of(rho_ed), abs=1e-10
    )


def test_boundary_and_w_package():
    h1 = 2.0
    h2 = xf.boundary_h2(0.5, 1.0, 1.2, 1, h1)
    pkg = xf.w_state_package(8, 0.5, 1.0, 1.2, h1, h2)
    assert pkg["e_aligned"] == pytest.approx(pkg["e_one_flip"], rel=1e-12)
    assert pkg["neg_oe"] == pytest.approx(
        xf.negativity_of(np.asarray(pkg["rho_oe"])), abs=1e-12
    )
    assert pkg["conc_oe"] == pytest.approx(
        xf.concurrence_of(np.asarray(pkg["rho_oe"])), abs=1e-10
    )
    cross = xf.factorizing_crossing(0.5, 1.0, 1.2)
    assert xf.boundary_h2(0.5, 1.0, 1.2, 1, cross) == pytest.approx(-cross, abs=1e-10)


def test_mean_field_phases():
    assert xf.mean_field(3.0, -3.0, 0.5, 1.0, 1.2)["phase"] == "antiferromagnetic"
    sb = xf.mean_field(2.0, -1.5, 0.5, 1.0, 1.2)
    assert sb["phase"] == "symmetry_breaking"
    assert "angles" in sb
    assert xf.mean_field(3.0, 2.0, 0.5, 1.0, 1.2)["phase"] == "aligned"


def test_small_diagram_and_local_field():
    g = xf.build_chain(4, 0.5, 1.0, 1.4, cyclic=True)
    cells = xf.scan_diagram(g, "alternating", -1.0, 1.0, 0.5, workers=2)
    assert len(cells) == 25
    ms = {c[2] for c in cells}
    assert max(ms) == 2.0 and min(ms) == -2.0

    signs = xf.enumerate_sign_assignments(g, limit=1)[0]
    fields = xf.factorizing_fields(g, signs)
    energies = xf.local_field_spectrum(
        g, fields, sites=[0], theta=math.pi / 4, strengths=[0.0, 0.2, 0.4], k=1
    )
    e0 = xf.separable_energy(g)
    for h, levels in zip([0.0, 0.2, 0.4], energies):
        assert levels[0] == pytest.approx(e0 - 0.5 * h, abs=1e-10)


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        xf.eta_ratio(0.5, 1)
    with pytest.raises(ValueError):
        xf.build_chain(1, 0.5, 1.0, 1.0, False)
    g = xf.build_chain(4, 0.5, 1.0, 1.2, cyclic=True)
    with pytest.raises(ValueError):
        xf.factorizing_fields(g, [1, 1, 1])  # wrong length
