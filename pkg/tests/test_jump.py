import inspect

import numpy as np
import pytest

from voidcell.densities import constant_surface, make_sinusoid_surface, make_stripe_surface
from voidcell.geometry import (SOLID_MINUS, SOLID_PLUS, SQUARE, VOID, LabelField, make_stencil,
                               perimeter_energy)
from voidcell.jump import separation_audit, solve_jump_cell, solve_jump_sequence
from voidcell.oracles import brute_force_monotone_cut
from voidcell.surface import cell_domain, solve_void_cell

ST16 = make_stencil(16)
E1, E2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])


@pytest.mark.parametrize("g", [
    constant_surface(1.0),
    make_stripe_surface(1.0, 2.0, period=0.25),
    make_sinusoid_surface(period=0.25),
], ids=["const", "stripes", "sinusoid"])
def test_matches_three_label_dp_oracle(g):
    n, h = 16, 1 / 16
    dom = cell_domain(n * h / 2, h, (0.0, 0.0), SQUARE, collar_cells=2, min_cells_per_rho=8)
    res = solve_jump_cell(g, dom, (0.0, 0.0), E2, eps=2 * h, stencil=ST16)
    want = brute_force_monotone_cut(n, h, ST16.offsets, ST16.weights, lambda p: g(p, E1),
                                    three_label=True, datum_rows=(6, 10))
    assert res.raw_energy == pytest.approx(want, abs=res.diagnostics["quantization_bound"] + 1e-9)


def test_constant_density_two_faces():
    dom = cell_domain(1.0, 1 / 32)
    for nu in (E1, E2, ST16.normals[2]):
        res = solve_jump_cell(constant_surface(), dom, (0.0, 0.0), nu, eps=1 / 8)
        chord = 2 * np.sqrt(1 - (1 / 8) ** 2)
        assert chord * (1 - ST16.tau) - res.tolerance <= res.normalized <= 2 * (1 + ST16.tau)
        assert res.diagnostics["separated"]
        assert res.diagnostics["optimizer"] in ("layered", "expansion")


def test_output_is_separated_and_consistent():
    dom = cell_domain(1.0, 1 / 32)
    g = make_sinusoid_surface(period=0.5)
    res = solve_jump_cell(g, dom, (0.0, 0.0), E1, eps=1 / 8)
    lab = res.labels.labels
    audit = separation_audit(res.labels, ST16)
    assert audit == {"contacts": 0, "components_anchored": True, "separated": True}
    assert perimeter_energy(res.labels, g, ST16) == pytest.approx(res.raw_energy, abs=1e-5)
    # the displacement is e1 on the plus phase and zero elsewhere
    assert np.array_equal(res.field[:, 0], (lab == SOLID_PLUS).astype(float))
    assert np.all(res.field[:, 1] == 0)
    assert res.diagnostics["expansion_energy"] >= res.diagnostics["layered_energy"] - 1e-9


def test_audit_flags_contact_and_islands():
    dom = cell_domain(0.5, 1 / 32)
    lab = np.where(dom.centers[:, 0] > 0, SOLID_PLUS, SOLID_MINUS).astype(np.int8)
    assert separation_audit(LabelField(dom, lab, dom.collar, "three"), ST16)["contacts"] > 0
    lab = np.where(dom.centers[:, 0] > 0.1, SOLID_PLUS,
                   np.where(dom.centers[:, 0] < -0.1, SOLID_MINUS, VOID)).astype(np.int8)
    island = np.hypot(*dom.centers.T) < 0.04
    lab[island] = SOLID_PLUS
    audit = separation_audit(LabelField(dom, lab, dom.collar, "three"), ST16)
    assert audit["contacts"] == 0 and not audit["components_anchored"]


def test_no_jump_amplitude_or_bulk_parameter():
    params = set(inspect.signature(solve_jump_cell).parameters)
    assert not params & {"jump", "amplitude", "f", "bulk", "xi"}


def test_at_least_twice_the_void_cell():
    dom = cell_domain(1.0, 1 / 32)
    g = make_stripe_surface(1.0, 2.0, period=0.25)
    for nu in (E1, E2):
        jump = solve_jump_cell(g, dom, (0.0, 0.0), nu, eps=1 / 16)
        void = solve_void_cell(g, dom, (0.0, 0.0), nu)
        # two faces, each no cheaper than the best single interface up to the chord loss
        assert jump.normalized >= 2 * void.normalized * np.sqrt(1 - (1 / 16) ** 2) - 2 * ST16.tau


def test_thinner_layer_is_not_more_expensive_for_constant_g():
    dom = cell_domain(1.0, 1 / 32)
    vals = [solve_jump_cell(constant_surface(), dom, (0.0, 0.0), E1, eps=e).raw_energy
            for e in (1 / 4, 1 / 8, 1 / 16)]
    assert vals[0] <= vals[1] + 1e-6 <= vals[2] + 2e-6


def test_sequence_identity_constant():
    seq = solve_jump_sequence(constant_surface(), (0.0, 0.0), E1, [1.0, 0.5],
                              [1 / 8, 1 / 16, 1 / 32], spacing=1 / 64, periodic=False)
    assert seq.limit["lower_bound_ok"]
    assert abs(seq.limit["relative_gap"]) < 0.05
    assert seq.limit["identity_ok"] is True
