import numpy as np
import pytest

from voidcell.densities import (constant_surface, crystalline_surface, homogeneous_bulk,
                                nonconvex_surface, BulkDensity, strain_sq)
from voidcell.geometry import make_stencil
from voidcell.relaxation import (UnsupportedDensity, fqc_envelope, gbv_envelope, gbv_table,
                                 stencil_directions, write_envelope_csv)

ST16 = make_stencil(16)


def test_constant_norm_returns_itself():
    for nu in stencil_directions()[:4]:
        res = gbv_envelope(constant_surface(1.5), (0.3, 0.3), nu, resolution=32)
        assert abs(res.normalized - 1.5) <= 1.5 * ST16.tau


def test_crystalline_returns_itself():
    g = crystalline_surface()
    for nu in stencil_directions()[:3]:
        res = gbv_envelope(g, (0.0, 0.0), nu, resolution=32)
        want = res.diagnostics["pointwise_g"]
        assert abs(res.normalized - want) <= ST16.tau * want + res.tolerance


def test_nonconvex_strictly_below():
    res = gbv_envelope(nonconvex_surface(), (0.0, 0.0), np.array([0.0, 1.0]), resolution=32)
    assert res.diagnostics["pointwise_g"] == 2.0
    assert res.normalized < 2.0 - res.tolerance
    assert res.normalized >= 1.0                 # never below the lower growth constant


def test_table_and_csv(tmp_path):
    rows = gbv_table(constant_surface(), (0.0, 0.0), resolution=16,
                     directions=stencil_directions()[:2])
    assert len(rows) == 2 and len(rows[0]) == 6
    path = tmp_path / "env.csv"
    write_envelope_csv(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "angle,nu1,nu2,g,envelope,tolerance" and len(lines) == 3


def test_fqc_convex_equals_f():
    f = homogeneous_bulk()
    xi = np.array([[0.5, 0.2], [0.1, -0.3]])
    out = fqc_envelope(f, (0.0, 0.0), xi, cross_check=True, spacing=1 / 32)
    assert out["value"] == pytest.approx(0.385)
    assert out["cross_check"] == pytest.approx(0.385, abs=1e-8)


def test_fqc_refuses_nonconvex():
    f = BulkDensity(lambda x, xi: strain_sq(xi), alpha=1.0, beta=1.0, convex_in_xi=False)
    with pytest.raises(UnsupportedDensity):
        fqc_envelope(f, (0.0, 0.0), np.eye(2))
