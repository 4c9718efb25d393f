"""Capillary and one-step movement energies, contact angle measurement."""

import numpy as np
import pytest

from dropflow.energy import AdhesionField, capillary, atw, contact_angle_measure
from dropflow.grid import (
    BinarySet,
    HalfSpaceGrid,
    perimeter,
    rasterize_cap,
    signed_distance,
)

H = 1.0 / 32


def _grid(lat=0.8, ht=0.9, h=H):
    return HalfSpaceGrid.cover(lat, ht, h)


def test_adhesion_field_enforces_coercivity():
    g = _grid()
    with pytest.raises(ValueError):
        AdhesionField(g, np.full((g.ny, g.nx), 0.95), eta=0.1)  # 0.95 > 1 - 2 eta
    with pytest.raises(ValueError):
        AdhesionField.constant(g, 0.3, eta=0.6)
    fld = AdhesionField.constant(g, -0.6)
    assert np.max(np.abs(fld.beta)) <= 1.0 - 2.0 * fld.eta + 1e-12


def test_capillary_hemisphere():
    g = _grid()
    E = rasterize_cap(g, 0.5, 0.0)
    eb = capillary(E, AdhesionField.constant(g, 0.0))
    assert eb.adhesion == pytest.approx(0.0)
    assert eb.total == pytest.approx(2.0 * np.pi * 0.25, rel=0.04)


def test_capillary_winterbottom_closed_form():
    # C_beta(W_rho) = pi rho^2 (1+b)^2 (2-b) for the equilibrium cap
    g = _grid()
    E = rasterize_cap(g, 0.5, 0.25)
    eb = capillary(E, AdhesionField.constant(g, 0.5))
    assert eb.total == pytest.approx(np.pi * 0.25 * 2.25 * 1.5, rel=0.05)
    assert eb.adhesion > 0.0


def test_capillary_empty_set():
    g = _grid(0.4, 0.4, 1.0 / 8)
    eb = capillary(BinarySet.empty(g), AdhesionField.constant(g, 0.3))
    assert eb.total == 0.0


def test_capillary_coercivity_random_sets(rng):
    # C_beta(E) >= eta P(E) whenever |beta| <= 1 - 2 eta
    g = _grid()
    beta = AdhesionField.constant(g, -0.6, eta=0.2)
    for _ in range(8):
        E = rasterize_cap(
            g,
            rng.uniform(0.1, 0.4),
            rng.uniform(0.0, 0.3),
            (rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)),
        )
        eb = capillary(E, beta)
        assert eb.total >= 0.2 * eb.perimeter - 1e-12


def test_atw_identity_has_zero_dissipation():
    g = _grid()
    E0 = rasterize_cap(g, 0.4, 0.0)
    beta = AdhesionField.constant(g, 0.2)
    eb = atw(E0, E0, beta, tau=0.01)
    assert eb.dissipation == 0.0
    assert eb.total == pytest.approx(capillary(E0, beta).total)


def test_atw_single_far_cell():
    # adding one far cell costs d(cell) h^3 / tau in dissipation, exactly the
    # signed distance sampled there
    g = _grid(0.8, 1.3)
    E0 = rasterize_cap(g, 0.3, 0.6)
    sd0 = signed_distance(E0)
    bits = E0.bits.copy()
    k = int(round(1.1 / H - 0.5))
    j = i = g.ny // 2
    assert not bits[k, j, i]
    bits[k, j, i] = True
    E = BinarySet(g, bits)
    tau = 0.01
    eb = atw(E, E0, AdhesionField.constant(g, 0.0), tau, sd0=sd0)
    d = eb.dissipation * tau / g.cell_volume
    # the flipped cell sits 0.2 above the ball surface
    assert d == pytest.approx(0.2, abs=2 * H)


def test_atw_radial_shell_oracle():
    # E0 = interior unit ball, E = concentric 0.9 ball:
    # dissipation = (1/tau) 4 pi int_{0.9}^{1} t^2 (1 - t) dt ~ 0.0527 / tau
    h = H
    g = HalfSpaceGrid.cover(1.0 + 10 * h, 2.3, h)
    E0 = rasterize_cap(g, 1.0, 1.15)
    E = rasterize_cap(g, 0.9, 1.15)
    tau = 0.01
    eb = atw(E, E0, AdhesionField.constant(g, 0.0), tau)
    assert eb.dissipation == pytest.approx(0.0527 / tau, rel=0.10)


def test_atw_dissipation_nonnegative_with_slack(rng):
    g = _grid()
    E0 = rasterize_cap(g, 0.35, 0.1)
    beta = AdhesionField.constant(g, 0.0)
    tau = 0.01
    for _ in range(6):
        bits = E0.bits.copy()
        flips = rng.random(bits.shape) < 0.02
        flips[:, :4, :] = flips[:, -4:, :] = False
        flips[:, :, :4] = flips[:, :, -4:] = False
        flips[-4:, :, :] = False
        bits ^= flips
        E = BinarySet(g, bits)
        eb = atw(E, E0, beta, tau)
        slack = 4.0 * g.h * E.symdiff_volume(E0) / tau
        assert eb.dissipation >= -slack


def test_atw_monotone_in_beta():
    g = _grid()
    E0 = rasterize_cap(g, 0.4, 0.0)
    E = rasterize_cap(g, 0.35, 0.0)
    lo = atw(E, E0, AdhesionField.constant(g, 0.1), 0.01)
    hi = atw(E, E0, AdhesionField.constant(g, 0.3), 0.01)
    assert lo.total <= hi.total


def test_perimeter_and_adhesion_scale_quadratically():
    g1 = _grid(h=1.0 / 16)
    E1 = rasterize_cap(g1, 0.4, 0.0)
    g2 = HalfSpaceGrid(g1.nx, g1.ny, g1.nz, 2.0 / 16, 2 * g1.origin_x, 2 * g1.origin_y)
    E2 = BinarySet(g2, E1.bits.copy())
    b1 = AdhesionField.constant(g1, 0.4)
    b2 = AdhesionField.constant(g2, 0.4)
    assert perimeter(E2) == pytest.approx(4.0 * perimeter(E1), rel=1e-12)
    eb1 = capillary(E1, b1)
    eb2 = capillary(E2, b2)
    assert eb2.adhesion == pytest.approx(4.0 * eb1.adhesion, rel=1e-12)


def test_contact_angle_hemisphere():
    # the 4h plane-fit window needs a few cells across the cap for the
    # curvature bias to drop under the stated bound
    g = _grid(h=1.0 / 48)
    E = rasterize_cap(g, 0.5, 0.0)
    rep = contact_angle_measure(E, AdhesionField.constant(g, 0.0))
    assert rep.n_contact_cells > 0
    assert rep.mean_abs <= 0.10


def test_contact_angle_winterbottom():
    g = _grid(h=1.0 / 48)
    E = rasterize_cap(g, 0.5, 0.25)
    rep = contact_angle_measure(E, AdhesionField.constant(g, 0.5))
    assert rep.mean_abs <= 0.12


def test_contact_angle_detached_droplet():
    g = _grid(0.8, 1.3)
    E = rasterize_cap(g, 0.3, 0.6)
    rep = contact_angle_measure(E, AdhesionField.constant(g, 0.2))
    assert rep.n_contact_cells == 0


def test_energy_breakdown_total_is_sum():
    g = _grid()
    E0 = rasterize_cap(g, 0.4, 0.0)
    E = rasterize_cap(g, 0.36, 0.0)
    eb = atw(E, E0, AdhesionField.constant(g, 0.25), 0.02)
    assert eb.total == eb.perimeter + eb.adhesion + eb.dissipation
