import dataclasses
import math

import numpy as np
import pytest

from tshape_router.errors import InvalidParamsError, WindowTooSmallError
from tshape_router.model import ModelParams, Port, mode_from_wavenumber, wavenumber_from_energy
from tshape_router.scattering import (
    SiteWindow,
    amplitudes_from_a,
    amplitudes_from_b,
    reconstruct_fields,
    residual_check,
    scatter,
    scatter_from_a,
    scatter_from_b,
    transfer_amplitude,
)


def _random_tuples(rng, n):
    k = rng.uniform(0.01, math.pi - 0.01, n)
    g_a = rng.uniform(0.0, 1.0, n)
    g_b = rng.uniform(0.0, 1.0, n)
    omega_tls = rng.uniform(7.0, 13.0, n)
    energy = 10.0 - 2.0 * np.cos(k)
    return k, energy - omega_tls, g_a, g_b


# --- Worked examples ----------------------------------------------------------


def test_from_a_at_p0(p0, mid_band):
    sol = scatter_from_a(p0, mid_band)
    assert sol.amplitude("t") == pytest.approx(2 / 3, abs=1e-15)
    assert sol.amplitude("r") == pytest.approx(-1 / 3, abs=1e-15)
    assert sol.amplitude("t_b") == pytest.approx(2j / 3, abs=1e-15)
    assert sol.probabilities["T_aa"] == pytest.approx(4 / 9, abs=1e-15)
    assert sol.probabilities["R_aa"] == pytest.approx(1 / 9, abs=1e-15)
    assert sol.probabilities["T_ab"] == pytest.approx(4 / 9, abs=1e-15)
    assert sol.arm_probabilities == pytest.approx({"a": 5 / 9, "b": 4 / 9})
    assert sol.physical


def test_from_b_at_p0(p0, mid_band):
    sol = scatter_from_b(p0, mid_band)
    assert sol.amplitude("t_a") == pytest.approx(2j / 3, abs=1e-15)
    assert sol.amplitude("r_b") == pytest.approx(1 / 3, abs=1e-15)
    assert sol.probabilities["T_ba"] == pytest.approx(8 / 9, abs=1e-15)
    assert sol.probabilities["R_bb"] == pytest.approx(1 / 9, abs=1e-15)


def test_decoupled_tls_is_transparent_and_mirrors(mid_band):
    p = ModelParams.uniform(10.0, 1.0, 0.0, 0.0, 10.0)
    from_a = scatter_from_a(p, mid_band)
    from_b = scatter_from_b(p, mid_band)
    assert from_a.amplitude("t") == 1.0
    assert from_a.amplitude("t_b") == 0.0
    assert from_b.amplitude("r_b") == -1.0
    assert from_a.atom_amplitude == 0.0


def test_no_coupling_to_arm_a_reflects_everything_from_b(mid_band):
    p = ModelParams.uniform(10.0, 1.0, 0.0, 0.3, 10.0)
    sol = scatter_from_b(p, mid_band)
    assert sol.probabilities["R_bb"] == pytest.approx(1.0, abs=1e-15)
    assert sol.probabilities["T_ba"] == 0.0
    # Resonant reflection flips the sign of the bare mirror.
    assert sol.amplitude("r_b") == pytest.approx(1.0, abs=1e-15)
    assert sol.reflection_phase == pytest.approx(0.0, abs=1e-15)


def test_scatter_dispatches_on_port(p0, mid_band):
    assert scatter(p0, mid_band, Port.FROM_A).port is Port.FROM_A
    assert scatter(p0, mid_band, Port.FROM_B).port is Port.FROM_B


def test_unequal_arms_rejected(mid_band):
    p = ModelParams(10.0, 10.5, 1.0, 1.0, 0.3, 0.3, 10.0)
    with pytest.raises(InvalidParamsError):
        scatter_from_a(p, mid_band)


def test_solution_serialises_complex_as_pairs(p0, mid_band):
    record = scatter_from_a(p0, mid_band).as_dict()
    assert record["port"] == "a"
    re, im = record["amplitudes"]["t_b"]
    assert re == pytest.approx(0.0, abs=1e-15)
    assert im == pytest.approx(2 / 3)
    assert record["unitarity_residual"] < 1e-15


# --- Properties ---------------------------------------------------------------


def test_unitarity_over_random_tuples(rng):
    k, detuning, g_a, g_b = _random_tuples(rng, 10_000)
    t, r, t_b = amplitudes_from_a(k, detuning, 1.0, g_a, g_b)
    t_a, r_b = amplitudes_from_b(k, detuning, 1.0, g_a, g_b)
    from_a = np.abs(t) ** 2 + np.abs(r) ** 2 + np.abs(t_b) ** 2
    from_b = 2.0 * np.abs(t_a) ** 2 + np.abs(r_b) ** 2
    assert np.max(np.abs(from_a - 1.0)) < 1e-12
    assert np.max(np.abs(from_b - 1.0)) < 1e-12


def test_transfer_amplitudes_coincide(rng):
    k, detuning, g_a, g_b = _random_tuples(rng, 10_000)
    _, _, t_b = amplitudes_from_a(k, detuning, 1.0, g_a, g_b)
    t_a, _ = amplitudes_from_b(k, detuning, 1.0, g_a, g_b)
    assert np.max(np.abs(t_b - t_a)) < 1e-14
    assert np.max(np.abs(t_a - transfer_amplitude(k, detuning, 1.0, g_a, g_b))) == 0.0


def test_transfer_from_a_never_exceeds_half(rng):
    n = 100_000
    k = rng.uniform(0.01, math.pi - 0.01, n)
    detuning = rng.uniform(-3.0, 3.0, n)
    g_a = rng.uniform(0.0, 1.0, n)
    g_b = rng.uniform(0.0, 1.0, n)
    _, _, t_b = amplitudes_from_a(k, detuning, 1.0, g_a, g_b)
    assert np.max(np.abs(t_b) ** 2) <= 0.5 + 1e-12


def test_half_transfer_from_a_at_resonance_and_decay_match():
    # k = pi/2: no Lamb shift, decay match needs g_a = sqrt(2) g_b.
    p = ModelParams.uniform(10.0, 1.0, math.sqrt(2.0) * 0.2, 0.2, 10.0)
    mode = wavenumber_from_energy(10.0, 10.0, 1.0)
    sol = scatter_from_a(p, mode)
    assert sol.probabilities["T_ab"] == pytest.approx(0.5, abs=1e-9)


def test_vectorised_kernels_broadcast():
    k = np.linspace(0.1, 3.0, 7)
    t, r, t_b = amplitudes_from_a(k, 0.0, 1.0, 0.3, 0.3)
    assert t.shape == r.shape == t_b.shape == (7,)
    np.testing.assert_allclose(r, t - 1.0, rtol=0, atol=0)


# --- Field reconstruction -----------------------------------------------------


@pytest.mark.parametrize("port", [Port.FROM_A, Port.FROM_B], ids=["from_a", "from_b"])
def test_residuals_vanish_at_random_points(rng, port):
    worst = 0.0
    for _ in range(100):
        g_a, g_b = rng.uniform(0.0, 1.0, 2)
        omega_tls = rng.uniform(7.0, 13.0)
        k = rng.uniform(0.05, math.pi - 0.05)
        p = ModelParams.uniform(10.0, 1.0, g_a, g_b, omega_tls)
        sol = scatter(p, mode_from_wavenumber(k, 10.0, 1.0), port)
        worst = max(worst, residual_check(p, sol, reconstruct_fields(sol)))
    assert worst < 1e-12


@pytest.mark.parametrize(
    "g_a, g_b",
    [
        pytest.param(0.3, 0.3, id="equal"),
        pytest.param(0.5, 0.1, id="strong_a"),
        pytest.param(0.1, 0.5, id="strong_b"),
        pytest.param(0.0, 0.4, id="only_b"),
        pytest.param(0.4, 0.0, id="only_a"),
    ],
)
@pytest.mark.parametrize("port", [Port.FROM_A, Port.FROM_B], ids=["from_a", "from_b"])
def test_residuals_vanish_on_the_pole(g_a, g_b, port):
    mode = mode_from_wavenumber(1.1, 10.0, 1.0)
    p = ModelParams.uniform(10.0, 1.0, g_a, g_b, mode.energy)
    sol = scatter(p, mode, port)
    assert math.isfinite(abs(sol.atom_amplitude))
    assert residual_check(p, sol, reconstruct_fields(sol)) < 1e-12


def test_field_profile_values(p0, mid_band):
    sol = scatter_from_a(p0, mid_band)
    profile = reconstruct_fields(sol, SiteWindow(a_min=-6, a_max=6, b_max=8))
    assert profile.site_a(0) == pytest.approx(sol.amplitude("t"))
    assert profile.site_b(1) == pytest.approx(sol.amplitude("t_b") * 1j)
    assert sol.boundary_amplitude == pytest.approx(profile.site_b(1) / math.sin(mid_band.k))


@pytest.mark.parametrize("port", [Port.FROM_A, Port.FROM_B], ids=["from_a", "from_b"])
def test_perturbed_atom_amplitude_is_detected(p0, mid_band, port):
    sol = scatter(p0, mid_band, port)
    profile = reconstruct_fields(sol)
    perturbed = dataclasses.replace(profile, u_e=profile.u_e + 1e-3)
    assert residual_check(p0, sol, perturbed) >= p0.g_a * 1e-3 * (1 - 1e-9)


def test_small_window_rejected(p0, mid_band):
    sol = scatter_from_a(p0, mid_band)
    profile = reconstruct_fields(sol, SiteWindow(a_min=-2, a_max=2, b_max=3))
    with pytest.raises(WindowTooSmallError):
        residual_check(p0, sol, profile)


def test_empty_window_rejected():
    with pytest.raises(WindowTooSmallError):
        SiteWindow(a_min=3, a_max=-3)
