"""Closed-form couplings/shifts against the brute-force enumeration."""

from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdce import (Dims, SystemParams, TargetPair, build_operators, effective_coupling,
                  effective_resonant_omega_a, energy_shifts, perturbation_report,
                  second_order_element)
from mdce.perturbation import (DegenerateIntermediateError, FixedPointError,
                               ResonanceSingularityError, minimal_dims)
from scipy.optimize import brentq

PARAMS = SystemParams(omega_m=0.3, omega_a=0.7, lam=0.01, g=0.03)
RESONANT = replace(PARAMS, omega_a=PARAMS.omega_c - PARAMS.omega_m)


def test_effective_coupling_reference_value():
    value = effective_coupling(TargetPair(0, 0), PARAMS)
    assert abs(value) == pytest.approx(1.18e-3, rel=0.01)


def test_effective_coupling_vanishes_without_either_coupling():
    assert effective_coupling(TargetPair(0, 0), replace(PARAMS, lam=0.0)) == 0.0
    assert effective_coupling(TargetPair(0, 0), replace(PARAMS, g=0.0)) == 0.0


def test_effective_coupling_singularities():
    with pytest.raises(ResonanceSingularityError):
        effective_coupling(TargetPair(0, 0), replace(PARAMS, omega_m=1e-12))
    with pytest.raises(ResonanceSingularityError):
        effective_coupling(TargetPair(0, 0), replace(PARAMS, omega_m=2.0))


@given(st.integers(0, 5), st.integers(0, 5))
def test_effective_coupling_scaling_exact(n, m):
    base = effective_coupling(TargetPair(0, 0), PARAMS)
    value = effective_coupling(TargetPair(n, m), PARAMS)
    assert value / base == pytest.approx(np.sqrt(n + 1.0) * np.sqrt(m + 1.0), rel=1e-14)


def test_higher_pairs_scale_by_sqrt2():
    base = abs(effective_coupling(TargetPair(0, 0), PARAMS))
    for pair in (TargetPair(1, 0), TargetPair(0, 1)):
        assert abs(effective_coupling(pair, PARAMS)) == pytest.approx(np.sqrt(2.0) * base, rel=1e-14)


def test_enumeration_matches_closed_form_on_resonance():
    for pair in (TargetPair(0, 0), TargetPair(1, 0), TargetPair(0, 1), TargetPair(1, 1),
                 TargetPair(2, 1), TargetPair(2, 3)):
        closed = effective_coupling(pair, RESONANT)
        generic, _ = second_order_element(pair.state_e, pair.state_g, RESONANT)
        assert generic == pytest.approx(closed, rel=1e-12)


def test_enumeration_zero_interaction():
    off = replace(RESONANT, lam=0.0, g=0.0)
    value, paths = second_order_element(TargetPair(0, 0).state_e,
                                        TargetPair(0, 0).state_g, off)
    assert value == 0.0
    assert paths == []


def test_enumeration_path_structure():
    # Four mediating levels for n >= 1; at n = 0 the photon-pressure path
    # amplitude carries a factor n and the |g, n-1, m+1> level does not exist,
    # leaving two contributing paths.
    pair = TargetPair(1, 0)
    _, paths = second_order_element(pair.state_e, pair.state_g, RESONANT)
    labels = {str(lbl) for lbl, _ in paths}
    assert labels == {"|e30>", "|g21>", "|e10>", "|g01>"}

    pair0 = TargetPair(0, 0)
    _, paths0 = second_order_element(pair0.state_e, pair0.state_g, RESONANT)
    assert {str(lbl) for lbl, _ in paths0} == {"|e20>", "|g11>"}


def test_enumeration_shift_matches_closed_form_small_pairs():
    # Self-energy agreement holds for the pairs with n <= 1 used throughout.
    for pair in (TargetPair(0, 0), TargetPair(1, 0), TargetPair(0, 1), TargetPair(1, 1)):
        shifts = energy_shifts(pair, PARAMS)
        gen_g, _ = second_order_element(pair.state_g, pair.state_g, PARAMS)
        gen_e, _ = second_order_element(pair.state_e, pair.state_e, PARAMS)
        assert gen_g == pytest.approx(shifts.shift_g, rel=1e-10)
        assert gen_e == pytest.approx(shifts.shift_e, rel=1e-10)


def test_degenerate_intermediate_raises():
    # at omega_a = omega_c the state |g,1,0> is degenerate with its coupled
    # intermediate |e,0,0>
    p = SystemParams(omega_m=0.3, omega_a=1.0, lam=0.01, g=0.03)
    state = TargetPair(0, 0).state_g
    with pytest.raises(DegenerateIntermediateError, match=r"e00"):
        second_order_element(state, state, p)


def test_truncation_too_small_rejected():
    ops = build_operators(Dims(3, 3))
    pair = TargetPair(1, 1)
    with pytest.raises(ValueError, match="too small"):
        second_order_element(pair.state_e, pair.state_g, RESONANT, ops)


def test_minimal_dims_covers_intermediates():
    pair = TargetPair(0, 0)
    dims = minimal_dims(pair.state_e, pair.state_g)
    assert dims.n_cav >= 4 and dims.n_mech >= 3


def test_shifts_zero_without_couplings():
    off = replace(PARAMS, lam=0.0, g=0.0)
    shifts = energy_shifts(TargetPair(0, 0), off)
    assert shifts.shift_g == 0.0 and shifts.shift_e == 0.0 and shifts.offset == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.floats(0.1, 0.45), st.floats(0.001, 0.05),
       st.floats(0.001, 0.05))
def test_offset_identity(n, m, omega_m, lam, g):
    p = SystemParams(omega_m=omega_m, omega_a=1.0 - omega_m + 0.013, lam=lam, g=g)
    shifts = energy_shifts(TargetPair(n, m), p)
    diff = shifts.shift_e - shifts.shift_g
    assert diff == pytest.approx(shifts.offset, rel=1e-12)


def test_shifts_reduce_to_qubit_cavity_form_when_g_zero():
    p = replace(PARAMS, g=0.0)
    for n, m in ((0, 0), (1, 2), (3, 1)):
        shifts = energy_shifts(TargetPair(n, m), p)
        lam2, wa, wc = p.lam**2, p.omega_a, p.omega_c
        assert shifts.shift_g == pytest.approx(
            -(n + 2) * lam2 / (wc + wa) - (n + 1) * lam2 / (wa - wc), rel=1e-14)
        assert shifts.shift_e == pytest.approx(
            n * lam2 / (wc + wa) - (n + 1) * lam2 / (wc - wa), rel=1e-14)


def test_shift_singularity_at_qubit_cavity_resonance():
    with pytest.raises(ResonanceSingularityError):
        energy_shifts(TargetPair(0, 0), replace(PARAMS, omega_a=PARAMS.omega_c))


def test_resonant_omega_a_reduces_to_bare_value():
    p = replace(PARAMS, lam=0.0, g=0.0)
    assert effective_resonant_omega_a(TargetPair(0, 0), p) == pytest.approx(
        p.omega_c - p.omega_m, abs=1e-14)


def test_resonant_omega_a_matches_root_find():
    pair = TargetPair(0, 0)
    fixed_point = effective_resonant_omega_a(pair, PARAMS)

    def residual(wa):
        offset = energy_shifts(pair, replace(PARAMS, omega_a=wa)).offset
        return PARAMS.omega_c - PARAMS.omega_m - offset - wa

    root = brentq(residual, 0.6, 0.75, xtol=1e-14)
    assert fixed_point == pytest.approx(root, abs=1e-10)


def test_fixed_point_nonconvergence_raises():
    pair = TargetPair(0, 0)
    with pytest.raises(FixedPointError):
        effective_resonant_omega_a(pair, PARAMS, max_iter=1)


def test_report_cross_validates():
    rep = perturbation_report(TargetPair(0, 0), PARAMS)
    assert rep.coupling_generic == pytest.approx(rep.coupling_closed, rel=1e-12)
    assert rep.offset_identity_error < 1e-12
    assert len(rep.paths) == 2
