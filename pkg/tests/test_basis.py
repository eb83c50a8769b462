import math

import numpy as np
import pytest

from qbouncer import basis as basis_mod
from qbouncer.airy import airy_zeros
from qbouncer.basis import (auto_n_max, build_basis, coefficient_closed_form,
                            coefficient_quadrature, dump_spectrum, estimate_time_scales,
                            load_spectrum)
from qbouncer.errors import ConsistencyError, DomainError, TruncationError


def test_completeness_and_tail(basis):
    assert abs(basis.completeness - 1.0) < 1e-6
    assert basis.tail_weight(10) < 1e-8


def test_coefficients_against_frozen_quadrature(oracles):
    for rec in oracles["coefficients"]:
        table = airy_zeros(rec["n"])
        c = coefficient_closed_form(rec["n"], rec["z0"], rec["sigma"], table)
        assert c == pytest.approx(rec["c"], rel=1e-9, abs=1e-14)


def test_closed_form_matches_quadrature_everywhere(basis):
    n = np.arange(1, basis.n_max + 1)
    quad = coefficient_quadrature(n, basis.z0, basis.sigma, basis.zero_table)
    assert np.max(np.abs(quad - basis.coefficients)) < 1e-6


def test_quadrature_converges_at_second_order():
    # A packet touching the wall: the integrand has a kink-free zero at z = 0
    # but a nonzero slope, so the trapezoidal error falls like dz^2.
    table = airy_zeros(5)
    vals = [coefficient_quadrature(2, 1.5, 1.0, table, dz) for dz in (0.08, 0.04, 0.02)]
    ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
    assert 3.5 < ratio < 4.5


def test_mean_energy_exact(basis):
    # <p^2> = 1 / sigma^2 and <z> = z0 for the initial Gaussian
    assert basis.mean_energy == pytest.approx(basis.z0 + 1 / basis.sigma ** 2, abs=1e-9)


def test_level_indices(basis):
    assert basis.n_peak == 215
    assert abs(basis.energies[basis.n0 - 1] - basis.z0) == pytest.approx(
        np.min(np.abs(basis.energies - basis.z0)))
    assert abs(basis.energies[basis.n0 - 1] - 100.0) < 0.5


def test_time_scales(basis):
    t_cl, t_rev = estimate_time_scales(basis)
    assert abs(t_cl - 20.0) < 0.1
    assert t_rev == pytest.approx(8 * 100 ** 2 / math.pi, rel=0.01)


def test_classical_period_scaling(basis):
    t1, _ = estimate_time_scales(basis)
    t2, _ = estimate_time_scales(build_basis(200.0, 1.0, "auto"))
    assert t2 / t1 == pytest.approx(math.sqrt(2.0), rel=0.01)


@pytest.mark.parametrize("sigma", [0.5, 2.0])
def test_auto_truncation(sigma):
    b = build_basis(100.0, sigma, "auto")
    assert b.n_max == auto_n_max(100.0, sigma)
    assert abs(b.completeness - 1.0) < 1e-6
    assert b.tail_weight() < 1e-8


def test_too_small_basis_rejected():
    with pytest.raises(TruncationError):
        build_basis(100.0, 1.0, 220)


@pytest.mark.parametrize("kwargs", [
    dict(z0=-1.0, sigma=1.0), dict(z0=100.0, sigma=0.0),
    dict(z0=100.0, sigma=1.0, p0=0.5), dict(z0=100.0, sigma=1.0, n_max=2),
    dict(z0=100.0, sigma=1.0, n_max="many"),
])
def test_bad_parameters(kwargs):
    with pytest.raises(DomainError):
        build_basis(**kwargs)


def test_spot_check_catches_wrong_coefficients(monkeypatch):
    def skewed(n, z0, sigma, table, dz=2e-3):
        return 1.01 * coefficient_closed_form(n, z0, sigma, table)

    monkeypatch.setattr(basis_mod, "coefficient_quadrature", skewed)
    with pytest.raises(ConsistencyError):
        build_basis(100.0, 1.0, 500)


def test_basis_is_read_only(basis):
    with pytest.raises(ValueError):
        basis.coefficients[0] = 1.0


def test_spectrum_round_trip(basis, tmp_path):
    path = tmp_path / "spectrum.json"
    dump_spectrum(basis, path)
    back = load_spectrum(path)
    assert np.array_equal(back["n"], np.arange(1, 501))
    assert np.array_equal(back["z_n"], basis.energies)
    assert np.array_equal(back["N_n"], basis.normalizations)
    assert np.array_equal(back["C_n"], basis.coefficients)
