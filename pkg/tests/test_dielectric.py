import numpy as np
import pytest

from atomwall import (
    ConfigError,
    DomainError,
    IdealMetal,
    KKSettings,
    NinhamParsegian,
    OpticalTable,
    Plasma,
    StaticPermittivity,
    TabulatedKK,
    ValidationError,
    eps_imag_part,
    eps_iw,
    f0,
)
from atomwall.dielectric import DIELECTRIC, METAL

from conftest import (
    NU,
    WP,
    drude_eps_analytic,
    drude_nk,
    lorentz_eps_analytic,
)


class TestPlasma:
    def test_at_plasma_frequency(self):
        assert eps_iw(Plasma(WP), WP) == pytest.approx(2.0, rel=1e-14)

    def test_plasma_identity(self):
        # xi * sqrt(eps - 1) recovers omega_p
        model = Plasma(WP)
        for xi in np.geomspace(1e12, 1e18, 25):
            eps = eps_iw(model, float(xi))
            assert xi * np.sqrt(eps - 1.0) == pytest.approx(WP, rel=1e-12)

    def test_metal_kind_and_zero_rejection(self):
        assert Plasma(WP).kind == METAL
        with pytest.raises(DomainError):
            eps_iw(Plasma(WP), 0.0)

    def test_f0_is_unity(self):
        assert f0(Plasma(WP)) == 1.0


class TestStaticPermittivity:
    def test_constant_at_all_frequencies(self):
        model = StaticPermittivity(3.84)
        for xi in (0.0, 1e13, 1e16, 1e19):
            assert eps_iw(model, xi) == 3.84

    def test_f0(self):
        assert f0(StaticPermittivity(3.84)) == pytest.approx(0.58678, abs=1e-5)
        assert f0(StaticPermittivity(1.0)) == 0.0

    def test_kind(self):
        assert StaticPermittivity(3.84).kind == DIELECTRIC

    def test_rejects_below_unity(self):
        with pytest.raises(DomainError):
            StaticPermittivity(0.9)


class TestNinhamParsegian:
    def test_single_term_closed_form(self):
        c1, w1 = 2.0, 1e16
        model = NinhamParsegian(((c1, w1),))
        for xi in np.geomspace(1e13, 1e18, 40):
            expected = 1.0 + c1 / (1.0 + (xi / w1) ** 2)
            assert eps_iw(model, float(xi)) == pytest.approx(expected, rel=1e-15)

    def test_f0_from_term_sum(self):
        model = NinhamParsegian(((1.5, 1e15), (0.5, 2e16)))
        assert f0(model) == pytest.approx(2.0 / 4.0, rel=1e-14)

    def test_rejects_bad_terms(self):
        with pytest.raises(DomainError):
            NinhamParsegian(((0.0, 1e15),))
        with pytest.raises(DomainError):
            NinhamParsegian(())


class TestIdealMetal:
    def test_f0(self):
        assert f0(IdealMetal()) == 1.0

    def test_eps_iw_is_rejected(self):
        with pytest.raises(DomainError):
            eps_iw(IdealMetal(), 1e15)


class TestOpticalTableValidation:
    def _arrays(self, m=10):
        omega = np.geomspace(1e14, 1e17, m)
        return omega, np.full(m, 1.2), np.full(m, 0.3)

    def test_too_few_rows(self):
        omega, n, k = self._arrays(5)
        with pytest.raises(ValidationError):
            OpticalTable(omega, n, k)

    def test_non_monotone(self):
        omega, n, k = self._arrays()
        omega[4] = omega[3]
        with pytest.raises(ValidationError):
            OpticalTable(omega, n, k)

    def test_negative_k(self):
        omega, n, k = self._arrays()
        k[2] = -0.1
        with pytest.raises(ValidationError):
            OpticalTable(omega, n, k)


class TestEpsImagPart:
    def test_exact_at_grid_node(self, drude_table):
        i = 217
        omega_i = float(drude_table.omega[i])
        expected = 2.0 * drude_table.n[i] * drude_table.k[i]
        assert eps_imag_part(drude_table, omega_i) == expected

    def test_drude_value_at_nu(self, drude_table):
        # eps''(nu) = wp^2 nu / (nu (nu^2 + nu^2)) = wp^2/(2 nu^2)
        expected = WP ** 2 / (2.0 * NU ** 2)
        assert eps_imag_part(drude_table, NU) == pytest.approx(expected, rel=1e-3)

    def test_zero_extinction_table(self):
        omega = np.geomspace(1e14, 1e17, 12)
        table = OpticalTable(omega, np.full(12, 1.5), np.zeros(12))
        grid = np.geomspace(2e14, 5e16, 30)
        assert np.all(eps_imag_part(table, grid) == 0.0)

    def test_rejects_nonpositive_frequency(self, drude_table):
        with pytest.raises(DomainError):
            eps_imag_part(drude_table, 0.0)

    def test_below_range_uses_drude(self, drude_table):
        omega = drude_table.omega_min / 7.0
        expected = WP ** 2 * NU / (omega * (omega ** 2 + NU ** 2))
        assert eps_imag_part(drude_table, omega) == pytest.approx(expected, rel=1e-12)

    def test_below_range_metal_like_without_drude_errors(self):
        omega = np.geomspace(1e13, 1e17, 40)
        n, k = drude_nk(omega)
        table = OpticalTable(omega, n, k)  # no low_ext
        with pytest.raises(ConfigError):
            eps_imag_part(table, omega[0] / 10.0)

    def test_above_range_power_tail(self, drude_table):
        w_max = drude_table.omega_max
        e_last = 2.0 * drude_table.n[-1] * drude_table.k[-1]
        assert eps_imag_part(drude_table, 2.0 * w_max) == pytest.approx(
            e_last / 8.0, rel=1e-12
        )
        # continuous at the boundary
        assert eps_imag_part(drude_table, w_max) == pytest.approx(e_last, rel=1e-12)


class TestKKTransform:
    def test_drude_oracle(self, drude_table):
        wall = TabulatedKK(drude_table, METAL)
        for xi in np.geomspace(1e13, 1e17, 25):
            got = eps_iw(wall, float(xi))
            assert got == pytest.approx(drude_eps_analytic(xi), rel=1e-3)

    def test_spec_value_at_nu(self, drude_table):
        wall = TabulatedKK(drude_table, METAL)
        assert eps_iw(wall, NU) == pytest.approx(1.0 + WP ** 2 / (2.0 * NU ** 2), rel=1e-3)

    def test_lorentz_dielectric_oracle(self, lorentz_table):
        wall = TabulatedKK(lorentz_table, DIELECTRIC)
        for xi in (0.0, 1e15, 1e16, 1e17):
            assert eps_iw(wall, xi) == pytest.approx(lorentz_eps_analytic(xi), rel=2e-3)

    def test_f0_dielectric_from_zero_transform(self, lorentz_table):
        wall = TabulatedKK(lorentz_table, DIELECTRIC)
        eps0 = lorentz_eps_analytic(0.0)
        assert f0(wall) == pytest.approx((eps0 - 1.0) / (eps0 + 1.0), rel=2e-3)

    def test_metal_rejects_zero_frequency(self, drude_table):
        wall = TabulatedKK(drude_table, METAL)
        with pytest.raises(DomainError):
            eps_iw(wall, 0.0)

    def test_metal_requires_drude_completion(self):
        omega = np.geomspace(1e13, 1e17, 40)
        n, k = drude_nk(omega)
        table = OpticalTable(omega, n, k)
        with pytest.raises(ConfigError):
            TabulatedKK(table, METAL)

    def test_dielectric_rejects_metal_like_low_end(self):
        omega = np.geomspace(1e13, 1e17, 40)
        n, k = drude_nk(omega)
        table = OpticalTable(omega, n, k)
        with pytest.raises(ConfigError):
            TabulatedKK(table, DIELECTRIC)

    def test_precomputed_grid_matches_direct(self, drude_table):
        direct = TabulatedKK(drude_table, METAL)
        gridded = TabulatedKK(drude_table, METAL)
        gridded.precompute(1e13, 1e17)
        for xi in np.geomspace(2e13, 8e16, 17):
            a = eps_iw(direct, float(xi))
            b = eps_iw(gridded, float(xi))
            assert b == pytest.approx(a, rel=1e-4)

    def test_auto_memoization_after_threshold(self, drude_table):
        settings = KKSettings(memoize_threshold=10, grid_points_per_decade=12)
        wall = TabulatedKK(drude_table, METAL, settings=settings)
        for xi in np.geomspace(1e14, 1e16, 12):
            eps_iw(wall, float(xi))
        assert wall._grid is not None
        # grid answers stay close to the analytic oracle
        assert eps_iw(wall, 3e15) == pytest.approx(drude_eps_analytic(3e15), rel=1e-3)


MODELS_FOR_MONOTONICITY = [
    Plasma(WP),
    StaticPermittivity(3.84),
    NinhamParsegian(((1.5, 1e15), (0.8, 2e16))),
]


@pytest.mark.parametrize("model", MODELS_FOR_MONOTONICITY, ids=lambda m: type(m).__name__)
def test_eps_iw_monotone_and_above_unity(model):
    grid = np.geomspace(1e12, 1e19, 60)
    values = eps_iw(model, grid)
    assert np.all(values >= 1.0)
    assert np.all(np.diff(values) <= 0.0)


def test_tabulated_eps_iw_monotone_and_above_unity(drude_table):
    wall = TabulatedKK(drude_table, METAL)
    wall.precompute(1e13, 1e18)
    grid = np.geomspace(1e13, 1e18, 60)
    values = eps_iw(wall, grid)
    assert np.all(values >= 1.0)
    assert np.all(np.diff(values) <= 0.0)


def test_f0_dielectrics_in_unit_interval():
    rng = np.random.default_rng(7)
    for _ in range(50):
        eps0 = float(rng.uniform(1.0, 50.0))
        value = f0(StaticPermittivity(eps0))
        assert 0.0 <= value < 1.0


def test_kk_settings_validation():
    with pytest.raises(DomainError):
        KKSettings(rel_tol=0.5)
    with pytest.raises(DomainError):
        KKSettings(rel_tol=0.0)


def test_high_tail_quadrature_path_matches_closed_form(drude_table):
    # p = 3 goes through the closed form; a nearby exponent through quadrature
    from atomwall.dielectric import _tail_contribution

    exact = _tail_contribution(drude_table, 2e16, 1e-9)
    nearby = OpticalTable(drude_table.omega, drude_table.n, drude_table.k,
                          low_ext=drude_table.low_ext, high_exponent=3.0 + 1e-9)
    assert _tail_contribution(nearby, 2e16, 1e-9) == pytest.approx(exact, rel=1e-6)


def test_concurrent_queries_match_sequential(drude_table):
    from concurrent.futures import ThreadPoolExecutor

    xis = [float(x) for x in np.geomspace(2e13, 5e16, 48)]
    sequential_wall = TabulatedKK(drude_table, METAL)
    sequential_wall.precompute(1e13, 1e17)
    expected = [eps_iw(sequential_wall, xi) for xi in xis]

    threaded_wall = TabulatedKK(drude_table, METAL)
    threaded_wall.precompute(1e13, 1e17)
    with ThreadPoolExecutor(max_workers=8) as pool:
        got = list(pool.map(lambda xi: eps_iw(threaded_wall, xi), xis))
    assert got == expected
