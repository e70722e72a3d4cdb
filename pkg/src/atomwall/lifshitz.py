"""Finite-temperature free energy of a ground-state atom facing a flat wall.

The free energy is a Matsubara sum over imaginary frequencies,

    F(a,T) = -k_B T/(8 a^3) * { 2 alpha(0) f(0)
             + sum_{l>=1} alpha(i zeta_l w_c) *
               int_{zeta_l}^inf dy e^{-y} [(2y^2 - zeta_l^2) r_par + zeta_l^2 r_perp] },

with dimensionless Matsubara frequencies zeta_l = 4 pi l k_B T a/(hbar c),
the characteristic frequency w_c = c/(2a), and Fresnel-type reflection
coefficients r_par, r_perp evaluated at eps_l = eps(i zeta_l w_c).  With
alpha carried as a volume (m^3) the braced sum is a volume and F is in
joules; the result is negative (attractive) for every non-trivial input.

The per-frequency integral is shifted to y = zeta + t and evaluated with
exponentially weighted (Gauss-Laguerre) quadrature whose order doubles until
successive estimates agree; an ideal-metal wall instead uses the closed form
int_zeta^inf 2 y^2 e^{-y} dy = 2 e^{-zeta} (zeta^2 + 2 zeta + 2).  The sum
is truncated adaptively, since zeta_1 spans several orders of magnitude over
the supported separation range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, HBAR, K_B
from .dielectric import IdealMetal, TabulatedKK, eps_iw, f0
from .errors import ConvergenceError, DomainError, UsageError
from .polarizability import TabulatedAlpha, alpha_iw, static_alpha
from .quadrature import gauss_laguerre, gauss_legendre

# separations where the plane-wall Lifshitz description is trusted
SOFT_RANGE = (3e-9, 1e-5)   # outside: warn
HARD_RANGE = (1e-9, 1e-4)   # outside: reject

_QUAD_START = 32
_QUAD_CAP = 512
_BLOCK = 512


@dataclass(frozen=True)
class NumericalTolerances:
    """Truncation and quadrature controls for the Matsubara sum."""

    series_rel_tol: float = 1e-9
    quad_rel_tol: float = 1e-9
    max_terms: int = 10 ** 6
    consecutive_small: int = 3

    def __post_init__(self):
        if not (1e-14 <= self.series_rel_tol < 1.0):
            raise DomainError("series_rel_tol must lie in [1e-14, 1)")
        if not (0.0 < self.quad_rel_tol < 1.0):
            raise DomainError("quad_rel_tol must lie in (0, 1)")
        if self.max_terms < 1 or self.consecutive_small < 1:
            raise DomainError("max_terms and consecutive_small must be positive")


@dataclass(frozen=True)
class ComputationRequest:
    """One atom/wall/separation/temperature evaluation."""

    atom: object
    wall: object
    a: float  # separation [m]
    T: float  # temperature [K]
    tol: NumericalTolerances = field(default_factory=NumericalTolerances)

    def __post_init__(self):
        if self.a <= 0.0 or self.T <= 0.0:
            raise DomainError("separation and temperature must be positive")
        if not (HARD_RANGE[0] <= self.a <= HARD_RANGE[1]):
            raise DomainError(
                f"separation {self.a:g} m outside supported range "
                f"[{HARD_RANGE[0]:g}, {HARD_RANGE[1]:g}] m"
            )


@dataclass
class FreeEnergyResult:
    free_energy: float     # J, negative = attractive
    classical_term: float  # J, l = 0 contribution
    thermal_term: float    # J, sum of all l >= 1 contributions
    n_terms_used: int
    max_quad_nodes: int
    normalized: float      # F / E_CP(a)
    warnings: list


def matsubara_zeta(l, a: float, T: float):
    """Dimensionless Matsubara frequency zeta_l = 4 pi l k_B T a/(hbar c).

    The matching physical frequency is zeta_l * w_c with w_c = c/(2a).
    """
    l_arr = np.asarray(l)
    if np.any(l_arr < 0):
        raise DomainError("Matsubara index must be >= 0")
    if a <= 0.0 or T <= 0.0:
        raise DomainError("separation and temperature must be positive")
    out = 4.0 * math.pi * l_arr * K_B * T * a / (HBAR * C_LIGHT)
    return float(out) if np.isscalar(l) else out


def _sqrt_term(eps, zeta, y):
    return np.sqrt(y * y + zeta * zeta * (eps - 1.0))


def _check_reflection_args(eps, zeta, y):
    if np.any(np.asarray(eps) < 1.0):
        raise DomainError("permittivity at imaginary frequency must be >= 1")
    if np.any(np.asarray(zeta) < 0.0):
        raise DomainError("zeta must be >= 0")
    if np.any(np.asarray(y) <= 0.0) or np.any(np.asarray(y) < np.asarray(zeta)):
        raise DomainError("need y >= zeta and y > 0")


def reflection_par(eps, zeta, y):
    """Parallel-polarization reflection coefficient, in [0, 1)."""
    _check_reflection_args(eps, zeta, y)
    s = _sqrt_term(eps, zeta, y)
    return (eps * y - s) / (eps * y + s)


def reflection_perp(eps, zeta, y):
    """Perpendicular-polarization reflection coefficient, in [0, 1)."""
    _check_reflection_args(eps, zeta, y)
    s = _sqrt_term(eps, zeta, y)
    return (s - y) / (s + y)


def ideal_metal_integral(zeta):
    """Closed form of the per-frequency integral with r_par = r_perp = 1.

    int_zeta^inf 2 y^2 e^{-y} dy = 2 e^{-zeta} (zeta^2 + 2 zeta + 2).
    """
    z = np.asarray(zeta, dtype=float)
    if np.any(z < 0.0):
        raise DomainError("zeta must be >= 0")
    out = 2.0 * np.exp(-z) * (z * z + 2.0 * z + 2.0)
    return float(out) if np.isscalar(zeta) else out


def _integrand_rows(eps_col, zeta_col, y):
    """Integrand of the per-frequency integral without the e^{-y} weight."""
    s = np.sqrt(y * y + zeta_col * zeta_col * (eps_col - 1.0))
    r_par = (eps_col * y - s) / (eps_col * y + s)
    r_perp = (s - y) / (s + y)
    return (2.0 * y * y - zeta_col * zeta_col) * r_par + zeta_col * zeta_col * r_perp


def _matsubara_integral_block(eps, zeta, rel_tol):
    """Vectorized per-frequency integrals with per-row order doubling.

    After the shift y = zeta + t the reflection coefficients still carry a
    feature of width zeta*sqrt(eps-1) at the lower limit (the branch scale of
    sqrt(y^2 + zeta^2 (eps-1))).  When that width is below 1 the row is
    integrated as a Gauss-Legendre panel over [0, T] covering the feature
    plus a Gauss-Laguerre rule beyond T; otherwise pure Gauss-Laguerre is
    spectrally accurate.  Both pieces share one order that doubles until
    successive composite estimates agree to ``rel_tol``.

    Returns (values, max_nodes_used, max_final_rel_delta).
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    width = zeta * np.sqrt(np.maximum(eps - 1.0, 0.0))
    split_at = np.where((width > 0.0) & (width < 1.0), np.minimum(2.0, 5.0 * width), 0.0)

    def evaluate(rows, order):
        eps_col = eps[rows, None]
        zeta_col = zeta[rows, None]
        T = split_at[rows]
        t, w_lag = gauss_laguerre(order)
        tail = _integrand_rows(eps_col, zeta_col, zeta_col + T[:, None] + t[None, :])
        total = np.exp(-(zeta[rows] + T)) * (tail @ w_lag)
        panel_rows = np.nonzero(T > 0.0)[0]
        if panel_rows.size:
            x, w_leg = gauss_legendre(order)
            half = 0.5 * T[panel_rows, None]
            tt = half * (x[None, :] + 1.0)
            g = _integrand_rows(eps_col[panel_rows], zeta_col[panel_rows],
                                zeta_col[panel_rows] + tt)
            panel = (half[:, 0] * ((g * np.exp(-tt)) @ w_leg))
            total[panel_rows] += np.exp(-zeta[rows][panel_rows]) * panel
        return total

    pending = np.arange(eps.size)
    vals = evaluate(pending, _QUAD_START)
    order = 2 * _QUAD_START
    max_order = _QUAD_START
    worst_delta = 0.0
    while True:
        new = evaluate(pending, order)
        old = vals[pending]
        delta = np.abs(new - old)
        scale = np.maximum(np.abs(new), 1e-300)
        vals[pending] = new
        max_order = order
        converged = delta <= rel_tol * scale
        if np.any(converged):
            worst_delta = max(worst_delta, float((delta[converged] / scale[converged]).max()))
        pending = pending[~converged]
        if pending.size == 0:
            nodes = max_order * (2 if np.any(split_at > 0.0) else 1)
            return vals, nodes, worst_delta
        if order >= _QUAD_CAP:
            raise ConvergenceError(
                "per-frequency quadrature did not converge within the node budget",
                order=order, unconverged=int(pending.size),
                worst_rel_delta=float((delta[~converged] / scale[~converged]).max()),
                zeta=zeta[pending][:8].tolist(), eps=eps[pending][:8].tolist(),
            )
        order *= 2


def matsubara_integral(eps: float, zeta: float, quad_rel_tol: float = 1e-9) -> float:
    """int_zeta^inf dy e^{-y} [(2y^2 - zeta^2) r_par + zeta^2 r_perp].

    Evaluated after the shift y = zeta + t as
    e^{-zeta} int_0^inf e^{-t} g(zeta + t) dt with Gauss-Laguerre rules whose
    order doubles (32 up to 512) until successive estimates agree to
    ``quad_rel_tol``.  Always >= 0.
    """
    if eps < 1.0:
        raise DomainError("permittivity at imaginary frequency must be >= 1")
    if zeta < 0.0:
        raise DomainError("zeta must be >= 0")
    vals, _, _ = _matsubara_integral_block(eps, zeta, quad_rel_tol)
    return float(vals[0])


def casimir_polder_energy(alpha0: float, a: float) -> float:
    """Zero-temperature ideal-metal energy E(a) = -3 hbar c alpha(0)/(8 pi a^4)."""
    if alpha0 < 0.0:
        raise DomainError("alpha0 must be >= 0")
    if a <= 0.0:
        raise DomainError("separation must be positive")
    return -3.0 * HBAR * C_LIGHT * alpha0 / (8.0 * math.pi * a ** 4)


def _series_length_estimate(tau: float, rel_tol: float, max_terms: int) -> int:
    """Upper estimate of the Matsubara index where truncation will trigger."""
    x_stop = -math.log(rel_tol * min(tau, 1.0)) + 25.0
    return min(max_terms, int(math.ceil(x_stop / tau)) + 16)


def free_energy(req: ComputationRequest) -> FreeEnergyResult:
    """Evaluate the Matsubara free-energy sum for one request.

    The l = 0 term always uses f(0) with the metal/dielectric distinction
    (metal permittivities diverge at zero frequency, so eps(i xi) is never
    queried there).  Terms l >= 1 are accumulated in blocks until the
    estimated geometric tail of the series stays below ``series_rel_tol``
    relative to the accumulated sum for ``consecutive_small`` consecutive
    terms.
    """
    atom, wall, a, T, tol = req.atom, req.wall, req.a, req.T, req.tol
    warnings: list = []
    if not (SOFT_RANGE[0] <= a <= SOFT_RANGE[1]):
        warnings.append(
            f"separation {a:g} m outside the trusted window "
            f"[{SOFT_RANGE[0]:g}, {SOFT_RANGE[1]:g}] m"
        )

    alpha0 = static_alpha(atom)
    prefactor = K_B * T / (8.0 * a ** 3)
    if alpha0 == 0.0:
        warnings.append("static polarizability is zero; free energy vanishes")
        return FreeEnergyResult(0.0, 0.0, 0.0, 0, 0, 0.0, warnings)

    f0_wall = f0(wall)
    bracket0 = 2.0 * alpha0 * f0_wall

    tau = matsubara_zeta(1, a, T)
    xi1 = tau * C_LIGHT / (2.0 * a)  # = 2 pi k_B T / hbar
    ideal = isinstance(wall, IdealMetal)

    tail_before = getattr(atom, "tail_queries", 0)
    if isinstance(wall, TabulatedKK):
        l_hi = _series_length_estimate(tau, tol.series_rel_tol, tol.max_terms)
        wall.precompute(xi1, xi1 * l_hi)

    thermal_bracket = 0.0
    n_terms = 0
    max_nodes = 0
    small_run = 0
    prev_term = None
    stopped = False

    l = 1
    while not stopped:
        if l > tol.max_terms:
            raise ConvergenceError(
                "Matsubara sum not converged within max_terms",
                max_terms=tol.max_terms, last_term=prev_term,
                accumulated=bracket0 + thermal_bracket, a=a, T=T,
            )
        ls = np.arange(l, min(l + _BLOCK, tol.max_terms + 1))
        zetas = tau * ls
        xis = xi1 * ls
        if ideal:
            integrals = ideal_metal_integral(zetas)
        else:
            eps_l = np.atleast_1d(eps_iw(wall, xis))
            integrals, nodes, _ = _matsubara_integral_block(eps_l, zetas, tol.quad_rel_tol)
            max_nodes = max(max_nodes, nodes)
        terms = alpha_iw(atom, xis) * integrals

        for value in terms:
            value = float(value)
            thermal_bracket += value
            n_terms += 1
            total = bracket0 + thermal_bracket
            small = False
            if value == 0.0:
                small = True
            elif prev_term is not None and prev_term > 0.0:
                ratio = value / prev_term
                if ratio < 1.0:
                    tail = value * ratio / (1.0 - ratio)
                    small = tail <= tol.series_rel_tol * total
            small_run = small_run + 1 if small else 0
            prev_term = value
            if small_run >= tol.consecutive_small:
                stopped = True
                break
        l = int(ls[-1]) + 1

    total_bracket = bracket0 + thermal_bracket
    result_f = -prefactor * total_bracket
    if isinstance(atom, TabulatedAlpha) and atom.tail_queries > tail_before:
        warnings.append(
            "polarizability table extrapolated beyond its last row (1/xi^2 tail)"
        )
    normalized = result_f / casimir_polder_energy(alpha0, a)
    return FreeEnergyResult(
        free_energy=result_f,
        classical_term=-prefactor * bracket0,
        thermal_term=-prefactor * thermal_bracket,
        n_terms_used=n_terms,
        max_quad_nodes=max_nodes,
        normalized=normalized,
        warnings=warnings,
    )


def normalized_free_energy(req: ComputationRequest) -> float:
    """F(a,T)/E(a); positive, since both energies are negative."""
    if static_alpha(req.atom) <= 0.0:
        raise DomainError("normalization needs a positive static polarizability")
    return free_energy(req).normalized


def correction_factor(reference: ComputationRequest, variant: ComputationRequest) -> float:
    """Ratio of the variant's free energy to the reference's at equal (a, T)."""
    if reference.a != variant.a or reference.T != variant.T:
        raise UsageError("correction factor requires matching separation and temperature")
    ref = free_energy(reference).free_energy
    if ref == 0.0:
        raise UsageError("reference free energy vanishes; factor undefined")
    return free_energy(variant).free_energy / ref
