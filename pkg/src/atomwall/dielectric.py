"""Wall permittivity at imaginary frequency, eps(i xi), for all supported models.

Closed-form models (free-electron plasma, fixed static permittivity,
multi-oscillator Ninham-Parsegian) are evaluated directly.  Walls described
by tabulated optical constants go through the dispersion relation

    eps(i xi) = 1 + (2/pi) * int_0^inf  w eps''(w) / (w^2 + xi^2)  dw,

with eps''(w) = 2 n(w) k(w) built from the table.  The table covers a finite
window [w_min, w_max]; below it a metal is completed with a Drude tail
eps''(w) = wp^2 nu / (w (w^2 + nu^2)) and a dielectric with a power law
fitted to the first table segment, above it with a C/w^p tail matched
continuously at the last point.  The transform is integrated segment by
segment with order-doubling Gauss-Legendre rules, the completions mostly in
closed form.

Because a Matsubara sum queries eps(i xi) at thousands of frequencies,
tabulated models memoize their transform on a log-spaced grid (monotone
PCHIP interpolation in log-log space), either on demand after a threshold
number of distinct queries or eagerly through ``TabulatedKK.precompute``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, ConvergenceError, DomainError, ValidationError
from .quadrature import gauss_legendre

METAL = "metal"
DIELECTRIC = "dielectric"

_TINY = 1e-300


@dataclass(frozen=True)
class KKSettings:
    """Numerical controls for the dispersion-relation transform."""

    rel_tol: float = 1e-6
    memoize_threshold: int = 64      # distinct xi queries before a grid is built
    grid_points_per_decade: int = 16

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise DomainError("KK rel_tol must lie in (0, 1e-2]")
        if self.memoize_threshold < 1 or self.grid_points_per_decade < 2:
            raise DomainError("invalid KK cache settings")


DEFAULT_KK_SETTINGS = KKSettings()


@dataclass(frozen=True)
class DrudeLowFreq:
    """Drude completion of a metal table below its first point."""

    omega_p: float  # plasma frequency [rad/s]
    nu: float       # relaxation frequency [rad/s]

    def __post_init__(self):
        if self.omega_p <= 0.0 or self.nu <= 0.0:
            raise DomainError("Drude completion requires positive omega_p and nu")

    def eps2(self, omega):
        return self.omega_p ** 2 * self.nu / (omega * (omega ** 2 + self.nu ** 2))


@dataclass(frozen=True, eq=False)
class OpticalTable:
    """Measured (omega, n, k) rows plus the extrapolation attached to them.

    ``omega`` is in rad/s and strictly increasing, with at least 8 rows.
    ``high_exponent`` is the power p of the C/w^p tail above the table; the
    amplitude is matched continuously at the last row.
    """

    omega: np.ndarray
    n: np.ndarray
    k: np.ndarray
    low_ext: DrudeLowFreq | None = None
    high_exponent: float = 3.0

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        n = np.asarray(self.n, dtype=float)
        k = np.asarray(self.k, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        if omega.ndim != 1 or omega.shape != n.shape or omega.shape != k.shape:
            raise ValidationError("omega, n, k must be 1-d arrays of equal length")
        if omega.size < 8:
            raise ValidationError(f"optical table needs at least 8 rows, got {omega.size}")
        if not np.all(np.isfinite(omega)) or np.any(omega <= 0.0):
            raise ValidationError("frequencies must be finite and positive")
        if np.any(np.diff(omega) <= 0.0):
            raise ValidationError("frequencies must be strictly increasing")
        if not (np.all(np.isfinite(n)) and np.all(np.isfinite(k))):
            raise ValidationError("n, k must be finite")
        if np.any(n < 0.0) or np.any(k < 0.0):
            raise ValidationError("n, k must be non-negative")
        if self.high_exponent <= 0.0:
            raise ValidationError("high-frequency tail exponent must be positive")
        eps2 = 2.0 * n * k
        object.__setattr__(self, "_eps2_rows", eps2)
        # tail amplitude matched at the last row: eps''(w) = C / w^p
        object.__setattr__(
            self, "high_amplitude", float(eps2[-1] * omega[-1] ** self.high_exponent)
        )
        object.__setattr__(self, "_slope_n", _segment_slopes(omega, n))
        object.__setattr__(self, "_slope_k", _segment_slopes(omega, k))
        # low-end power law eps'' ~ e0 (w/w0)^p fitted to the first segment;
        # slope is None when the first segment cannot define one
        e0, e1 = float(eps2[0]), float(eps2[1])
        slope = None
        if e0 > 0.0 and e1 > 0.0:
            slope = math.log(e1 / e0) / math.log(omega[1] / omega[0])
        object.__setattr__(self, "_low_e0", e0)
        object.__setattr__(self, "_low_slope", slope)

    @property
    def omega_min(self) -> float:
        return float(self.omega[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])


def _segment_slopes(omega, values):
    """Per-segment interpolation data for one optical constant.

    Log-log power laws between samples; segments touching a zero fall back
    to linear interpolation.  Returns (loglog_mask, slope).
    """
    v0, v1 = values[:-1], values[1:]
    w0, w1 = omega[:-1], omega[1:]
    loglog = (v0 > 0.0) & (v1 > 0.0)
    slope = np.empty_like(v0)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope_ll = np.log(np.where(loglog, v1 / v0, 1.0)) / np.log(w1 / w0)
    slope_lin = (v1 - v0) / (w1 - w0)
    slope = np.where(loglog, slope_ll, slope_lin)
    return loglog, slope


def _values_in_segments(omega_nodes, values, loglog, slope, om, seg):
    """Interpolated optical constant at points ``om`` lying in segments ``seg``."""
    w0 = omega_nodes[seg]
    v0 = values[seg]
    ll = loglog[seg]
    s = slope[seg]
    powered = v0 * np.exp(np.where(ll, s, 0.0) * np.log(om / w0))
    linear = v0 + s * (om - w0)
    return np.where(ll, powered, np.maximum(linear, 0.0))


def _eps2_below_range(table: OpticalTable, omega):
    """eps'' continuation below the first table row."""
    if table.low_ext is not None:
        return table.low_ext.eps2(omega)
    if table._low_e0 == 0.0:
        return np.zeros_like(omega)
    if table._low_slope is None or table._low_slope <= 0.0:
        raise ConfigError(
            "optical table rises toward zero frequency (metal-like) but has no "
            "Drude completion parameters; supply them to query below "
            f"{table.omega_min:g} rad/s"
        )
    return table._low_e0 * (omega / table.omega_min) ** table._low_slope


def eps_imag_part(table: OpticalTable, omega):
    """eps''(omega) = 2 n k from the table, with its extrapolations.

    Inside the table range n and k are interpolated log-log between samples;
    below range the Drude or fitted power-law completion is used, above range
    the matched C/w^p tail.
    """
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    if np.any(om <= 0.0):
        raise DomainError("frequency must be positive")
    out = np.empty_like(om)

    below = om < table.omega_min
    above = om > table.omega_max
    inside = ~(below | above)

    if np.any(inside):
        x = om[inside]
        seg = np.clip(
            np.searchsorted(table.omega, x, side="right") - 1, 0, table.omega.size - 2
        )
        nn = _values_in_segments(table.omega, table.n, *_pair(table._slope_n), x, seg)
        kk = _values_in_segments(table.omega, table.k, *_pair(table._slope_k), x, seg)
        out[inside] = 2.0 * nn * kk
    if np.any(below):
        out[below] = _eps2_below_range(table, om[below])
    if np.any(above):
        out[above] = table.high_amplitude * om[above] ** (-table.high_exponent)

    return float(out[0]) if scalar else out


def _pair(slopes):
    return slopes[0], slopes[1]


# ---------------------------------------------------------------------------
# Kramers-Kronig transform
# ---------------------------------------------------------------------------

def _drude_low_contribution(low: DrudeLowFreq, V: float, xi: float) -> float:
    """int_0^V  w eps''_Drude / (w^2 + xi^2) dw, in closed form."""
    b, c = low.nu, xi
    if abs(b - c) <= 1e-6 * max(b, c):
        m = 0.5 * (b + c)
        base = V / (2.0 * m * m * (V * V + m * m)) + math.atan(V / m) / (2.0 * m ** 3)
    else:
        base = (math.atan(V / b) / b - math.atan(V / c) / c) / (c * c - b * b)
    return low.omega_p ** 2 * low.nu * base


def _powerlaw_low_contribution(table: OpticalTable, xi: float, rel_tol: float) -> float:
    """int_0^{w_min} of the fitted low-end power law against w/(w^2+xi^2)."""
    e0 = table._low_e0
    if e0 == 0.0:
        return 0.0
    p = table._low_slope
    if p is None or p <= 0.0:
        raise ConfigError(
            "zero-frequency dispersion transform diverges: low-frequency "
            "eps'' does not decay; a dielectric table must fall off toward "
            "zero frequency"
        )
    V = table.omega_min
    if xi == 0.0:
        # int_0^V e0 (w/V)^p / w dw
        return e0 / p

    def f(om):
        return e0 * (om / V) ** p * om / (om * om + xi * xi)

    return _doubling_gl(f, 0.0, V, rel_tol)


def _doubling_gl(f, lo, hi, rel_tol, start=16, cap=256):
    """Gauss-Legendre on [lo, hi] with order doubling to relative agreement."""
    prev = None
    order = start
    while True:
        x, w = gauss_legendre(order)
        half = 0.5 * (hi - lo)
        om = lo + half * (x + 1.0)
        val = half * float(f(om) @ w)
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), _TINY):
            return val
        if order >= cap:
            raise ConvergenceError(
                "quadrature on extrapolated band did not converge",
                interval=(lo, hi), order=order, last=val, previous=prev,
            )
        prev = val
        order *= 2


def _eval_segments(table: OpticalTable, xi: float, order: int, idx):
    """Per-segment Gauss-Legendre estimates of the in-range transform."""
    lo = table.omega[idx]
    hi = table.omega[idx + 1]
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    om = lo[:, None] + half[:, None] * (x[None, :] + 1.0)
    seg = np.repeat(idx, order).reshape(len(idx), order)
    nn = _values_in_segments(table.omega, table.n, *_pair(table._slope_n), om, seg)
    kk = _values_in_segments(table.omega, table.k, *_pair(table._slope_k), om, seg)
    f = om * (2.0 * nn * kk) / (om * om + xi * xi)
    return half * (f @ w)


def _segments_contribution(table: OpticalTable, xi: float, rel_tol: float) -> float:
    """Adaptive per-segment integration over the tabulated range."""
    nseg = table.omega.size - 1
    idx = np.arange(nseg)
    vals = _eval_segments(table, xi, 8, idx)
    pending = idx
    order = 16
    while True:
        new = _eval_segments(table, xi, order, pending)
        delta = np.abs(new - vals[pending])
        vals[pending] = new
        total = float(vals.sum())
        # equidistributed per-segment error budget
        tol_seg = rel_tol * max(abs(total), _TINY) / nseg
        pending = pending[delta > tol_seg]
        if pending.size == 0:
            return total
        if order >= 128:
            raise ConvergenceError(
                "per-segment KK quadrature did not converge",
                xi=xi, order=order, unconverged_segments=int(pending.size),
                worst_delta=float(delta.max()), total=total,
            )
        order *= 2


def _tail_contribution(table: OpticalTable, xi: float, rel_tol: float) -> float:
    """int_{w_max}^inf of the matched C/w^p tail against w/(w^2+xi^2)."""
    C = table.high_amplitude
    if C == 0.0:
        return 0.0
    p = table.high_exponent
    W = table.omega_max
    if xi == 0.0:
        return C * W ** (-p) / p
    if p == 3.0:
        if xi <= 0.5 * W:
            # alternating series in (xi/W)^2, exact to machine precision here
            acc = 0.0
            term_base = 1.0
            ratio = (xi / W) ** 2
            for j in range(0, 60):
                term = term_base / ((3.0 + 2.0 * j) * W ** 3)
                acc += term if j % 2 == 0 else -term
                term_base *= ratio
                if term_base / ((5.0 + 2.0 * j) * W ** 3) < 1e-17 * abs(acc):
                    break
            return C * acc
        return C * (1.0 / W - (0.5 * math.pi - math.atan(W / xi)) / xi) / xi ** 2

    def f(u):
        return W ** (2.0 - p) * u ** (p - 1.0) / (W * W + xi * xi * u * u)

    return C * _doubling_gl(f, 0.0, 1.0, rel_tol)


def kk_transform(table: OpticalTable, xi: float, rel_tol: float = 1e-6) -> float:
    """int_0^inf w eps''(w)/(w^2 + xi^2) dw over table plus completions."""
    if table.low_ext is not None:
        if xi <= 0.0:
            raise DomainError("Drude-completed transform requires xi > 0")
        low = _drude_low_contribution(table.low_ext, table.omega_min, xi)
    else:
        low = _powerlaw_low_contribution(table, xi, rel_tol)
    return low + _segments_contribution(table, xi, rel_tol) + _tail_contribution(
        table, xi, rel_tol
    )


# ---------------------------------------------------------------------------
# Wall models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdealMetal:
    """Perfect reflector; handled by a closed-form branch in the Lifshitz sum."""

    kind: ClassVar[str] = METAL


@dataclass(frozen=True)
class Plasma:
    """Free-electron plasma, eps(i xi) = 1 + (omega_p/xi)^2."""

    omega_p: float  # rad/s
    kind: ClassVar[str] = METAL

    def __post_init__(self):
        if self.omega_p <= 0.0:
            raise DomainError("plasma frequency must be positive")


@dataclass(frozen=True)
class StaticPermittivity:
    """Dielectric described by its static permittivity at every frequency.

    Deliberately returns eps(0) at all xi, which is what the "static
    permittivity" comparison mode means.
    """

    eps_static: float
    kind: ClassVar[str] = DIELECTRIC

    def __post_init__(self):
        if self.eps_static < 1.0:
            raise DomainError("static permittivity must be >= 1")


@dataclass(frozen=True)
class NinhamParsegian:
    """Oscillator representation eps(i xi) = 1 + sum_j C_j/(1 + xi^2/w_j^2)."""

    terms: tuple  # ((C_j, omega_j rad/s), ...)
    kind: ClassVar[str] = DIELECTRIC

    def __post_init__(self):
        terms = tuple((float(c), float(w)) for c, w in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise DomainError("at least one (C_j, omega_j) term required")
        if any(c <= 0.0 or w <= 0.0 for c, w in terms):
            raise DomainError("Ninham-Parsegian terms must have C_j > 0, omega_j > 0")

    @property
    def eps_zero(self) -> float:
        return 1.0 + sum(c for c, _ in self.terms)


class _EpsGrid:
    """Memoized eps(i xi) on a log grid with monotone log-log interpolation."""

    def __init__(self, xi, values):
        self.lo = float(xi[0])
        self.hi = float(xi[-1])
        self._interp = PchipInterpolator(
            np.log(xi), np.log(np.maximum(np.asarray(values) - 1.0, _TINY))
        )

    def covers(self, lo, hi):
        return self.lo <= lo and hi <= self.hi

    def __call__(self, xi):
        return 1.0 + np.exp(self._interp(np.log(xi)))


class TabulatedKK:
    """Wall permittivity reconstructed from tabulated optical constants.

    Immutable in its physics; carries an internal, lock-protected memoization
    grid so a Matsubara sum does not re-run the transform thousands of times.
    """

    def __init__(self, table: OpticalTable, kind: str,
                 settings: KKSettings = DEFAULT_KK_SETTINGS):
        if kind not in (METAL, DIELECTRIC):
            raise ConfigError(f"unknown material kind {kind!r}")
        if kind == METAL and table.low_ext is None:
            raise ConfigError(
                "a metal table requires Drude completion parameters (omega_p, nu) "
                "for the dispersion transform below its first row"
            )
        if kind == DIELECTRIC:
            if table.low_ext is not None:
                raise ConfigError("a dielectric table must not carry a Drude completion")
            if table._low_e0 > 0.0 and (table._low_slope is None or table._low_slope <= 0.0):
                raise ConfigError(
                    "dielectric table fails the zero-frequency convergence check: "
                    "eps'' must decay toward zero frequency"
                )
        self.table = table
        self.kind = kind
        self.settings = settings
        self._lock = threading.Lock()
        self._grid: _EpsGrid | None = None
        self._seen: set[float] = set()

    def _direct(self, xi: float, rel_tol: float) -> float:
        return 1.0 + (2.0 / math.pi) * kk_transform(self.table, xi, rel_tol)

    def precompute(self, xi_lo: float, xi_hi: float, settings: KKSettings | None = None):
        """Build (or extend) the memoization grid over [xi_lo, xi_hi]."""
        s = settings or self.settings
        if xi_lo <= 0.0 or xi_hi <= xi_lo:
            raise DomainError("precompute needs 0 < xi_lo < xi_hi")
        with self._lock:
            if self._grid is not None and self._grid.covers(xi_lo, xi_hi):
                return
            if self._grid is not None:
                xi_lo = min(xi_lo, self._grid.lo)
                xi_hi = max(xi_hi, self._grid.hi)
            self._grid = self._build_grid(xi_lo, xi_hi, s)

    def _build_grid(self, lo, hi, s: KKSettings) -> _EpsGrid:
        decades = math.log10(hi / lo)
        npts = max(8, int(math.ceil(decades * s.grid_points_per_decade)) + 1)
        xs = np.geomspace(lo, hi, npts)
        vals = np.array([self._direct(float(x), s.rel_tol) for x in xs])
        return _EpsGrid(xs, vals)

    def eps_iw(self, xi, settings: KKSettings | None = None):
        s = settings or self.settings
        arr = np.asarray(xi, dtype=float)
        scalar = arr.ndim == 0
        flat = np.atleast_1d(arr).astype(float)
        if self.kind == METAL and np.any(flat <= 0.0):
            raise DomainError("metal model undefined at xi <= 0; use f0 for the l=0 term")
        if np.any(flat < 0.0):
            raise DomainError("xi must be non-negative")
        out = np.empty_like(flat)
        grid = self._grid
        if grid is not None:
            onto = (flat >= grid.lo) & (flat <= grid.hi)
        else:
            onto = np.zeros(flat.shape, dtype=bool)
        if np.any(onto):
            out[onto] = grid(flat[onto])
        rest = np.nonzero(~onto)[0]
        for i in rest:
            out[i] = self._direct(float(flat[i]), s.rel_tol)
        if rest.size:
            self._note_queries(flat[rest], s)
        return float(out[0]) if scalar else out.reshape(arr.shape)

    def _note_queries(self, values, s: KKSettings):
        with self._lock:
            self._seen.update(float(v) for v in values)
            if self._grid is not None:
                return
            positive = [v for v in self._seen if v > 0.0]
            if len(positive) > s.memoize_threshold:
                self._grid = self._build_grid(min(positive), max(positive), s)


# ---------------------------------------------------------------------------
# Dispatch operations
# ---------------------------------------------------------------------------

DielectricModel = (IdealMetal, Plasma, StaticPermittivity, NinhamParsegian, TabulatedKK)


def eps_iw(model, xi, settings: KKSettings | None = None):
    """Permittivity at imaginary frequency for any finite-response wall model.

    Accepts scalar or array ``xi`` in rad/s.  Metal models require xi > 0
    (their zero-frequency limit is handled separately through ``f0``);
    dielectric models accept xi >= 0.  The ideal metal has no finite
    permittivity and is rejected here by design.
    """
    if isinstance(model, IdealMetal):
        raise DomainError(
            "ideal metal has no finite permittivity; use the closed-form "
            "reflection branch instead"
        )
    arr = np.asarray(xi, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).astype(float)

    if isinstance(model, TabulatedKK):
        return model.eps_iw(xi, settings)

    if model.kind == METAL and np.any(flat <= 0.0):
        raise DomainError("metal model undefined at xi <= 0; use f0 for the l=0 term")
    if np.any(flat < 0.0):
        raise DomainError("xi must be non-negative")

    if isinstance(model, Plasma):
        out = 1.0 + (model.omega_p / flat) ** 2
    elif isinstance(model, StaticPermittivity):
        out = np.full_like(flat, model.eps_static)
    elif isinstance(model, NinhamParsegian):
        out = np.ones_like(flat)
        for c, w in model.terms:
            out += c / (1.0 + (flat / w) ** 2)
    else:
        raise ConfigError(f"unknown dielectric model {type(model).__name__}")
    return float(out[0]) if scalar else out.reshape(arr.shape)


def f0(model, settings: KKSettings | None = None) -> float:
    """Zero-Matsubara-frequency reflection factor in [0, 1].

    1 for metals; (eps(0)-1)/(eps(0)+1) for dielectrics, with eps(0) taken
    from the model's own static limit (for tabulated dielectrics, the xi=0
    dispersion transform).
    """
    if getattr(model, "kind", None) == METAL:
        return 1.0
    if isinstance(model, StaticPermittivity):
        e0 = model.eps_static
    elif isinstance(model, NinhamParsegian):
        e0 = model.eps_zero
    elif isinstance(model, TabulatedKK):
        e0 = model.eps_iw(0.0, settings)
    else:
        raise ConfigError(f"unknown dielectric model {type(model).__name__}")
    return (e0 - 1.0) / (e0 + 1.0)
