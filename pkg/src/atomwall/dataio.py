"""Parsing and validation of data files and JSON run configurations.

All on-disk quantities are user-facing units (photon energies in eV,
separations in nm, polarizabilities in atomic units) and are converted to SI
immediately on load.  Data files are plain text with '#' comments and
whitespace- or comma-separated columns:

    optical table:      energy_eV  n  k        (strictly increasing energy)
    oscillator file:    omega_eV   f0n
    polarizability:     xi_eV      alpha_au    (first row must be xi = 0)

Run configurations are JSON; see the README for the full schema and an
annotated example.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import au_volume_to_si, ev_to_angular
from .dielectric import (
    DIELECTRIC,
    METAL,
    DrudeLowFreq,
    IdealMetal,
    KKSettings,
    NinhamParsegian,
    OpticalTable,
    Plasma,
    StaticPermittivity,
    TabulatedKK,
)
from .errors import ConfigError, ParseError, ValidationError
from .lifshitz import NumericalTolerances
from .polarizability import OscillatorSet, StaticAlpha, TabulatedAlpha


def read_numeric_rows(path, n_cols: int):
    """Numeric rows of a text file as (line_number, values) pairs.

    Lines are stripped, '#' comments and blank lines skipped, commas treated
    as whitespace.  Wrong column counts or non-numeric tokens raise a
    ParseError naming the line.
    """
    path = Path(path)
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            text = raw.split("#", 1)[0].replace(",", " ").strip()
            if not text:
                continue
            tokens = text.split()
            if len(tokens) != n_cols:
                raise ParseError(
                    f"expected {n_cols} columns, got {len(tokens)}", path=path, line=lineno
                )
            try:
                values = tuple(float(tok) for tok in tokens)
            except ValueError:
                raise ParseError(f"non-numeric value in row {tokens}", path=path, line=lineno)
            rows.append((lineno, values))
    return rows


def parse_optical_table(path, drude: DrudeLowFreq | None = None,
                        high_exponent: float = 3.0) -> OpticalTable:
    """Load an `energy_eV n k` file into an OpticalTable (SI frequencies)."""
    path = Path(path)
    rows = read_numeric_rows(path, 3)
    if len(rows) < 8:
        raise ValidationError(f"optical table needs at least 8 rows, got {len(rows)}", path=path)
    prev_energy = None
    for lineno, (energy, n, k) in rows:
        if energy <= 0.0:
            raise ValidationError("photon energy must be positive", path=path, line=lineno)
        if prev_energy is not None and energy <= prev_energy:
            raise ValidationError("photon energies must be strictly increasing", path=path, line=lineno)
        if n < 0.0 or k < 0.0:
            raise ValidationError("n and k must be non-negative", path=path, line=lineno)
        prev_energy = energy
    data = np.array([values for _, values in rows])
    try:
        return OpticalTable(
            omega=ev_to_angular(data[:, 0]), n=data[:, 1], k=data[:, 2],
            low_ext=drude, high_exponent=high_exponent,
        )
    except ValidationError as err:
        raise ValidationError(str(err), path=path) from err


def parse_oscillator_file(path) -> OscillatorSet:
    """Load an `omega_eV f0n` file into an OscillatorSet (SI frequencies)."""
    path = Path(path)
    rows = read_numeric_rows(path, 2)
    if not rows:
        raise ValidationError("oscillator file contains no data rows", path=path)
    for lineno, (omega_eV, strength) in rows:
        if omega_eV <= 0.0 or strength <= 0.0:
            raise ValidationError(
                "oscillator frequency and strength must be positive", path=path, line=lineno
            )
    return OscillatorSet(
        strengths=tuple(values[1] for _, values in rows),
        frequencies=tuple(ev_to_angular(values[0]) for _, values in rows),
    )


def parse_alpha_table(path) -> TabulatedAlpha:
    """Load a `xi_eV alpha_au` file into a TabulatedAlpha (SI units)."""
    path = Path(path)
    rows = read_numeric_rows(path, 2)
    if len(rows) < 2:
        raise ValidationError("polarizability table needs at least 2 rows", path=path)
    data = np.array([values for _, values in rows])
    try:
        return TabulatedAlpha(xi=ev_to_angular(data[:, 0]), alpha=au_volume_to_si(data[:, 1]))
    except ValidationError as err:
        raise ValidationError(str(err), path=path) from err


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

_TOP_LEVEL_KEYS = {
    "temperature_K", "separations_nm", "atom", "wall", "reference", "variants",
    "grid", "tolerances", "kk", "output",
}


@dataclass
class GridSpec:
    xi_min: float  # rad/s
    xi_max: float
    points: int

    def __post_init__(self):
        if not (0.0 < self.xi_min < self.xi_max) or self.points < 2:
            raise ConfigError("grid needs 0 < xi_min < xi_max and at least 2 points")

    def frequencies(self) -> np.ndarray:
        return np.geomspace(self.xi_min, self.xi_max, self.points)


@dataclass
class Variant:
    label: str
    atom: object
    wall: object
    atom_spec: dict
    wall_spec: dict


@dataclass
class RunConfig:
    """A fully resolved run: models built, files loaded, units converted."""

    atom: object | None
    wall: object | None
    separations: np.ndarray | None  # m, ascending
    temperature: float | None
    tolerances: NumericalTolerances
    kk_settings: KKSettings
    output_format: str
    output_path: str | None
    variants: list = field(default_factory=list)
    grid: GridSpec | None = None
    digest: str = ""
    atom_spec: dict | None = None
    wall_spec: dict | None = None
    grid_spec: dict | None = None
    separations_nm: list | None = None


def _resolve(base: Path, spec: dict) -> Path:
    """Resolve spec['file'] against the config directory, in place.

    Normalizing to an absolute path keeps serialized configs valid wherever
    they are written back.
    """
    p = Path(spec["file"])
    if not p.is_absolute():
        p = (base / p).resolve()
    if not p.exists():
        raise ConfigError(f"referenced file does not exist: {p}")
    spec["file"] = str(p)
    return p


def _build_atom(spec: dict, base: Path):
    if not isinstance(spec, dict) or "model" not in spec:
        raise ConfigError("atom spec must be an object with a 'model' tag")
    model = spec["model"]
    if model == "static":
        if "alpha0_au" in spec:
            return StaticAlpha(au_volume_to_si(float(spec["alpha0_au"])))
        if "alpha0_m3" in spec:
            return StaticAlpha(float(spec["alpha0_m3"]))
        raise ConfigError("static atom needs alpha0_au or alpha0_m3")
    if model == "oscillators":
        if "file" in spec:
            return parse_oscillator_file(_resolve(base, spec))
        if "entries" in spec:
            entries = spec["entries"]
            if not entries:
                raise ConfigError("oscillator entries must not be empty")
            return OscillatorSet(
                strengths=tuple(float(f) for _, f in entries),
                frequencies=tuple(ev_to_angular(float(w)) for w, _ in entries),
            )
        raise ConfigError("oscillators atom needs 'file' or 'entries' ([omega_eV, f0n] pairs)")
    if model == "tabulated_alpha":
        if "file" not in spec:
            raise ConfigError("tabulated_alpha atom needs 'file'")
        return parse_alpha_table(_resolve(base, spec))
    raise ConfigError(f"unknown atom model tag {model!r}")


def _build_wall(spec: dict, base: Path, kk_settings: KKSettings):
    if not isinstance(spec, dict) or "model" not in spec:
        raise ConfigError("wall spec must be an object with a 'model' tag")
    model = spec["model"]
    if model == "ideal_metal":
        return IdealMetal()
    if model == "plasma":
        if "omega_p_eV" in spec:
            return Plasma(ev_to_angular(float(spec["omega_p_eV"])))
        if "omega_p_rad_s" in spec:
            return Plasma(float(spec["omega_p_rad_s"]))
        raise ConfigError("plasma wall needs omega_p_eV or omega_p_rad_s")
    if model == "static":
        if "eps0" not in spec:
            raise ConfigError("static wall needs eps0")
        return StaticPermittivity(float(spec["eps0"]))
    if model == "ninham_parsegian":
        terms = spec.get("terms")
        if not terms:
            raise ConfigError("ninham_parsegian wall needs 'terms' ([C_j, omega_j_eV] pairs)")
        return NinhamParsegian(tuple((float(c), ev_to_angular(float(w))) for c, w in terms))
    if model == "tabulated":
        if "file" not in spec or "kind" not in spec:
            raise ConfigError("tabulated wall needs 'file' and 'kind' (metal | dielectric)")
        kind = spec["kind"]
        if kind not in (METAL, DIELECTRIC):
            raise ConfigError(f"unknown material kind {kind!r}")
        drude = None
        if kind == METAL:
            if "drude" not in spec:
                raise ConfigError(
                    "a metal tabulated wall requires Drude completion parameters "
                    "('drude': {omega_p_eV, nu_eV})"
                )
            d = spec["drude"]
            drude = DrudeLowFreq(
                omega_p=ev_to_angular(float(d["omega_p_eV"])),
                nu=ev_to_angular(float(d["nu_eV"])),
            )
        elif "drude" in spec:
            raise ConfigError("a dielectric tabulated wall must not carry Drude parameters")
        table = parse_optical_table(
            _resolve(base, spec), drude=drude,
            high_exponent=float(spec.get("high_exponent", 3.0)),
        )
        return TabulatedKK(table, kind, settings=kk_settings)
    raise ConfigError(f"unknown wall model tag {model!r}")


def _parse_separations(spec) -> tuple[np.ndarray, list]:
    if not isinstance(spec, dict):
        raise ConfigError("separations_nm must be {'list': [...]} or {'log_range': [lo, hi, n]}")
    if "list" in spec:
        a_nm = np.asarray([float(x) for x in spec["list"]], dtype=float)
    elif "log_range" in spec:
        lo, hi, count = spec["log_range"]
        if float(lo) <= 0.0 or float(hi) <= float(lo) or int(count) < 1:
            raise ConfigError("log_range needs 0 < lo < hi and a positive count")
        a_nm = np.geomspace(float(lo), float(hi), int(count))
    else:
        raise ConfigError("separations_nm must contain 'list' or 'log_range'")
    if a_nm.size == 0:
        raise ConfigError("at least one separation is required")
    if np.any(a_nm <= 0.0):
        raise ConfigError("separations must be positive")
    if np.any(np.diff(a_nm) <= 0.0):
        raise ConfigError("separations must be strictly ascending")
    return a_nm * 1e-9, [float(x) for x in a_nm]


def parse_run_config(path) -> RunConfig:
    """Load, validate and fully resolve a JSON run configuration."""
    path = Path(path)
    raw_bytes = path.read_bytes()
    digest = hashlib.sha256(raw_bytes).hexdigest()
    try:
        doc = json.loads(raw_bytes.decode("utf-8"))
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", path=path, line=err.lineno) from err
    if not isinstance(doc, dict):
        raise ParseError("config root must be a JSON object", path=path)
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")

    base = path.parent
    tolerances = _parse_tolerances(doc.get("tolerances"))
    kk_settings = _parse_kk(doc.get("kk"))

    reference = doc.get("reference")
    atom_spec = doc.get("atom")
    wall_spec = doc.get("wall")
    if reference is not None:
        if atom_spec is not None or wall_spec is not None:
            raise ConfigError(f"{path}: give either top-level atom/wall or a reference block, not both")
        if "atom" not in reference or "wall" not in reference:
            raise ConfigError(f"{path}: reference block needs both atom and wall")
        atom_spec = reference["atom"]
        wall_spec = reference["wall"]
    if doc.get("variants") and reference is None:
        raise ConfigError(f"{path}: variants require a reference block")

    atom = _build_atom(atom_spec, base) if atom_spec is not None else None
    wall = _build_wall(wall_spec, base, kk_settings) if wall_spec is not None else None

    variants = []
    for i, vspec in enumerate(doc.get("variants", [])):
        label = vspec.get("label")
        if not label:
            raise ConfigError(f"{path}: variant {i} needs a label")
        if "atom" not in vspec and "wall" not in vspec:
            raise ConfigError(f"{path}: variant {label!r} overrides neither atom nor wall")
        v_atom_spec = vspec.get("atom", atom_spec)
        v_wall_spec = vspec.get("wall", wall_spec)
        variants.append(Variant(
            label=label,
            atom=_build_atom(v_atom_spec, base) if "atom" in vspec else atom,
            wall=_build_wall(v_wall_spec, base, kk_settings) if "wall" in vspec else wall,
            atom_spec=v_atom_spec,
            wall_spec=v_wall_spec,
        ))

    separations = separations_nm = None
    if "separations_nm" in doc:
        separations, separations_nm = _parse_separations(doc["separations_nm"])

    temperature = None
    if "temperature_K" in doc:
        temperature = float(doc["temperature_K"])
        if temperature <= 0.0:
            raise ConfigError(f"{path}: temperature must be positive")

    grid = grid_spec = None
    if "grid" in doc:
        grid_spec = doc["grid"]
        try:
            grid = GridSpec(
                xi_min=ev_to_angular(float(grid_spec["xi_min_eV"])),
                xi_max=ev_to_angular(float(grid_spec["xi_max_eV"])),
                points=int(grid_spec.get("points", 200)),
            )
        except KeyError as err:
            raise ConfigError(f"{path}: grid needs xi_min_eV and xi_max_eV") from err

    out = doc.get("output", {})
    output_format = out.get("format", "csv")
    if output_format not in ("csv", "json"):
        raise ConfigError(f"{path}: output format must be csv or json")

    return RunConfig(
        atom=atom, wall=wall,
        separations=separations, temperature=temperature,
        tolerances=tolerances, kk_settings=kk_settings,
        output_format=output_format, output_path=out.get("path"),
        variants=variants, grid=grid, digest=digest,
        atom_spec=atom_spec, wall_spec=wall_spec, grid_spec=grid_spec,
        separations_nm=separations_nm,
    )


def _parse_tolerances(spec) -> NumericalTolerances:
    if spec is None:
        return NumericalTolerances()
    known = {"series_rel_tol", "quad_rel_tol", "max_terms", "consecutive_small"}
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
    return NumericalTolerances(
        series_rel_tol=float(spec.get("series_rel_tol", 1e-9)),
        quad_rel_tol=float(spec.get("quad_rel_tol", 1e-9)),
        max_terms=int(spec.get("max_terms", 10 ** 6)),
        consecutive_small=int(spec.get("consecutive_small", 3)),
    )


def _parse_kk(spec) -> KKSettings:
    if spec is None:
        return KKSettings()
    known = {"rel_tol", "memoize_threshold", "grid_points_per_decade"}
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"unknown kk keys {sorted(unknown)}")
    return KKSettings(**spec)


def serialize_run_config(config: RunConfig) -> dict:
    """Canonical JSON-ready dict; parse(serialize(parse(f))) == parse(f)."""
    doc: dict = {}
    if config.temperature is not None:
        doc["temperature_K"] = config.temperature
    if config.separations_nm is not None:
        doc["separations_nm"] = {"list": list(config.separations_nm)}
    if config.variants:
        doc["reference"] = {"atom": config.atom_spec, "wall": config.wall_spec}
        doc["variants"] = [
            {"label": v.label, "atom": v.atom_spec, "wall": v.wall_spec}
            for v in config.variants
        ]
    else:
        if config.atom_spec is not None:
            doc["atom"] = config.atom_spec
        if config.wall_spec is not None:
            doc["wall"] = config.wall_spec
    if config.grid_spec is not None:
        doc["grid"] = config.grid_spec
    tol = config.tolerances
    doc["tolerances"] = {
        "series_rel_tol": tol.series_rel_tol, "quad_rel_tol": tol.quad_rel_tol,
        "max_terms": tol.max_terms, "consecutive_small": tol.consecutive_small,
    }
    kk = config.kk_settings
    doc["kk"] = {
        "rel_tol": kk.rel_tol, "memoize_threshold": kk.memoize_threshold,
        "grid_points_per_decade": kk.grid_points_per_decade,
    }
    doc["output"] = {"format": config.output_format}
    if config.output_path is not None:
        doc["output"]["path"] = config.output_path
    return doc
