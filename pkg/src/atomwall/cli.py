"""Command-line surface: single-point evaluation, sweeps, comparison tables, dumps.

Subcommands:

    energy   --config c.json            one result block per configured separation
    sweep    --config c.json            CSV/JSON rows over the separation range
    table    --config c.json            |F| of the reference plus variant factors
    epsilon  --config c.json            eps(i xi) dump of the wall model on a log grid
    alpha    --config c.json            alpha(i xi) dump of the atom model

Every command takes ``--out <path>`` (default stdout) and ``--format csv|json``
(default from the config's output block).  Outputs are deterministic: the same
config yields byte-identical bytes, and CSV files carry the config's SHA-256
digest in a header comment.

Exit codes: 0 success, 2 usage errors, 3 config/validation errors,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .constants import C_LIGHT, HBAR, K_B
from .dataio import RunConfig, parse_run_config
from .dielectric import TabulatedKK, eps_iw
from .errors import (
    AtomWallError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ParseError,
    UsageError,
    ValidationError,
)
from .lifshitz import ComputationRequest, _series_length_estimate, free_energy
from .polarizability import alpha_iw

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


@dataclass
class SweepRow:
    a_nm: float
    free_energy: float  # J
    normalized: float
    n_terms: int


def _fmt(value) -> str:
    return format(float(value), ".10g")


def _require(config: RunConfig, *fields):
    missing = [name for name in fields if getattr(config, name) is None]
    if missing:
        raise ConfigError(f"config is missing required entries: {', '.join(missing)}")


def _warm_walls(config: RunConfig, walls) -> None:
    """Precompute tabulated-wall grids before any parallel evaluation.

    Covers every Matsubara frequency the sweep can touch, so threaded rows
    read one immutable grid and outputs stay deterministic.
    """
    a_min = float(config.separations[0])
    T = config.temperature
    xi1 = 2.0 * math.pi * K_B * T / HBAR
    tau_min = 4.0 * math.pi * K_B * T * a_min / (HBAR * C_LIGHT)
    l_hi = _series_length_estimate(tau_min, config.tolerances.series_rel_tol,
                                   config.tolerances.max_terms)
    for wall in walls:
        if isinstance(wall, TabulatedKK):
            wall.precompute(xi1, xi1 * l_hi, config.kk_settings)


def _evaluate_separations(config: RunConfig, atom, wall):
    """free_energy over all configured separations, concurrently but ordered."""
    requests = [
        ComputationRequest(atom=atom, wall=wall, a=float(a), T=config.temperature,
                           tol=config.tolerances)
        for a in config.separations
    ]
    workers = min(8, os.cpu_count() or 1, len(requests))
    if workers <= 1:
        return [free_energy(r) for r in requests]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(free_energy, requests))


def cmd_energy(config: RunConfig, stream) -> None:
    _require(config, "atom", "wall", "separations", "temperature")
    _warm_walls(config, [config.wall])
    results = _evaluate_separations(config, config.atom, config.wall)
    for a_nm, res in zip(config.separations_nm, results):
        fields = [
            f"a_nm={_fmt(a_nm)}",
            f"free_energy_J={_fmt(res.free_energy)}",
            f"abs_free_energy_J={_fmt(abs(res.free_energy))}",
            f"normalized={_fmt(res.normalized)}",
            f"n_terms={res.n_terms_used}",
            f"max_quad_nodes={res.max_quad_nodes}",
        ]
        line = " ".join(fields)
        if res.warnings:
            line += " warnings=" + ";".join(res.warnings).replace(" ", "_")
        print(line, file=stream)


def cmd_sweep(config: RunConfig, stream, fmt: str) -> None:
    _require(config, "atom", "wall", "separations", "temperature")
    _warm_walls(config, [config.wall])
    results = _evaluate_separations(config, config.atom, config.wall)
    rows = [
        SweepRow(a_nm=a_nm, free_energy=res.free_energy,
                 normalized=res.normalized, n_terms=res.n_terms_used)
        for a_nm, res in zip(config.separations_nm, results)
    ]
    if fmt == "json":
        payload = {
            "config_sha256": config.digest,
            "rows": [
                {"a_nm": r.a_nm, "free_energy_J": r.free_energy,
                 "normalized": r.normalized, "n_terms": r.n_terms} for r in rows
            ],
        }
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")
        return
    print(f"# config_sha256={config.digest}", file=stream)
    print("a_nm,free_energy_J,normalized,n_terms", file=stream)
    for r in rows:
        print(f"{_fmt(r.a_nm)},{_fmt(r.free_energy)},{_fmt(r.normalized)},{r.n_terms}",
              file=stream)


def cmd_table(config: RunConfig, stream, fmt: str) -> None:
    _require(config, "atom", "wall", "separations", "temperature")
    if not config.variants:
        raise ConfigError("table command needs a reference block and at least one variant")
    walls = [config.wall] + [v.wall for v in config.variants]
    _warm_walls(config, walls)
    reference = _evaluate_separations(config, config.atom, config.wall)
    factor_columns = []
    for variant in config.variants:
        variant_results = _evaluate_separations(config, variant.atom, variant.wall)
        factors = []
        for ref, var in zip(reference, variant_results):
            if ref.free_energy == 0.0:
                raise UsageError("reference free energy vanishes; factors undefined")
            factors.append(var.free_energy / ref.free_energy)
        factor_columns.append(factors)
    labels = [v.label for v in config.variants]
    if fmt == "json":
        payload = {
            "config_sha256": config.digest,
            "rows": [
                {
                    "a_nm": a_nm,
                    "abs_free_energy_ref_J": abs(ref.free_energy),
                    **{label: col[i] for label, col in zip(labels, factor_columns)},
                }
                for i, (a_nm, ref) in enumerate(zip(config.separations_nm, reference))
            ],
        }
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")
        return
    print(f"# config_sha256={config.digest}", file=stream)
    print("a_nm,abs_free_energy_ref_J," + ",".join(labels), file=stream)
    for i, (a_nm, ref) in enumerate(zip(config.separations_nm, reference)):
        cells = [_fmt(a_nm), _fmt(abs(ref.free_energy))]
        cells += [_fmt(col[i]) for col in factor_columns]
        print(",".join(cells), file=stream)


def _dump_rows(config: RunConfig, values_of):
    frequencies = config.grid.frequencies()
    return [(float(x), float(v)) for x, v in zip(frequencies, values_of(frequencies))]


def cmd_epsilon(config: RunConfig, stream, fmt: str) -> None:
    _require(config, "wall", "grid")
    if isinstance(config.wall, TabulatedKK):
        config.wall.precompute(config.grid.xi_min, config.grid.xi_max, config.kk_settings)
    rows = _dump_rows(config, lambda xs: eps_iw(config.wall, xs, config.kk_settings))
    _emit_dump(config, stream, fmt, rows)


def cmd_alpha(config: RunConfig, stream, fmt: str) -> None:
    _require(config, "atom", "grid")
    rows = _dump_rows(config, lambda xs: alpha_iw(config.atom, xs))
    _emit_dump(config, stream, fmt, rows)


def _emit_dump(config: RunConfig, stream, fmt: str, rows) -> None:
    if fmt == "json":
        payload = {
            "config_sha256": config.digest,
            "rows": [{"xi_rad_s": x, "value": v} for x, v in rows],
        }
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")
        return
    print(f"# config_sha256={config.digest}", file=stream)
    print("xi_rad_s,value", file=stream)
    for x, v in rows:
        print(f"{_fmt(x)},{_fmt(v)}", file=stream)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomwall",
        description="Casimir-Polder free energy of an atom facing a flat wall",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("energy", "evaluate the free energy at the configured separations"),
        ("sweep", "tabulate the free energy over the separation range"),
        ("table", "correction factors of model variants against a reference"),
        ("epsilon", "dump the wall permittivity eps(i xi) on a log grid"),
        ("alpha", "dump the atomic polarizability alpha(i xi) on a log grid"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to a JSON run config")
        cmd.add_argument("--out", default=None, help="output file (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default=None,
                         help="output format (default: config output block, else csv)")
    return parser


_DISPATCH = {
    "energy": lambda cfg, stream, fmt: cmd_energy(cfg, stream),
    "sweep": cmd_sweep,
    "table": cmd_table,
    "epsilon": cmd_epsilon,
    "alpha": cmd_alpha,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_run_config(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, ConfigError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION

    fmt = args.format or config.output_format
    out_path = args.out or config.output_path
    try:
        if out_path is None:
            _DISPATCH[args.command](config, sys.stdout, fmt)
        else:
            with open(out_path, "w", encoding="utf-8") as stream:
                _DISPATCH[args.command](config, stream, fmt)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, ConfigError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as err:
        print(f"error: {err} diagnostics={err.diagnostics}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AtomWallError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
