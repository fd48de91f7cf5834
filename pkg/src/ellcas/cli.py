"""Command-line front end: single-point energies, phi/H sweeps as CSV,
direct special-function evaluation for debugging, and the validation suite.

Angles are accepted in degrees on the command line and converted to radians
at this boundary; everything below works in radians.  Every output record
embeds the fully resolved configuration so a result can be reproduced from
its own header.  Exit codes: 0 success, 1 input error, 2 numerical failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

from .backend import ACTIVE_BACKEND
from .energy import Geometry, casimir_energy, em_energy
from .errors import EllcasError, InputError
from .mathieu import (BasisIndex, Parity, RadialKind, angular, angular_negq,
                      build_expansion, expansion_to_json,
                      fresh_coefficient_cache, radial_modified)
from .quadrature import QuadratureSpec
from .reference import (PfaInput, cylinder_plane_energy, pfa_energy,
                        greens_equivalence_residual,
                        planewave_expansion_residual)
from .scattering import BoundaryCondition, EllipticSurface

__all__ = ["RunConfig", "main", "cmd_energy", "cmd_sweep", "cmd_validate"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3

_CHANNELS = {"d": "dirichlet", "n": "neumann", "em": "em"}
_CSV_COLUMNS = ("E_D", "E_N", "E_EM", "E_PFA", "ratio", "err_estimate")


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters.

    ``phi`` is kept in user-facing degrees (it mirrors the flag and the
    reproducibility header); the conversion to radians happens when the
    Geometry is built.  Unknown keys in a config file are rejected, and
    command-line flags override file values.
    """

    d: float = 1.0
    mu0: float = 0.0
    H: float = 2.0
    phi: float = 0.0            # degrees
    channel: str = "em"         # 'd' | 'n' | 'em'
    mmax: int = 16
    ladder: tuple | None = None
    p_rel_tol: float = 1e-7
    u_tol: float = 1e-11
    p_max_factor: float = 40.0
    scale: str = "d"
    output: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.channel not in _CHANNELS:
            raise InputError(f"channel must be one of {sorted(_CHANNELS)}, "
                             f"got {self.channel!r}")
        if self.scale not in ("d", "H"):
            raise InputError(f"scale must be 'd' or 'H', got {self.scale!r}")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")
        if self.mmax < 1:
            raise InputError(f"mmax must be >= 1, got {self.mmax}")

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        names = [f.name for f in fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise InputError(f"unknown config keys: {unknown}")
        kw = {}
        for name in names:
            if name not in data or data[name] is None:
                continue
            v = data[name]
            if name in ("d", "mu0", "H", "phi", "p_rel_tol", "u_tol",
                        "p_max_factor"):
                kw[name] = float(v)
            elif name in ("mmax", "workers"):
                kw[name] = int(v)
            elif name == "ladder":
                kw[name] = tuple(int(m) for m in v)
            else:
                kw[name] = str(v)
        return cls(**kw)

    def to_json(self) -> dict:
        out = asdict(self)
        if out["ladder"] is not None:
            out["ladder"] = list(out["ladder"])
        return out

    def header_json(self) -> dict:
        """Config as embedded in output records: every field that affects
        the numbers.  Execution plumbing (worker count, output path) is
        excluded so identical physics gives byte-identical records."""
        out = self.to_json()
        del out["workers"]
        del out["output"]
        return out


def _quad_spec(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(p_rel_tol=cfg.p_rel_tol, u_tol=cfg.u_tol,
                          p_max_factor=cfg.p_max_factor)


def _geometry(cfg: RunConfig, H: float | None = None,
              phi_deg: float | None = None) -> Geometry:
    surface = EllipticSurface(d=cfg.d, mu0=cfg.mu0)
    return Geometry(surface=surface,
                    H=cfg.H if H is None else H,
                    phi=math.radians(cfg.phi if phi_deg is None else phi_deg))


def _pfa_scaled(cfg: RunConfig, H: float, phi_rad: float) -> float:
    """PFA estimate in the same unit-length convention as the energies."""
    raw = pfa_energy(PfaInput(H=H, d=cfg.d, phi=phi_rad))
    if cfg.scale == "H":
        return raw * (H / cfg.d) ** 2
    return raw


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# --- energy ------------------------------------------------------------

def cmd_energy(cfg: RunConfig) -> int:
    quad = _quad_spec(cfg)
    geom = _geometry(cfg)
    record: dict = {"config": cfg.header_json(),
                    "channel": _CHANNELS[cfg.channel]}
    if cfg.channel == "em":
        res = em_energy(geom, cfg.mmax, quad, cfg.scale, cfg.ladder)
        record.update(res.to_json())
    else:
        bc = (BoundaryCondition.DIRICHLET if cfg.channel == "d"
              else BoundaryCondition.NEUMANN)
        val = casimir_energy(geom, bc, cfg.mmax, quad, cfg.scale)
        record.update({"value": val, "scale": cfg.scale})
    _write_text(cfg.output, json.dumps(record, sort_keys=True) + "\n")
    return EXIT_OK


# --- sweep -------------------------------------------------------------

def _sweep_point(cfg: RunConfig, variable: str, value: float, quad):
    """One grid point -> (row values or None, warning or None).

    Runs against a private coefficient cache so the result is a pure
    function of the point's parameters (bit-identical regardless of how
    points are scheduled across workers).
    """
    with fresh_coefficient_cache():
        try:
            if variable == "phi":
                geom = _geometry(cfg, phi_deg=value)
            else:
                geom = _geometry(cfg, H=value)
            res = em_energy(geom, cfg.mmax, quad, cfg.scale, cfg.ladder)
            pfa = _pfa_scaled(cfg, geom.H, geom.phi)
            ratio = res.value / pfa if pfa != 0.0 else None
            row = {
                "E_D": res.channel_values["dirichlet"],
                "E_N": res.channel_values["neumann"],
                "E_EM": res.value,
                "E_PFA": pfa,
                "ratio": ratio,
                "err_estimate": res.err_estimate,
            }
            return row, None
        except EllcasError as exc:
            return None, f"{type(exc).__name__}: {exc}"


def sweep_csv(cfg: RunConfig, variable: str, grid) -> tuple[str, list]:
    """CSV text for a sweep, plus the per-point warnings (grid order)."""
    if variable not in ("phi", "H"):
        raise InputError(f"sweep variable must be 'phi' or 'H', got {variable!r}")
    grid = [float(g) for g in grid]
    if not grid:
        raise InputError("sweep grid is empty")
    quad = _quad_spec(cfg)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(
            lambda g: _sweep_point(cfg, variable, g, quad), grid))

    header = {"config": cfg.header_json(), "variable": variable, "grid": grid}
    lines = ["# " + json.dumps(header, sort_keys=True),
             ",".join((variable,) + _CSV_COLUMNS)]
    warnings = []
    for g, (row, warning) in zip(grid, results):
        if row is None:
            lines.append(repr(g) + "," * len(_CSV_COLUMNS))
            warnings.append(f"point {variable}={g!r} skipped: {warning}")
        else:
            cells = [repr(g)]
            for col in _CSV_COLUMNS:
                v = row[col]
                cells.append("" if v is None else repr(v))
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n", warnings


def cmd_sweep(cfg: RunConfig, variable: str, grid) -> int:
    text, warnings = sweep_csv(cfg, variable, grid)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write_text(cfg.output, text)
    return EXIT_OK


# --- mathieu (debug evaluation) ----------------------------------------

def cmd_mathieu(args) -> int:
    idx = BasisIndex(Parity.EVEN if args.parity == "e" else Parity.ODD,
                     args.m)
    q = float(args.q)
    record: dict = {"parity": idx.parity.value, "m": idx.m, "q": q}
    exp = build_expansion(idx, q)
    record["expansion"] = expansion_to_json(exp)
    if args.theta is not None:
        z = complex(math.radians(args.theta), args.u)
        va = angular(exp, z)
        record["angular"] = [va.real, va.imag]
        vn = angular_negq(idx, q, z)
        record["angular_negq"] = [vn.real, vn.imag]
    if args.mu is not None:
        for kind, name in ((RadialKind.FIRST_KIND_MODIFIED, "radial_i"),
                           (RadialKind.OUTGOING_MODIFIED, "radial_k")):
            v, dv = radial_modified(kind, idx, q, args.mu)
            record[name] = [v, dv]
    _write_text(args.output, json.dumps(record, sort_keys=True) + "\n")
    return EXIT_OK


# --- validate ----------------------------------------------------------

def _check(name: str, observed: float, bound: float) -> dict:
    return {"name": name, "observed": float(observed), "bound": float(bound),
            "passed": bool(observed < bound)}


def _suite_mathieu() -> list:
    checks = []
    # Wronskian of the two radial kinds: exactly -1 in this normalization.
    for parity, m in ((Parity.EVEN, 0), (Parity.EVEN, 1), (Parity.ODD, 1),
                      (Parity.EVEN, 4), (Parity.ODD, 4)):
        idx = BasisIndex(parity, m)
        for s in (0.5, 4.0, 25.0):
            worst = 0.0
            for mu in (0.2, 1.0, 2.5):
                vi, di = radial_modified(RadialKind.FIRST_KIND_MODIFIED,
                                         idx, s, mu)
                vk, dk = radial_modified(RadialKind.OUTGOING_MODIFIED,
                                         idx, s, mu)
                worst = max(worst, abs(vi * dk - di * vk + 1.0))
            checks.append(_check(
                f"wronskian[{parity.value},{m},s={s:g}]", worst, 1e-10))
    # Angular normalization: integral of S^2 over a period equals pi.
    n = 512
    thetas = [2.0 * math.pi * j / n for j in range(n)]
    for q in (1.0, 20.0):
        for m in range(11):
            for parity in (Parity.EVEN, Parity.ODD):
                if m == 0 and parity is Parity.ODD:
                    continue
                exp = build_expansion(BasisIndex(parity, m), q)
                acc = 0.0
                for th in thetas:
                    acc += angular(exp, th).real ** 2
                acc *= 2.0 * math.pi / n
                checks.append(_check(
                    f"normalization[{parity.value},{m},q={q:g}]",
                    abs(acc - math.pi) / math.pi, 1e-10))
    return checks


def _suite_identities() -> list:
    checks = []
    # The mode sum converges like e^{-m |mu1 - mu2|}; the sampled pairs
    # keep |mu1 - mu2| >= 1.45 so 16 orders reach well below the bound.
    cases = [
        (0.7, (0.3, 0.7), (1.75, 2.4), 1.0),
        (2.3, (0.15, 4.0), (1.6, 1.0), 1.0),
        (1.1, (0.4, 0.9), (1.9, 2.2), 2.0),
    ]
    for p, pt1, pt2, d in cases:
        r = greens_equivalence_residual(p, pt1, pt2, d, m_sum_max=16)
        checks.append(_check(
            f"greens[p={p:g},d={d:g}]", r, 1e-8))
    pw_cases = [
        (1.3, 0.0, 0.4, (0.5, 1.1), 1.0),
        (1.3, 0.8, 0.4, (0.5, 1.1), 1.0),
        (0.6, -0.9, 0.2, (1.0, 2.8), 1.5),
    ]
    for kappa, kx, kz, pt, d in pw_cases:
        r = planewave_expansion_residual(kappa, kx, kz, pt, d, m_sum_max=16)
        checks.append(_check(
            f"planewave[kx={kx:g},d={d:g}]", r, 1e-8))
    return checks


def _suite_oracle() -> list:
    """Near-circular ellipse against the cylindrical-Bessel computation."""
    checks = []
    ecc = 0.04
    mu0 = math.acosh(1.0 / ecc)
    r_eff = 1.0
    d = 2.0 * r_eff * math.exp(-mu0)
    surface = EllipticSurface(d=d, mu0=mu0)
    quad = QuadratureSpec()
    for h in (2.5, 4.0):
        for bc in (BoundaryCondition.DIRICHLET, BoundaryCondition.NEUMANN):
            e_ell = casimir_energy(Geometry(surface=surface, H=h, phi=0.0),
                                   bc, m_max=8, quad=quad) / d ** 2
            e_cyl = cylinder_plane_energy(r_eff, h, bc, m_max=14,
                                          quad=quad) / h ** 2
            rel = abs(e_ell - e_cyl) / abs(e_cyl)
            checks.append(_check(
                f"oracle[{bc.value},H={h:g}]", rel, 5e-3))
    return checks


_SUITES = {"mathieu": _suite_mathieu, "identities": _suite_identities,
           "oracle": _suite_oracle}


def cmd_validate(suite: str, output: str | None = None) -> int:
    names = sorted(_SUITES) if suite == "all" else [suite]
    report: dict = {"backend": ACTIVE_BACKEND, "suites": {}}
    ok = True
    for name in names:
        checks = _SUITES[name]()
        passed = all(c["passed"] for c in checks)
        ok = ok and passed
        report["suites"][name] = {"passed": passed, "checks": checks}
    report["passed"] = ok
    _write_text(output, json.dumps(report, sort_keys=True, indent=1) + "\n")
    return EXIT_OK if ok else EXIT_VALIDATION


# --- argument plumbing -------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; this front end reserves
    2 for numerical failures, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_config_flags(sp, sweep: bool = False) -> None:
    sp.add_argument("--config", help="JSON config file; flags override it")
    sp.add_argument("--d", type=float, help="half the interfocal separation")
    sp.add_argument("--mu0", type=float, help="radial coordinate of the surface")
    sp.add_argument("--strip", action="store_true",
                    help="zero-thickness strip (mu0 = 0)")
    sp.add_argument("--H", type=float, help="center-to-plane separation")
    sp.add_argument("--phi", type=float, help="tilt angle in degrees")
    sp.add_argument("--channel", choices=sorted(_CHANNELS),
                    help="d, n, or em (both channels summed)")
    sp.add_argument("--mmax", type=int, help="basis truncation order")
    sp.add_argument("--ladder", help="comma list of truncation orders, "
                    "strictly increasing, ending at mmax")
    sp.add_argument("--p-rel-tol", type=float, dest="p_rel_tol",
                    help="relative tolerance of the momentum integral")
    sp.add_argument("--u-tol", type=float, dest="u_tol",
                    help="kernel quadrature refinement tolerance")
    sp.add_argument("--p-max-factor", type=float, dest="p_max_factor",
                    help="exponential cutoff of the momentum map")
    sp.add_argument("--scale", choices=("d", "H"),
                    help="unit length for the reported energy")
    sp.add_argument("--output", help="write the record here instead of stdout")
    if sweep:
        sp.add_argument("--workers", type=int, help="worker thread count")


def _resolve_config(args) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config file must hold a JSON object")
        data.update(loaded)
    names = {f.name for f in fields(RunConfig)}
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    if getattr(args, "strip", False):
        data["mu0"] = 0.0
    if isinstance(data.get("ladder"), str):
        try:
            data["ladder"] = tuple(int(x) for x in data["ladder"].split(","))
        except ValueError as exc:
            raise InputError(f"bad ladder spec {data['ladder']!r}") from exc
    return RunConfig.from_mapping(data)


def _resolve_grid(args) -> list:
    if args.grid is not None:
        if args.start is not None or args.stop is not None \
                or args.points is not None:
            raise InputError("give either --grid or --start/--stop/--points")
        try:
            return [float(x) for x in args.grid.split(",")]
        except ValueError as exc:
            raise InputError(f"bad grid spec {args.grid!r}") from exc
    if args.start is None or args.stop is None or args.points is None:
        raise InputError("sweep needs --grid or all of --start/--stop/--points")
    n = int(args.points)
    if n < 1:
        raise InputError(f"--points must be >= 1, got {n}")
    if n == 1:
        return [float(args.start)]
    step = (float(args.stop) - float(args.start)) / (n - 1)
    return [float(args.start) + i * step for i in range(n)]


def build_parser() -> _Parser:
    parser = _Parser(prog="ellcas", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("energy", help="single-point energy")
    _add_config_flags(sp)

    sp = sub.add_parser("sweep", help="phi or H sweep, CSV output")
    _add_config_flags(sp, sweep=True)
    sp.add_argument("--variable", choices=("phi", "H"), required=True)
    sp.add_argument("--grid", help="comma list of grid values")
    sp.add_argument("--start", type=float)
    sp.add_argument("--stop", type=float)
    sp.add_argument("--points", type=int)

    sp = sub.add_parser("mathieu", help="evaluate angular/radial functions")
    sp.add_argument("--parity", choices=("e", "o"), required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--q", type=float, required=True,
                    help="Mathieu parameter (positive; the negative-parameter "
                         "variants use -q)")
    sp.add_argument("--theta", type=float, help="angular coordinate, degrees")
    sp.add_argument("--u", type=float, default=0.0,
                    help="imaginary part of the angular coordinate")
    sp.add_argument("--mu", type=float, help="radial coordinate")
    sp.add_argument("--output")

    sp = sub.add_parser("validate", help="run validation suites")
    sp.add_argument("--suite", choices=sorted(_SUITES) + ["all"],
                    default="all")
    sp.add_argument("--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "energy":
            return cmd_energy(_resolve_config(args))
        if args.command == "sweep":
            cfg = _resolve_config(args)
            return cmd_sweep(cfg, args.variable, _resolve_grid(args))
        if args.command == "mathieu":
            return cmd_mathieu(args)
        return cmd_validate(args.suite, args.output)
    except InputError as exc:
        print(f"ellcas: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EllcasError as exc:
        print(f"ellcas: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
