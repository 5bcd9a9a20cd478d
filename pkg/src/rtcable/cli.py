"""Command-line front end.

Every command writes one report: a JSON envelope
{tool, version, config, timestamp, payload} or, for the sweeps with
``--format csv``, a CSV table.  Exit status is 0 on success, 1 on a
precondition violation (with a JSON error object on stderr) and 2 on an
internal consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from math import gcd
from pathlib import Path
from typing import Any

import numpy as np

from rtcable import __version__
from rtcable.analysis import (
    fit_growth,
    growth_record,
    numeric_det,
    sandwich_check,
    trend_slope,
)
from rtcable.cabling import build_Rm, rt_matrix_e_basis
from rtcable.errors import ConsistencyError, PreconditionError, StructureError
from rtcable.params import CableParams
from rtcable.structure import cofactor_det, verify_structure, zero_rows

logger = logging.getLogger("rtcable")

TOOL = "rtcable"
COMMANDS = ("matrix", "verify", "det", "sweep-norm", "sweep-tv", "sandwich", "explore-small-r")
CSV_FIELDS = ("p", "q", "r", "m", "det_modulus", "inv_norm", "rt_norm", "tv_cable", "status")
DET_TOL = 1e-9


class UsageError(Exception):
    """Bad command line; reported like a precondition violation."""


class OracleDisagreement(Exception):
    """Two independent computations of the same quantity differ."""

    def __init__(self, message: str, payload: dict[str, Any]):
        super().__init__(message)
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which is reserved
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int
    q: int
    r: int | None = None
    r_min: int | None = None
    r_max: int | None = None
    output: str | None = None
    format: str = "json"
    seed: int = 0
    color: int = 1
    which: str = "rm"
    gnuplot: str | None = None

    def r_values(self) -> list[int]:
        """Odd levels covered by the command, ascending."""
        if self.r is not None:
            return [self.r]
        lo = 3 if self.r_min is None else max(3, self.r_min)
        lo += (lo + 1) % 2
        return list(range(lo, self.r_max + 1, 2))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description="Cable-space operators at odd levels r.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "matrix": "dump R_m (or the e-basis operator) as JSON terms",
        "verify": "check the sparsity structure of R_m",
        "det": "cofactor and numeric determinants of R_m",
        "sweep-norm": "det, norms and TV value over a range of r",
        "sweep-tv": "coloured TV values over a range of r",
        "sandwich": "norm-ratio bounds for stand-in boundary vectors",
        "explore-small-r": "nonsingularity probe for r <= q + 6",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--r", type=int)
        sp.add_argument("--r-min", type=int)
        sp.add_argument("--r-max", type=int)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--color", type=int, default=1, help="colour index for sweep-tv")
        sp.add_argument("--which", choices=("rm", "rt"), default="rm", help="matrix to dump")
        sp.add_argument("--gnuplot", help="also write a two-column (r, value) file here")
    parser.add_argument("--verbose", "-v", action="store_true")
    return parser


def parse_config(argv: list[str] | None = None) -> tuple[RunConfig, bool]:
    ns = build_parser().parse_args(argv)
    if ns.q < 1:
        raise PreconditionError(f"q must be positive, got {ns.q}")
    if gcd(ns.p, ns.q) != 1:
        raise PreconditionError(f"p and q must be coprime, got gcd({ns.p}, {ns.q}) = {gcd(ns.p, ns.q)}")
    single = ns.command in ("matrix", "verify", "det")
    ranged = ns.command in ("sweep-norm", "sweep-tv", "sandwich")
    if single and ns.r is None:
        raise UsageError(f"{ns.command} needs --r")
    if ranged and ns.r is None and ns.r_max is None:
        raise UsageError(f"{ns.command} needs --r or --r-max")
    if ns.r is not None and (ns.r < 3 or ns.r % 2 == 0):
        raise PreconditionError(f"r must be an odd integer >= 3, got {ns.r}")
    if ns.r is not None and (ns.r_min is not None or ns.r_max is not None):
        raise UsageError("give either --r or --r-min/--r-max, not both")
    if ns.format == "csv" and ns.command not in ("sweep-norm", "sweep-tv"):
        raise UsageError(f"csv output is only available for the sweeps, not {ns.command}")
    if ns.gnuplot and ns.command not in ("sweep-norm", "sweep-tv", "explore-small-r"):
        raise UsageError(f"--gnuplot is only available for sweeps, not {ns.command}")
    if ns.color < 1:
        raise PreconditionError(f"colour must be >= 1, got {ns.color}")
    cfg = RunConfig(
        ns.command, ns.p, ns.q, ns.r, ns.r_min, ns.r_max, ns.output, ns.format, ns.seed, ns.color, ns.which,
        ns.gnuplot,
    )
    return cfg, ns.verbose


# -- payloads -------------------------------------------------------------


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def cmd_matrix(cfg: RunConfig) -> dict[str, Any]:
    params = CableParams.of(cfg.p, cfg.q, cfg.r)
    mat = build_Rm(params).to_cycmatrix() if cfg.which == "rm" else rt_matrix_e_basis(params)
    entries = []
    for row, col, exp, coeff in mat.terms():
        # a group-ring coefficient c > 1 is written as |c| unit terms
        entries.extend({"row": row, "col": col, "sign": 1 if coeff > 0 else -1, "exp": exp} for _ in range(abs(coeff)))
    return {"p": cfg.p, "q": cfg.q, "r": params.r, "m": params.m, "matrix": cfg.which, "entries": entries}


def cmd_verify(cfg: RunConfig) -> dict[str, Any]:
    params = CableParams.of(cfg.p, cfg.q, cfg.r)
    rt_matrix_e_basis(params)  # raises ConsistencyError if the assemblies differ
    rep = verify_structure(params)
    out = rep.to_dict()
    out["all_clauses_pass"] = rep.all_clauses_pass()
    out["failed_clauses"] = rep.failed_clauses()
    return out


def _det_payload(params: CableParams) -> dict[str, Any]:
    num = numeric_det(build_Rm(params).to_complex())
    out: dict[str, Any] = {
        "p": params.p, "q": params.q, "r": params.r, "m": params.m,
        "numeric": _complex_pair(num),
        "det_modulus": abs(num),
        "zero_rows": zero_rows(params) if params.level_gcd > 1 else [],
    }
    try:
        mono, trace = cofactor_det(params)
    except StructureError as exc:
        out["cofactor"] = {"status": "failed", "reason": str(exc)}
        out["agree"] = None
        return out
    value = complex(mono.sign * params.sys.zeta_powers[mono.exp]) if mono.sign else 0j
    out["cofactor"] = {
        "status": "ok",
        "sign": mono.sign,
        "exp": mono.exp,
        "value": _complex_pair(value),
        "steps": len(trace),
    }
    out["agree"] = abs(value - num) < DET_TOL
    return out


def cmd_det(cfg: RunConfig) -> dict[str, Any]:
    params = CableParams.of(cfg.p, cfg.q, cfg.r)
    out = _det_payload(params)
    if out["agree"] is False:
        raise OracleDisagreement("cofactor and numeric determinants differ", out)
    return out


def _records(cfg: RunConfig, norms: bool) -> list[dict[str, Any]]:
    return [asdict(growth_record(cfg.p, cfg.q, r, norms=norms, color=cfg.color)) for r in cfg.r_values()]


def cmd_sweep_norm(cfg: RunConfig) -> dict[str, Any]:
    records = _records(cfg, norms=True)
    ok = [rec for rec in records if rec["status"] == "ok"]
    fit = None
    if len(ok) >= 5:
        fit = asdict(fit_growth([rec["r"] for rec in ok], [rec["inv_norm"] for rec in ok]))
    return {"p": cfg.p, "q": cfg.q, "records": records, "inv_norm_fit": fit}


def cmd_sweep_tv(cfg: RunConfig) -> dict[str, Any]:
    records = _records(cfg, norms=False)
    ok = [rec for rec in records if rec["status"] == "ok" and rec["r"] >= 2 * cfg.color + 1]
    rates = [2 * math.pi / rec["r"] * math.log(rec["tv_cable"]) for rec in ok]
    slope = trend_slope([rec["r"] for rec in ok], rates) if len(ok) >= 2 else None
    return {"p": cfg.p, "q": cfg.q, "color": cfg.color, "records": records, "growth_rate_slope": slope}


def cmd_sandwich(cfg: RunConfig) -> dict[str, Any]:
    rep = sandwich_check(cfg.p, cfg.q, cfg.r_values(), seed=cfg.seed)
    out = asdict(rep)
    out["skipped"] = {str(k): v for k, v in rep.skipped.items()}
    out["bounded"] = rep.bounded
    return out


def cmd_explore_small_r(cfg: RunConfig) -> dict[str, Any]:
    hi = cfg.q + 6 if cfg.r_max is None else min(cfg.r_max, cfg.q + 6)
    rs = [cfg.r] if cfg.r is not None else [r for r in range(3, hi + 1, 2) if cfg.r_min is None or r >= cfg.r_min]
    probes = []
    for r in rs:
        params = CableParams.of(cfg.p, cfg.q, r)
        d = _det_payload(params)
        d["verdict"] = "nonsingular" if d["det_modulus"] > DET_TOL else "singular"
        probes.append(d)
    return {"p": cfg.p, "q": cfg.q, "probes": probes}


HANDLERS = {
    "matrix": cmd_matrix,
    "verify": cmd_verify,
    "det": cmd_det,
    "sweep-norm": cmd_sweep_norm,
    "sweep-tv": cmd_sweep_tv,
    "sandwich": cmd_sandwich,
    "explore-small-r": cmd_explore_small_r,
}


# -- output ---------------------------------------------------------------


def envelope(cfg: RunConfig, payload: dict[str, Any]) -> dict[str, Any]:
    return {
        "tool": TOOL,
        "version": __version__,
        "config": asdict(cfg),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "payload": payload,
    }


def _clean(obj: Any) -> Any:
    """Make numpy scalars and non-finite floats JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def render(cfg: RunConfig, payload: dict[str, Any]) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for rec in payload["records"]:
            w.writerow({k: ("" if rec.get(k) is None else rec[k]) for k in CSV_FIELDS})
        return buf.getvalue()
    return json.dumps(_clean(envelope(cfg, payload)), indent=2) + "\n"


def gnuplot_lines(cfg: RunConfig, payload: dict[str, Any]) -> str:
    if cfg.command == "explore-small-r":
        pts = [(d["r"], d["det_modulus"]) for d in payload["probes"]]
    else:
        key = "inv_norm" if cfg.command == "sweep-norm" else "tv_cable"
        pts = [(rec["r"], rec[key]) for rec in payload["records"] if rec["status"] == "ok"]
    return "".join(f"{r} {v!r}\n" for r, v in pts)


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fail(status: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_status": status}) + "\n")
    return status


def run(cfg: RunConfig) -> int:
    try:
        payload = HANDLERS[cfg.command](cfg)
    except OracleDisagreement as exc:
        _write(cfg.output, render(cfg, exc.payload))
        return _fail(2, "oracle_disagreement", str(exc))
    except ConsistencyError as exc:
        return _fail(2, "consistency", str(exc))
    except PreconditionError as exc:
        return _fail(1, "precondition", str(exc))
    except ValueError as exc:
        return _fail(1, "precondition", str(exc))
    _write(cfg.output, render(cfg, payload))
    if cfg.gnuplot:
        Path(cfg.gnuplot).write_text(gnuplot_lines(cfg, payload))
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        cfg, verbose = parse_config(argv)
    except UsageError as exc:
        return _fail(1, "usage", str(exc))
    except PreconditionError as exc:
        return _fail(1, "precondition", str(exc))
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
