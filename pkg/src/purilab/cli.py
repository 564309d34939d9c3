"""Command-line workbench.

Subcommands: ``scan``, ``boundary``, ``correlations`` and ``reproduce``.
Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O.
"""
import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .boundary import (
    LOWER,
    UPPER,
    assign_trait,
    boundary_curve,
    no_go_gap,
)
from .correlations import correlation_scan
from .errors import PurilabError
from .figures import FIGURES, SCAN_COLUMNS, reproduce, scan_rows
from .io import metadata, read_csv, unitary_from_json, unitary_to_json, write_csv, write_json
from .protocol import EXACT, MONTE_CARLO, distribution_scan, haar_unitaries
from .qstate import InputEnsembleSpec, input_purity

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("scan", "boundary", "correlations", "reproduce")

log = logging.getLogger("purilab")

BOUNDARY_COLUMNS = ["P_target", "direction", "avg_F", "avg_P", "converged", "trait", "status"]
CORRELATION_COLUMNS = ["unitary_id", "avg_cond_entropy", "avg_geo_discord", "avg_entropic_discord",
                       "avg_negativity", "avg_F", "avg_P"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p_w: float = 0.75
    ancilla_purity: float = 1.0
    n_unitaries: int = 10_000
    n_states: int = 5_000
    seed: int = 0
    output_path: str = ""
    format: str = "csv"
    bins: int = 20
    targets: list = field(default_factory=list)
    scale: float = 0.1
    jobs: int = 1
    method: str = EXACT
    epsilon: float = 0.01
    input_path: str = ""
    entropic: bool = True
    figure: str = ""

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not 0.0 <= self.p_w <= 1.0:
            raise UsageError(f"--pw must lie in [0, 1], got {self.p_w}")
        if not 0.5 <= self.ancilla_purity <= 1.0:
            raise UsageError(f"--ancilla-purity must lie in [1/2, 1], got {self.ancilla_purity}")
        for name in ("n_unitaries", "n_states", "bins", "jobs"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be a positive integer")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.format not in ("csv", "json"):
            raise UsageError(f"--format must be csv or json, got {self.format!r}")
        if not self.scale > 0.0:
            raise UsageError("--scale must be positive")
        if self.method not in (EXACT, MONTE_CARLO):
            raise UsageError(f"--method must be {EXACT} or {MONTE_CARLO}")
        if any(not 0.5 <= t <= 1.0 for t in self.targets):
            raise UsageError("every target purity must lie in [1/2, 1]")
        if self.command == "boundary" and not self.targets:
            raise UsageError("boundary needs at least one --targets value")
        if self.command == "correlations" and not self.input_path:
            raise UsageError("correlations needs --input")
        if self.command == "reproduce" and self.figure not in FIGURES:
            raise UsageError(f"figure must be one of {', '.join(FIGURES)}")
        return self

    def echo(self):
        cfg = asdict(self)
        cfg.pop("output_path")
        return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _targets(values):
    out = []
    for v in values or []:
        for piece in str(v).split(","):
            if piece.strip():
                try:
                    out.append(float(piece))
                except ValueError:
                    raise UsageError(f"invalid target {piece!r}") from None
    return out


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--pw", type=float, default=0.75, help="input Bloch length p_w")
    common.add_argument("--ancilla-purity", type=float, default=1.0)
    common.add_argument("--unitaries", type=int, default=10_000, help="number of Haar unitaries")
    common.add_argument("--states", type=int, default=5_000, help="ensemble states per unitary")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--scale", type=float, default=0.1,
                        help="fraction of the full N=1e5, M=5e4 sample sizes (reproduce)")
    common.add_argument("--bins", type=int, default=20)
    common.add_argument("--targets", nargs="*", default=None,
                        help="target purities, space or comma separated")
    common.add_argument("--out", default=None, help="output file (directory for reproduce)")
    common.add_argument("--format", default="csv", help="csv or json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="purilab", description="Purification-by-ancilla workbench.")
    p.add_argument("--version", action="version", version=f"purilab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    s = sub.add_parser("scan", parents=[common], help="Haar scan of (avg_F, avg_P)")
    s.add_argument("--method", default=EXACT)
    b = sub.add_parser("boundary", parents=[common], help="optimal fidelity at target purities")
    b.add_argument("--epsilon", type=float, default=0.01, help="purity margin for the gap report")
    c = sub.add_parser("correlations", parents=[common], help="correlation measures for unitaries")
    c.add_argument("--input", required=False, default="",
                   help="boundary params JSON or scan CSV")
    c.add_argument("--no-entropic", action="store_true", help="skip entropic discord")
    r = sub.add_parser("reproduce", parents=[common], help="regenerate a figure's data")
    r.add_argument("figure")
    return p


def config_from_args(argv):
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
    if ns.command == "boundary" and ns.targets is not None and not _targets(ns.targets):
        raise UsageError("empty target list")
    cfg = RunConfig(
        command=ns.command, p_w=ns.pw, ancilla_purity=ns.ancilla_purity, n_unitaries=ns.unitaries,
        n_states=ns.states, seed=ns.seed, output_path=ns.out or "", format=ns.format,
        bins=ns.bins, targets=_targets(ns.targets), scale=ns.scale, jobs=ns.jobs,
        method=getattr(ns, "method", EXACT), epsilon=getattr(ns, "epsilon", 0.01),
        input_path=getattr(ns, "input", ""), entropic=not getattr(ns, "no_entropic", False),
        figure=getattr(ns, "figure", ""),
    )
    if cfg.command == "boundary" and not cfg.targets:
        cfg.targets = [input_purity(cfg.p_w), 1.0]
    return cfg.validate(), ns.verbose


def _out(cfg, default_stem):
    if cfg.output_path:
        return cfg.output_path
    return f"{default_stem}.{cfg.format}"


def _emit(cfg, path, meta, columns, rows, extra=None):
    if cfg.format == "csv":
        write_csv(path, meta, columns, rows)
    else:
        write_json(path, meta, {"columns": columns, "rows": rows, **(extra or {})})


def cmd_scan(cfg):
    spec = InputEnsembleSpec(cfg.p_w, cfg.ancilla_purity, cfg.n_states, cfg.seed)
    recs = distribution_scan(spec, cfg.n_unitaries, cfg.seed, method=cfg.method, jobs=cfg.jobs)
    path = _out(cfg, "scan")
    _emit(cfg, path, metadata(cfg.echo(), cfg.seed), SCAN_COLUMNS, scan_rows(recs, spec, cfg.seed))
    print(f"wrote {len(recs)} records to {path}")
    return EXIT_OK


def _sidecar(path, tag):
    stem, _ = os.path.splitext(path)
    return f"{stem}.{tag}.json"


def cmd_boundary(cfg):
    meta = metadata(cfg.echo(), cfg.seed)
    rows, dumps = [], []
    n_ok = 0
    for direction in (UPPER, LOWER):
        pts = boundary_curve(cfg.p_w, cfg.ancilla_purity, cfg.targets, direction, seed=cfg.seed)
        for tgt, pt in zip(cfg.targets, pts):
            if pt is None:
                rows.append({"P_target": tgt, "direction": direction, "avg_F": float("nan"),
                             "avg_P": float("nan"), "converged": False, "trait": "",
                             "status": "infeasible"})
                continue
            n_ok += 1
            trait = assign_trait(pt, cfg.p_w, cfg.ancilla_purity)
            rows.append({"P_target": tgt, "direction": direction, "avg_F": pt.optimal_avg_F,
                         "avg_P": pt.achieved_purity, "converged": pt.converged, "trait": trait,
                         "status": "ok" if pt.converged else "not_converged"})
            dumps.append({"P_target": tgt, "direction": direction, "avg_F": pt.optimal_avg_F,
                          "avg_P": pt.achieved_purity, "trait": trait,
                          "unitary": unitary_to_json(pt.unitary)})
    if n_ok == 0:
        print("error: no target purity was reachable", file=sys.stderr)
        return EXIT_NUMERICAL
    path = _out(cfg, "boundary")
    _emit(cfg, path, meta, BOUNDARY_COLUMNS, rows)
    write_json(_sidecar(path, "params"), meta, {"p_w": cfg.p_w, "ancilla_purity": cfg.ancilla_purity,
                                                "points": dumps})
    p_in = input_purity(cfg.p_w)
    if 0.0 < cfg.epsilon < 1.0 - p_in:
        rep = no_go_gap(cfg.p_w, cfg.epsilon, cfg.ancilla_purity, seed=cfg.seed)
        write_json(_sidecar(path, "nogo"), meta, {
            "p_w": rep.p_w, "F_in": rep.F_in, "P_in": rep.P_in, "sup_F_above": rep.sup_F_above,
            "gap": rep.gap, "epsilon": rep.epsilon, "certified": rep.certified})
    else:
        log.warning("no gap report: epsilon %g leaves no purity above P_in", cfg.epsilon)
    print(f"wrote {len(rows)} boundary rows to {path}")
    return EXIT_OK


def _load_unitaries(cfg):
    """Unitaries and ids from a boundary params dump or a scan CSV."""
    path = cfg.input_path
    if path.endswith(".json"):
        import json

        with open(path) as fh:
            data = json.load(fh)
        pts = data["points"]
        p_w = data.get("p_w", cfg.p_w)
        a = data.get("ancilla_purity", cfg.ancilla_purity)
        return list(range(len(pts))), [unitary_from_json(p["unitary"]) for p in pts], p_w, a
    meta, rows = read_csv(path)
    conf = meta.get("config", {})
    if "unitary_id" not in (rows[0] if rows else {}):
        raise UsageError(f"{path} has no unitary_id column")
    ids = [int(r["unitary_id"]) for r in rows]
    seed = int(conf.get("seed", cfg.seed))
    return ids, haar_unitaries(seed, ids), conf.get("p_w", cfg.p_w), conf.get(
        "ancilla_purity", cfg.ancilla_purity)


def cmd_correlations(cfg):
    ids, us, p_w, a = _load_unitaries(cfg)
    spec = InputEnsembleSpec(p_w, a, cfg.n_states, cfg.seed)
    rows = []
    for uid, u in zip(ids, us):
        c = correlation_scan(spec, u, entropic=cfg.entropic, unitary_id=uid)
        rows.append({"unitary_id": uid, "avg_cond_entropy": c.cond_entropy,
                     "avg_geo_discord": c.geo_discord, "avg_entropic_discord": c.entropic_discord,
                     "avg_negativity": c.negativity, "avg_F": c.avg_F, "avg_P": c.avg_P})
    path = _out(cfg, "correlations")
    _emit(cfg, path, metadata(cfg.echo(), cfg.seed), CORRELATION_COLUMNS, rows)
    print(f"wrote {len(rows)} correlation rows to {path}")
    return EXIT_OK


def cmd_reproduce(cfg):
    outdir = cfg.output_path or f"reproduce_{cfg.figure}"
    files = reproduce(cfg.figure, outdir, scale=cfg.scale, seed=cfg.seed, bins=cfg.bins,
                      targets=cfg.targets or None, jobs=cfg.jobs)
    for f in files:
        print(f"wrote {f}")
    return EXIT_OK


HANDLERS = {"scan": cmd_scan, "boundary": cmd_boundary, "correlations": cmd_correlations,
            "reproduce": cmd_reproduce}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, verbose = config_from_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and --version
        return exc.code or EXIT_OK
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PurilabError, FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
