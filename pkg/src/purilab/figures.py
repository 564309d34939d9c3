"""Figure-reproduction pipelines behind ``purilab reproduce``.

Full-size runs use ``N = 1e5`` unitaries and ``M = 5e4`` ensemble states;
``scale`` shrinks both.
"""
import os

import numpy as np

from . import streams
from .boundary import (
    LOWER,
    UPPER,
    assign_trait,
    average_geometric_discord,
    boundary_curve,
    discord_boundary,
    empirical_envelope,
    penalty_boundary,
    reachable_purity_range,
)
from .correlations import correlation_scan, geometric_discord
from .gates import DEFAULT_TEMPLATES
from .boundary import template_unitaries
from .io import metadata, write_csv, write_svg_scatter
from .protocol import distribution_scan, haar_unitaries, joint_state
from .qstate import (
    InputEnsembleSpec,
    ancilla_state,
    input_fidelity,
    input_purity,
    make_input_state,
    random_direction,
)

FULL_N = 100_000
FULL_M = 50_000
FIGURES = ("fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig4c")
SCAN_COLUMNS = ["unitary_id", "avg_F", "avg_P", "std_err_F", "std_err_P", "method", "p_w",
                "ancilla_purity", "seed"]


def scaled(scale):
    return max(1, int(round(FULL_N * scale))), max(1, int(round(FULL_M * scale)))


def scan_rows(records, spec, seed):
    return [{"unitary_id": r.unitary_id, "avg_F": r.avg_fidelity, "avg_P": r.avg_purity,
             "std_err_F": r.std_err_f, "std_err_P": r.std_err_p, "method": r.method,
             "p_w": spec.p_w, "ancilla_purity": spec.ancilla_purity, "seed": seed}
            for r in records]


def _path(outdir, name):
    return os.path.join(outdir, name)


def fig2(which, outdir, scale, seed, jobs=1):
    n, m = scaled(scale)
    if which == "fig2a":
        specs = [InputEnsembleSpec(p, 1.0, m, seed) for p in (0.3, 0.6, 0.9)]
        label = lambda s: f"P_in={s.input_purity:g}"  # noqa: E731
        vlines = [s.input_purity for s in specs]
    else:
        specs = [InputEnsembleSpec(0.75, a, m, seed) for a in (0.82, 0.905, 1.0)]
        label = lambda s: f"ancilla purity {s.ancilla_purity:g}"  # noqa: E731
        vlines = [input_purity(0.75)]
    cfg = {"figure": which, "scale": scale, "n_unitaries": n, "n_states": m}
    meta = metadata(cfg, seed)
    rows, series = [], []
    for spec in specs:
        recs = distribution_scan(spec, n, seed, jobs=jobs)
        rows += scan_rows(recs, spec, seed)
        series.append((label(spec), [r.avg_purity for r in recs], [r.avg_fidelity for r in recs]))
    files = [_path(outdir, f"{which}.csv"), _path(outdir, f"{which}.svg")]
    write_csv(files[0], meta, SCAN_COLUMNS, rows)
    write_svg_scatter(files[1], meta, series, "average purity P", "average fidelity F",
                      title=which, vlines=vlines)
    return files


def fig3(outdir, scale, seed, bins=20, n_targets=24, jobs=1, p_w=0.75, targets=None):
    n, m = scaled(scale)
    spec = InputEnsembleSpec(p_w, 1.0, m, seed)
    recs = distribution_scan(spec, n, seed, jobs=jobs)
    p_lo, _ = reachable_purity_range(p_w, 1.0, seed=seed)
    p_in = input_purity(p_w)
    grid = np.linspace(p_lo, 1.0, n_targets) if targets is None else np.asarray(targets, float)
    grid = np.unique(np.round(np.concatenate([grid, [p_in]]), 10))
    envelope = empirical_envelope(recs, bins)

    rows = []
    curves = []
    for direction in (UPPER, LOWER):
        pts = boundary_curve(p_w, 1.0, grid, direction, seed=seed)
        ok = [p for p in pts if p is not None]
        for p in ok:
            rows.append({"P_target": p.target_purity, "direction": direction,
                         "avg_F": p.optimal_avg_F, "avg_P": p.achieved_purity,
                         "converged": p.converged, "trait": assign_trait(p, p_w)})
        curves.append((f"{direction} boundary", [p.achieved_purity for p in ok],
                       [p.optimal_avg_F for p in ok]))

    env_rows = []
    for e in envelope:
        b = penalty_boundary(p_w, 1.0, e.target_purity, e.direction, seed=seed)
        excess = (e.optimal_avg_F - b.optimal_avg_F) * (1 if e.direction == UPPER else -1)
        env_rows.append({"P_target": e.target_purity, "direction": e.direction,
                         "envelope_F": e.optimal_avg_F, "boundary_F": b.optimal_avg_F,
                         "excess": excess, "unitary_id": int(e.params[0])})

    cfg = {"figure": "fig3", "scale": scale, "n_unitaries": n, "n_states": m, "p_w": p_w,
           "bins": bins, "n_targets": len(grid)}
    meta = metadata(cfg, seed)
    files = [_path(outdir, f) for f in ("fig3_scatter.csv", "fig3_boundary.csv",
                                        "fig3_envelope.csv", "fig3.svg")]
    write_csv(files[0], meta, SCAN_COLUMNS, scan_rows(recs, spec, seed))
    write_csv(files[1], meta, ["P_target", "direction", "avg_F", "avg_P", "converged", "trait"], rows)
    write_csv(files[2], meta, ["P_target", "direction", "envelope_F", "boundary_F", "excess",
                               "unitary_id"], env_rows)
    write_svg_scatter(files[3], meta, [("random unitaries", [r.avg_purity for r in recs],
                                        [r.avg_fidelity for r in recs])],
                      "average purity P", "average fidelity F", title="fig3", curves=curves,
                      vlines=[p_in])
    return files


def fig4ab(which, outdir, scale, seed, targets=None, p_w=0.75):
    _, m = scaled(scale)
    p_in = input_purity(p_w)
    grid = np.linspace(p_in - 0.1, p_in + 0.1, 21) if targets is None else np.asarray(targets)
    spec = InputEnsembleSpec(p_w, 1.0, m, seed)
    rows = []
    for pt in boundary_curve(p_w, 1.0, grid, UPPER, seed=seed):
        if pt is None:
            continue
        c = correlation_scan(spec, pt.unitary, entropic=False)
        rows.append({"P_target": pt.target_purity, "trait": assign_trait(pt, p_w),
                     "avg_F": c.avg_F, "avg_P": c.avg_P, "avg_cond_entropy": c.cond_entropy})
    tpl = DEFAULT_TEMPLATES["A"]
    for a in np.linspace(0.0, np.pi / 2, 11):
        u = template_unitaries(tpl, [[a]])[0]
        c = correlation_scan(spec, u, entropic=False)
        rows.append({"P_target": p_in, "trait": "A", "avg_F": c.avg_F, "avg_P": c.avg_P,
                     "avg_cond_entropy": c.cond_entropy})
    cfg = {"figure": which, "scale": scale, "n_states": m, "p_w": p_w,
           "targets": [float(t) for t in grid]}
    meta = metadata(cfg, seed)
    files = [_path(outdir, f"{which}.csv"), _path(outdir, f"{which}.svg")]
    write_csv(files[0], meta, ["P_target", "trait", "avg_F", "avg_P", "avg_cond_entropy"], rows)
    xkey, xlabel = ("avg_P", "average purity P") if which == "fig4a" else ("avg_F", "average fidelity F")
    series = []
    for trait in sorted({r["trait"] for r in rows}):
        sel = [r for r in rows if r["trait"] == trait]
        series.append((f"trait {trait}", [r[xkey] for r in sel], [r["avg_cond_entropy"] for r in sel]))
    write_svg_scatter(files[1], meta, series, xlabel, "average conditional entropy E", title=which,
                      vlines=[p_in] if which == "fig4a" else [input_fidelity(p_w)])
    return files


def fig4c(outdir, scale, seed, targets=None, p_w=0.75, n_states=None, n_unitaries=None):
    """Geometric-discord scatter with its lower frontier.

    Scatter and frontier share one fixed set of reference directions so the
    bound is checked on identical ensembles.
    """
    n, m = scaled(scale)
    n_u = n_unitaries or max(100, n // 10)
    n_s = n_states or max(64, m // 25)
    p_in = input_purity(p_w)
    grid = (np.linspace(p_in - 0.08, p_in + 0.08, 9) if targets is None else np.asarray(targets))
    rho_a = ancilla_state(1.0)
    directions = random_direction(streams.stream(seed, streams.DIRECTIONS, 0), size=n_s)
    rho_s = make_input_state(p_w, directions)
    us = haar_unitaries(seed, range(n_u))
    spec = InputEnsembleSpec(p_w, 1.0, n_s, seed)
    recs = distribution_scan(spec, n_u, seed, unitaries=us)
    scatter = []
    for r, u in zip(recs, us):
        d = float(np.mean(geometric_discord(joint_state(rho_s, rho_a, u))))
        scatter.append({"unitary_id": r.unitary_id, "avg_P": r.avg_purity, "avg_F": r.avg_fidelity,
                        "avg_geo_discord": d})
    bound = discord_boundary(p_w, grid, 1.0, n_states=n_s, seed=seed)
    brows = [{"P_target": b.target_purity, "avg_P": b.achieved_purity,
              "min_avg_geo_discord": b.min_avg_geo_discord,
              "fidelity_boundary_F": b.fidelity_boundary_F,
              "fidelity_boundary_geo_discord": b.fidelity_boundary_geo_discord} for b in bound]
    cfg = {"figure": "fig4c", "scale": scale, "n_unitaries": n_u, "n_states": n_s, "p_w": p_w,
           "targets": [float(t) for t in grid]}
    meta = metadata(cfg, seed)
    files = [_path(outdir, f) for f in ("fig4c_scatter.csv", "fig4c_boundary.csv", "fig4c.svg")]
    write_csv(files[0], meta, ["unitary_id", "avg_P", "avg_F", "avg_geo_discord"], scatter)
    write_csv(files[1], meta, ["P_target", "avg_P", "min_avg_geo_discord", "fidelity_boundary_F",
                               "fidelity_boundary_geo_discord"], brows)
    write_svg_scatter(
        files[2], meta,
        [("random unitaries", [s["avg_P"] for s in scatter], [s["avg_geo_discord"] for s in scatter])],
        "average purity P", "average geometric discord",
        title="fig4c",
        curves=[("min discord", [b["avg_P"] for b in brows], [b["min_avg_geo_discord"] for b in brows]),
                ("fidelity frontier", [b["avg_P"] for b in brows],
                 [b["fidelity_boundary_geo_discord"] for b in brows])],
        vlines=[p_in])
    return files


def reproduce(figure, outdir, scale=0.1, seed=0, bins=20, targets=None, jobs=1):
    os.makedirs(outdir, exist_ok=True)
    if figure in ("fig2a", "fig2b"):
        return fig2(figure, outdir, scale, seed, jobs)
    if figure == "fig3":
        return fig3(outdir, scale, seed, bins=bins, jobs=jobs, targets=targets)
    if figure in ("fig4a", "fig4b"):
        return fig4ab(figure, outdir, scale, seed, targets)
    if figure == "fig4c":
        return fig4c(outdir, scale, seed, targets)
    raise ValueError(f"unknown figure {figure!r}; choose from {FIGURES}")
