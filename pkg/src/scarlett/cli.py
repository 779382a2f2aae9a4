"""Command-line entry point: ``scarlett <subcommand> ...``.

Every run writes its CSV/JSON outputs plus ``manifest.json`` into
``--out-dir`` and prints the main JSON summary on stdout.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import platform
import sys
import time
from typing import Callable

import numpy as np

from . import __version__
from . import cluster as cl
from . import dynamics as dy
from . import fock_basis as fb
from . import graph as gr
from . import hamiltonian as ham
from . import kernels
from . import spectral as spc
from . import symmetry as sy
from .errors import ConfigError, ScarlettError

Outputs = dict  # filename -> text


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15e}"
    return str(v)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _sites(args) -> tuple[int, int]:
    L = args.L
    Np = L if getattr(args, "Np", None) is None else args.Np
    if L is None:
        raise ConfigError("--L is required")
    return L, Np


def _basis_or_sector(args):
    L, Np = _sites(args)
    basis = fb.enumerate_basis(L, Np, periodic=not getattr(args, "obc", False))
    if getattr(args, "k", None) is not None:
        return sy.build_momentum_sector(basis, args.k)
    return basis


# ---------------------------------------------------------------- subcommands


def cmd_basis_dump(args) -> tuple[dict, Outputs]:
    L, Np = _sites(args)
    basis = fb.enumerate_basis(L, Np)
    rows = ([i, *map(int, s)] for i, s in enumerate(basis.states))
    head = ["rank", *(f"n_{j + 1}" for j in range(L))]
    return {"L": L, "Np": Np, "dimension": basis.dim}, {"basis.csv": _csv(head, rows)}


def cmd_sector_info(args) -> tuple[dict, Outputs]:
    L, Np = _sites(args)
    if args.I is not None:
        if args.component == "h3":
            parent = gr.largest_component(L)
        else:
            parent = fb.enumerate_basis(L, Np, periodic=not args.obc)
        sec = sy.build_inversion_sector(parent, args.I)
    else:
        sec = sy.build_momentum_sector(fb.enumerate_basis(L, Np), 0 if args.k is None else args.k)
    info = sec.describe()
    return info, {"sector.json": _json(info)}


def cmd_ham_dump(args) -> tuple[dict, Outputs]:
    op = ham.build_operator(ham.ModelKind(args.model, args.J), _basis_or_sector(args))
    coo = op.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    if op.is_complex:
        head = ["row", "col", "re", "im"]
        rows = ((coo.row[i], coo.col[i], coo.data[i].real, coo.data[i].imag) for i in order)
    else:
        head = ["row", "col", "value"]
        rows = ((coo.row[i], coo.col[i], coo.data[i]) for i in order)
    info = op.describe()
    return info, {"ham.csv": _csv(head, rows), "ham.json": _json(info)}


def cmd_graph(args) -> tuple[dict, Outputs]:
    if args.action == "census":
        c = gr.green_red_census(args.L, args.Np, args.sector)
        return c.as_dict(), {"census.json": _json(c.as_dict())}
    L, Np = _sites(args)
    basis = fb.enumerate_basis(L, Np, periodic=not args.obc)
    op = ham.build_operator(args.model, basis)
    if args.action == "components":
        cc = gr.connected_components(op)
        order = np.argsort(-cc.sizes, kind="stable")
        rows = ((i, cc.sizes[c], fb.format_state(basis.states[cc.seeds[c]])) for i, c in enumerate(order))
        info = {"model": args.model, "L": L, "Np": Np, "components": cc.count, "frozen": cc.frozen,
                "largest": int(cc.sizes.max())}
        return info, {"components.csv": _csv(["component_id", "size", "seed"], rows)}
    dot = gr.to_dot(op)
    return {"model": args.model, "L": L, "Np": Np, "dimension": op.dim, "edges": op.nnz // 2}, {"graph.dot": dot}


def _eigs(args, vectors=False):
    op = ham.build_operator(args.model, _basis_or_sector(args))
    return op, spc.diagonalize(op, vectors=vectors)


def cmd_spec(args) -> tuple[dict, Outputs]:
    if args.action == "zeromodes":
        row = spc.zero_mode_table(args.model, args.L)
        return row.as_dict(), {"zeromodes.json": _json(row.as_dict())}
    if args.action == "levels":
        op, e = _eigs(args)
        info = {**op.describe(), "n_levels": e.values.size}
        return info, {"levels.csv": _csv(["E_n"], ([v] for v in e.values))}
    if args.action == "rstat":
        op, e = _eigs(args)
        st = spc.level_statistics(e, window=args.window, exclude_zero_modes=not args.keep_zero)
        info = {**st.as_dict(), "goe": spc.goe_mean_r(), "poisson": spc.poisson_mean_r(), **op.describe()}
        hist = zip(st.edges[:-1], st.edges[1:], st.density)
        return info, {"rstat.json": _json(info), "rstat_hist.csv": _csv(["lo", "hi", "density"], hist)}
    op, e = _eigs(args, vectors=True)
    L_A, off = _cut(args.cut, op.basis.L)
    S = spc.entropy_scatter(e, L_A, off)
    info = {**op.describe(), "L_A": L_A, "offset": off}
    return info, {"entropy_scatter.csv": _csv(["E", "S"], zip(e.values, S))}


def _cut(text, L) -> tuple[int, int]:
    if text is None:
        return L // 2, 0
    parts = [int(p) for p in str(text).split(",")]
    if len(parts) == 1:
        parts.append(0)
    if len(parts) != 2:
        raise ConfigError(f"--cut expects L_A or L_A,offset; got {text!r}")
    return parts[0], parts[1]


def _cluster_arg(text, L, Np, periodic=True):
    if text in (None, "none"):
        return None
    if text in ("minimal", "extended"):
        if L % 3:
            raise ConfigError(f"{text} cluster needs L divisible by 3")
        return cl.build_cluster_basis(cl.ClusterSpec.family(text, L // 3, periodic=periodic))
    if text.startswith("pattern:"):
        pats = tuple(p for p in text[len("pattern:"):].split("/") if p)
        if not pats or L % len(pats[0]):
            raise ConfigError(f"bad cluster pattern list {text!r}")
        return cl.build_cluster_basis(cl.ClusterSpec(pats, L // len(pats[0]), periodic))
    raise ConfigError(f"unknown cluster {text!r}; use none, minimal, extended or pattern:<p1>/<p2>/...")


def cmd_evolve(args) -> tuple[dict, Outputs]:
    init = fb.parse_pattern(args.init)
    L, Np = init.size, int(init.sum())
    if args.L is not None and args.L != L:
        raise ConfigError(f"--init has {L} sites but --L is {args.L}")
    if args.Np is not None and args.Np != Np:
        raise ConfigError(f"--init holds {Np} particles but --Np is {args.Np}")
    obs = tuple(o.strip() for o in args.observables.split(",") if o.strip())
    clu = _cluster_arg(args.cluster, L, Np, not args.obc)
    if clu is not None and "cluster_overlap" not in obs:
        obs = obs + ("cluster_overlap",)
    spec = dy.QuenchSpec(
        ham.ModelKind(args.model, args.J), init, dy.time_grid(args.tmax, args.dt),
        cut=_cut(args.cut, L), observables=obs, cluster=clu, periodic=not args.obc, method=args.method,
    )
    ts = dy.evolve(spec)
    buf = io.StringIO()
    ts.write_csv(buf)
    info = ts.summary()
    return info, {"evolve.csv": buf.getvalue(), "evolve.json": _json(info)}


def cmd_cluster(args) -> tuple[dict, Outputs]:
    t = dy.time_grid(args.tmax, args.dt)
    if args.family == "minimal":
        F, period = cl.minimal_cluster_fidelity(args.n, t), np.pi / 4
    elif args.family == "extended":
        F, period = cl.extended_cluster_fidelity(args.n, t), cl.solve_extended_constants().period
    elif args.family == "h3":
        F = cl.h3_fidelity(args.n, t, args.symmetrized)
        period = np.pi / 4 if args.symmetrized else np.pi / 2
    else:
        F = cl.generalized_cluster_fidelity(args.N, args.n, t)
        pk = dy.first_peak(t, F)
        period = None if pk is None else pk[0]
    pk = dy.first_peak(t, F)
    info = {"family": args.family, "n": args.n, "period": period,
            "first_peak": None if pk is None else {"t": pk[0], "F": pk[1]}}
    if args.family == "generalized":
        info["N"] = args.N
    return info, {"cluster.csv": _csv(["t", "F"], zip(t, F)), "cluster.json": _json(info)}


def cmd_zeromodes(args) -> tuple[dict, Outputs]:
    rows = [spc.zero_mode_table(args.model, L).as_dict() for L in range(args.Lmin, args.Lmax + 1)]
    info = {"model": args.model, "rows": rows}
    return info, {"zeromodes.json": _json(info)}


# ---------------------------------------------------------------- reproduce


def _rep_tabS3(args):
    Lmax = 14
    rows = []
    for L in range(2, Lmax + 1):
        rows.append((L, gr.green_red_census(L).diff, gr.green_red_census(L, sector="k0").diff))
    return {"tag": "tabS3", "Lmax": Lmax}, {"tabS3.csv": _csv(["L", "g_minus_r", "k0_g_minus_r"], rows)}


def _rep_zero_table(model, tag, Lmax=8):
    rows = [spc.zero_mode_table(model, L).as_dict() for L in range(2, Lmax + 1)]
    return {"tag": tag, "Lmax": Lmax, "note": "L up to 10 via the zeromodes subcommand"}, {f"{tag}.json": _json(rows)}


def _fid_sizes(model, sizes, tmax=10.0, dt=0.01, obs=("fidelity",)):
    out = {}
    summary = {}
    for L in sizes:
        spec = dy.QuenchSpec(model, f"210x{L // 3}", dy.time_grid(tmax, dt), observables=obs, cut=(L // 2, 0))
        ts = dy.evolve(spec)
        buf = io.StringIO()
        ts.write_csv(buf)
        out[f"{model}_L{L}.csv"] = buf.getvalue()
        summary[str(L)] = ts.summary()
    return summary, out


def _rep_fig3a(args):
    s, o = _fid_sizes("H1", (3, 6, 9, 12), tmax=5.0)
    return {"tag": "fig3a", "runs": s}, o


def _rep_fig3b(args):
    s, o = _fid_sizes("H2", (3, 6, 9, 12), tmax=5.0)
    return {"tag": "fig3b", "runs": s}, o


def _rep_fig3c(args):
    s, o = _fid_sizes("H1", (6, 9, 12), tmax=5.0, obs=("fidelity", "entropy"))
    return {"tag": "fig3c", "runs": s}, o


def _rep_fig4(args):
    s, o = _fid_sizes("H1", (6, 9, 12), tmax=5.0, obs=("fidelity", "n_site", "nn_correlation"))
    return {"tag": "fig4", "runs": s}, o


def _rep_fig5(args):
    L = 12
    t = dy.time_grid(5.0, 0.01)
    clu = cl.build_cluster_basis(cl.ClusterSpec.family("minimal", L // 3))
    ts = dy.evolve(dy.QuenchSpec("H1", "210x4", t, observables=("fidelity", "entropy", "cluster_overlap"),
                                 cluster=clu, cut=(6, 0)))
    rows = zip(t, ts["fidelity"], cl.minimal_cluster_fidelity(L // 3, t), cl.extended_cluster_fidelity(L // 3, t),
               ts["entropy"], ts["cluster_overlap"])
    info = {"tag": "fig5", "L": L, "note": "rerun at L=12 instead of 15", **ts.summary()}
    head = ["t", "F_full", "F_minimal", "F_extended", "S_full", "O_minimal"]
    return info, {"fig5.csv": _csv(head, rows)}


def _rep_fig2(model, tag, L=10):
    basis = fb.enumerate_basis(L, L)
    op = ham.build_operator(model, sy.build_momentum_sector(basis, 0))
    e = spc.diagonalize(op, vectors=True)
    st = spc.level_statistics(e)
    S = spc.entropy_scatter(e, L // 2, 0)
    info = {"tag": tag, "model": model, "L": L, "sector": "k=0", **st.as_dict()}
    return info, {f"{tag}_rstat_hist.csv": _csv(["lo", "hi", "density"], zip(st.edges[:-1], st.edges[1:], st.density)),
                  f"{tag}_entropy.csv": _csv(["E", "S"], zip(e.values, S))}


def _rep_fig7(args):
    rows = []
    for L in (3, 6, 9, 12):
        ts = dy.evolve(dy.QuenchSpec("H1", f"210x{L // 3}", dy.time_grid(1.5, 0.005)))
        pk = dy.first_peak(ts.times, ts["fidelity"])
        rows.append((L, pk[0], pk[1], cl.extended_peak_height(L), float(np.exp(-cl.extended_decay_rate() * L))))
    return {"tag": "fig7"}, {"fig7.csv": _csv(["L", "t_peak", "F_full", "F_extended", "law"], rows)}


def _rep_fig8(args):
    L = 9
    basis = fb.enumerate_basis(L, L)
    sec = sy.build_momentum_sector(basis, 0)
    e = spc.diagonalize(ham.build_operator("H1", sec))
    E, w = spc.overlap_scatter(e, sy.sector_state(sec, fb.parse_pattern("210x3")))
    return {"tag": "fig8", "L": L, "note": "k=0 sector at L=9 instead of 12"}, {"fig8.csv": _csv(["E", "overlap"], zip(E, w))}


def _rep_fig1(args):
    out = {}
    for m in ("H1", "H2", "H3"):
        out[f"fig1_{m}.dot"] = gr.to_dot(ham.build_operator(m, fb.enumerate_basis(3, 3)))
    return {"tag": "fig1", "L": 3}, out


REPRODUCE: dict[str, Callable] = {
    "fig1": _rep_fig1,
    "fig2a": lambda a: _rep_fig2("H1", "fig2a"),
    "fig2b": lambda a: _rep_fig2("H2", "fig2b"),
    "fig2c": lambda a: _rep_fig2("H3", "fig2c"),
    "fig3a": _rep_fig3a,
    "fig3b": _rep_fig3b,
    "fig3c": _rep_fig3c,
    "fig4": _rep_fig4,
    "fig5": _rep_fig5,
    "fig7": _rep_fig7,
    "fig8": _rep_fig8,
    "fig9": _rep_fig5,
    "tabS1": lambda a: _rep_zero_table("H1", "tabS1"),
    "tabS2": lambda a: _rep_zero_table("H2", "tabS2"),
    "tabS3": _rep_tabS3,
}


def cmd_reproduce(args) -> tuple[dict, Outputs]:
    if args.tag not in REPRODUCE:
        raise ConfigError(f"unknown tag {args.tag!r}; known: {sorted(REPRODUCE)}")
    return REPRODUCE[args.tag](args)


# ---------------------------------------------------------------- run --config

RUN_KEYS = {
    "experiment", "model", "J", "L", "Np", "k", "init", "tmax", "dt", "cut", "observables",
    "cluster", "method", "window", "zero_tol", "out_dir", "obc",
}
EXPERIMENTS = ("evolve", "levels", "rstat", "zeromodes", "census", "components")


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not text.strip():
        raise ConfigError("config is empty")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return validate_config(cfg)


def validate_config(cfg) -> dict:
    if not isinstance(cfg, dict) or not cfg:
        raise ConfigError("config must be a non-empty JSON object")
    unknown = sorted(set(cfg) - RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    if cfg.get("experiment") not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
    if "model" in cfg:
        ham.ModelKind(cfg["model"], cfg.get("J", 1.0))
    for key in ("L", "Np", "k"):
        if key in cfg and (not isinstance(cfg[key], int) or cfg[key] < 0):
            raise ConfigError(f"{key} must be a non-negative integer")
    for key in ("tmax", "dt", "window", "zero_tol", "J"):
        if key in cfg and not isinstance(cfg[key], (int, float)):
            raise ConfigError(f"{key} must be a number")
    if "init" in cfg:
        fb.parse_pattern(cfg["init"])
    return cfg


def cmd_run(args) -> tuple[dict, Outputs]:
    cfg = load_config(args.config)
    ns = argparse.Namespace(
        model=cfg.get("model", "H1"), J=float(cfg.get("J", 1.0)), L=cfg.get("L"), Np=cfg.get("Np"),
        k=cfg.get("k"), init=cfg.get("init"), tmax=float(cfg.get("tmax", 10.0)), dt=float(cfg.get("dt", 0.01)),
        cut=cfg.get("cut"), observables=",".join(cfg.get("observables", ["fidelity"])),
        cluster=cfg.get("cluster", "none"), method=cfg.get("method", "auto"),
        window=float(cfg.get("window", 1 / 3)), keep_zero=False, obc=bool(cfg.get("obc", False)),
        sector="all", Lmin=2, Lmax=cfg.get("L"),
    )
    if "out_dir" in cfg:
        args.out_dir = str(cfg["out_dir"])
    saved = spc.ZERO_REL_TOL
    if "zero_tol" in cfg:
        spc.ZERO_REL_TOL = float(cfg["zero_tol"])
    try:
        return _run_experiment(cfg["experiment"], ns)
    finally:
        spc.ZERO_REL_TOL = saved


def _run_experiment(exp: str, ns) -> tuple[dict, Outputs]:
    if exp == "evolve":
        if ns.init is None:
            raise ConfigError("evolve needs init")
        return cmd_evolve(ns)
    if exp in ("levels", "rstat"):
        ns.action = exp
        return cmd_spec(ns)
    if exp == "zeromodes":
        if ns.L is None:
            raise ConfigError("zeromodes needs L")
        ns.Lmin = ns.L
        return cmd_zeromodes(ns)
    if exp == "census":
        ns.action = "census"
        return cmd_graph(ns)
    ns.action = "components"
    return cmd_graph(ns)


# ---------------------------------------------------------------- driver


def _model_flag(p, default="H1"):
    p.add_argument("--model", default=default, choices=sorted(ham.MODEL_CODES))
    p.add_argument("--J", type=float, default=1.0)


def _size_flags(p, need_L=True):
    p.add_argument("--L", type=int, required=need_L)
    p.add_argument("--Np", type=int, default=None, help="particle number (default L)")
    p.add_argument("--obc", action="store_true", help="open boundary conditions")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scarlett", description="Correlated-hopping boson ED and quench dynamics")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    ap.add_argument("--capacity", type=float, default=None, help="materialized state-count limit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="Fock basis tools")
    p.add_argument("action", choices=["dump"])
    _size_flags(p)
    p.set_defaults(func=cmd_basis_dump)

    p = sub.add_parser("sector", help="symmetry sector dimensions")
    p.add_argument("action", choices=["info"])
    _size_flags(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--I", type=int, choices=[0, 1], default=None)
    p.add_argument("--component", choices=["none", "h3"], default="none",
                   help="build the inversion sector on the largest H3 component")
    p.set_defaults(func=cmd_sector_info)

    p = sub.add_parser("ham", help="Hamiltonian matrices")
    p.add_argument("action", choices=["dump"])
    _model_flag(p)
    _size_flags(p)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_ham_dump)

    p = sub.add_parser("graph", help="graph census, components, DOT export")
    p.add_argument("action", choices=["census", "components", "export"])
    _model_flag(p)
    _size_flags(p)
    p.add_argument("--sector", choices=["all", "k0"], default="all")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("spec", help="spectra, level statistics, entanglement, zero modes")
    p.add_argument("action", choices=["levels", "rstat", "entropy-scatter", "zeromodes"])
    _model_flag(p)
    _size_flags(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--window", type=float, default=1 / 3)
    p.add_argument("--keep-zero", action="store_true", help="keep E=0 levels in rstat")
    p.add_argument("--cut", default=None, help="L_A or L_A,offset")
    p.set_defaults(func=cmd_spec)

    p = sub.add_parser("evolve", help="global quench")
    _model_flag(p)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--Np", type=int, default=None)
    p.add_argument("--obc", action="store_true")
    p.add_argument("--init", required=True, help="pattern such as 210x4")
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--cut", default=None, help="L_A or L_A,offset")
    p.add_argument("--observables", default="fidelity")
    p.add_argument("--cluster", default="none")
    p.add_argument("--method", choices=["auto", "dense", "krylov"], default="auto")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("cluster", help="closed-form cluster fidelities")
    p.add_argument("action", choices=["fidelity"])
    p.add_argument("--family", choices=["minimal", "extended", "h3", "generalized"], default="minimal")
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--symmetrized", action="store_true")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("zeromodes", help="zero-mode table per momentum sector")
    _model_flag(p)
    p.add_argument("--Lmin", type=int, default=2)
    p.add_argument("--Lmax", type=int, required=True)
    p.set_defaults(func=cmd_zeromodes)

    p = sub.add_parser("reproduce", help="data behind a figure or table")
    p.add_argument("tag")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("run", help="run a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)
    return ap


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _manifest(argv, info, outputs, wall) -> dict:
    import scipy

    cfg = {k: v for k, v in sorted(vars(argv).items()) if k not in ("func", "out_dir", "threads")}
    if getattr(argv, "config", None):
        with open(argv.config) as fh:
            cfg["config_body"] = json.loads(fh.read())
    return {
        "command": argv.command,
        "config": cfg,
        "config_hash": _sha(json.dumps(cfg, sort_keys=True, default=str)),
        "versions": {
            "scarlett": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version(), "kernels": kernels.BACKEND,
        },
        "threads": argv.threads,
        "wall_time_s": round(wall, 3),
        "outputs": {name: _sha(body) for name, body in sorted(outputs.items())},
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    saved = fb.MATERIALIZED_LIMIT
    try:
        kernels.set_threads(args.threads)
        if args.capacity is not None:
            fb.set_capacity(materialized=int(args.capacity))
        np.random.seed(args.seed)
        t0 = time.perf_counter()
        info, outputs = args.func(args)
        wall = time.perf_counter() - t0
        os.makedirs(args.out_dir, exist_ok=True)
        for name, body in outputs.items():
            with open(os.path.join(args.out_dir, name), "w", newline="") as fh:
                fh.write(body)
        with open(os.path.join(args.out_dir, "manifest.json"), "w") as fh:
            fh.write(_json(_manifest(args, info, outputs, wall)))
        sys.stdout.write(_json(info))
        return 0
    except ScarlettError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    finally:
        fb.set_capacity(materialized=saved)


if __name__ == "__main__":
    sys.exit(main())
