"""``monocone`` command line: sample, scan-gg, eval, verify.

Exit codes: 0 success, 1 invariant violation, 2 optimizer diagnostics,
3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__
from .bipartite import DiscordOptimizationError, eof_from_concurrence
from .cone import TOL_DISCORD, TOL_TANGLE, discord_bound, theorem2_margin
from .linalg import PARTIES, hermitian_eigs, reduce_pure
from .multipartite import dissension, koashi_winter_residual
from .records import (
    FAMILY_CODES,
    evaluate_batch,
    format_float,
    run_campaign,
    write_records_csv,
)
from .states import (
    RNG_ALGORITHM,
    PureState3Q,
    RngStream,
    generalized_ghz,
    ghz_class_state,
    haar_amplitudes,
    w_class_state,
)

EXIT_OK, EXIT_VIOLATION, EXIT_OPTIMIZER, EXIT_USAGE = 0, 1, 2, 3
TOL_CKW = 1e-10
TOL_SPREAD = 1e-9
TOL_IDENTITY = 1e-4
DEFAULT_VERIFY_FAMILIES = "haar,ghz_class,w_class,gen_ghz"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _families(text: str) -> list[str]:
    fams = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fams if f not in FAMILY_CODES]
    if not fams or bad:
        raise UsageError(f"--family must list families from {sorted(FAMILY_CODES)}, got {text!r}")
    return fams


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        try:
            fh = open(path, "w", newline="")
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc}") from None
        with fh:
            yield fh


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _node_index(node: str, ev) -> np.ndarray:
    if node == "max-schmidt":
        return ev.max_schmidt
    return np.full(len(ev.ggm), PARTIES.index(node))


def cmd_sample(args) -> int:
    fams = _families(args.family)
    t0 = time.perf_counter()
    camp = run_campaign(fams, args.n, args.seed, args.workers)
    ev = camp.evaluation
    meta = {
        "command": "sample",
        "seed": args.seed,
        "families": ",".join(fams),
        "n": args.n,
        "measure": args.measure,
        "node": args.node,
        "tol_tangle": args.tol_tangle,
        "tol_discord": args.tol_discord,
    }
    with _output(args.out) as fh:
        write_records_csv(fh, camp.records(), meta)

    t1_bad = int(np.sum(ev.theorem1_margin < -args.tol_tangle) + np.sum(ev.delta_c[:, 0] < -TOL_CKW))
    t2_bad = int(np.sum(ev.theorem2_margin < -args.tol_discord))
    failures = int(np.sum(ev.optimizer_failure))
    _log(f"sampled {args.n} states ({','.join(fams)}) in {time.perf_counter() - t0:.1f} s")
    _log(f"entanglement-cone violations: {t1_bad}")
    _log(f"discord-cone violations (max-Schmidt node): {t2_bad}")
    if args.node != "max-schmidt":
        idx = _node_index(args.node, ev)
        dd = np.take_along_axis(ev.delta_d, idx[:, None], axis=1)[:, 0]
        out = int(np.sum(theorem2_margin(dd, ev.ggm) < -args.tol_discord))
        _log(f"discord-cone exceedances with node {args.node} (informational): {out}")
    _log(f"optimizer failures: {failures}")

    if args.svg:
        if args.measure == "tangle":
            score = ev.delta_c[:, 0]
        else:
            idx = _node_index(args.node, ev)
            score = np.take_along_axis(ev.delta_d, idx[:, None], axis=1)[:, 0]
        from .plotting import save_cone_plot

        try:
            save_cone_plot(args.svg, score, ev.ggm, args.measure, camp.family)
        except OSError as exc:
            raise UsageError(f"cannot write {args.svg}: {exc}") from None

    if failures:
        return EXIT_OPTIMIZER
    return EXIT_VIOLATION if (t1_bad or t2_bad) else EXIT_OK


SCAN_COLUMNS = [
    "alpha_sq",
    "alpha",
    "delta_c",
    "delta_d",
    "ggm",
    "delta_c_analytic",
    "delta_d_analytic",
    "ggm_analytic",
    "residual_delta_c",
    "residual_delta_d",
    "residual_ggm",
]
SCAN_TOL = 1e-6


def scan_generalized_ghz(alpha_grid: int) -> dict:
    """Computed and closed-form measures along ``alpha^2`` uniform in [1/2, 1]."""
    a2 = np.linspace(0.5, 1.0, alpha_grid)
    psi = np.stack([generalized_ghz(np.sqrt(x)).amplitudes for x in a2])
    ev = evaluate_batch(psi)
    h = np.zeros_like(a2)
    inner = (a2 > 0) & (a2 < 1)
    h[inner] = -a2[inner] * np.log2(a2[inner]) - (1 - a2[inner]) * np.log2(1 - a2[inner])
    cols = {
        "alpha_sq": a2,
        "alpha": np.sqrt(a2),
        "delta_c": ev.delta_c[:, 0],
        "delta_d": ev.delta_d_max_schmidt,
        "ggm": ev.ggm,
        "delta_c_analytic": 4.0 * a2 * (1.0 - a2),
        "delta_d_analytic": h,
        "ggm_analytic": 1.0 - a2,
    }
    for k in ("delta_c", "delta_d", "ggm"):
        cols[f"residual_{k}"] = np.abs(cols[k] - cols[f"{k}_analytic"])
    return cols


def cmd_scan_gg(args) -> int:
    cols = scan_generalized_ghz(args.alpha_grid)
    with _output(args.out) as fh:
        fh.write(f"# monocone generalized-GHZ scan, tool_version={__version__}\n")
        fh.write(f"# alpha_grid={args.alpha_grid}\n")
        fh.write(",".join(SCAN_COLUMNS) + "\n")
        for i in range(args.alpha_grid):
            fh.write(",".join(format_float(cols[c][i]) for c in SCAN_COLUMNS) + "\n")
    worst = max(float(cols[f"residual_{k}"].max()) for k in ("delta_c", "delta_d", "ggm"))
    _log(f"max residual over {args.alpha_grid} points: {worst:.3e}")
    if args.svg:
        from .plotting import save_scan_plot

        save_scan_plot(args.svg, cols["alpha_sq"], cols["delta_c"], cols["delta_d"], cols["ggm"])
    return EXIT_OK if worst <= SCAN_TOL else EXIT_VIOLATION


def parse_amplitudes(text: str) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        vals = [complex(p.replace("i", "j")) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse amplitudes {text!r}") from None
    if len(vals) != 8:
        raise UsageError(f"need 8 amplitudes, got {len(vals)}")
    return np.array(vals, dtype=complex)


def _floats(text: str | None, count: int, what: str) -> list[float]:
    if text is None:
        raise UsageError(f"--params is required for {what}")
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"cannot parse --params {text!r}") from None
    if len(vals) != count:
        raise UsageError(f"{what} needs {count} parameters, got {len(vals)}")
    return vals


def _eval_state(args) -> PureState3Q:
    try:
        if args.amplitudes is not None:
            return PureState3Q.from_amplitudes(parse_amplitudes(args.amplitudes))
        if args.family == "gen_ghz":
            if args.alpha is None:
                raise UsageError("--alpha is required for gen_ghz")
            return generalized_ghz(args.alpha)
        if args.family == "ghz_class":
            p = _floats(args.params, 6, "ghz_class (l0..l4, phi)")
            return ghz_class_state(p[:5], p[5])
        if args.family == "w_class":
            return w_class_state(_floats(args.params, 4, "w_class (l0..l3)"))
        if args.family == "haar":
            return PureState3Q(haar_amplitudes(RngStream(args.seed, args.stream), 1)[0], "haar")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError("give --amplitudes or --family")


def _verdict(inside: bool, margin: float, node: str) -> dict:
    return {"inside": bool(inside), "margin": float(margin), "node": node}


def state_report(state: PureState3Q, tol_tangle: float = TOL_TANGLE, tol_discord: float = TOL_DISCORD) -> dict:
    """Every measure for one state, as JSON-ready values."""
    psi = state.amplitudes
    ev = evaluate_batch(psi[None, :])
    pairs = ("AB", "AC", "BC")
    ms = PARTIES[int(ev.max_schmidt[0])]
    t1 = float(ev.theorem1_margin[0])
    t2 = float(ev.theorem2_margin[0])
    per_node_t2 = {
        p: float(theorem2_margin(ev.delta_d[0, i], ev.ggm[0])) for i, p in enumerate(PARTIES)
    }
    return {
        "tool_version": __version__,
        "family": state.family,
        "amplitudes": [[float(a.real), float(a.imag)] for a in psi],
        "marginal_eigenvalues": {p: hermitian_eigs(reduce_pure(psi, p)).tolist() for p in PARTIES},
        "pair_eigenvalues": {p: hermitian_eigs(reduce_pure(psi, p)).tolist() for p in pairs},
        "entropy": {p: float(ev.entropy[0, i]) for i, p in enumerate(PARTIES)},
        "tangle_bipartition": {p: float(ev.tangle[0, i]) for i, p in enumerate(PARTIES)},
        "concurrence": {p: float(ev.concurrence[p][0]) for p in pairs},
        "eof": {p: float(eof_from_concurrence(ev.concurrence[p][0])) for p in pairs},
        "discord": {f"{x}{y}|measure {y}": float(v[0]) for (x, y), v in sorted(ev.discord.items())},
        "delta_c": {p: float(ev.delta_c[0, i]) for i, p in enumerate(PARTIES)},
        "delta_d": {p: float(ev.delta_d[0, i]) for i, p in enumerate(PARTIES)},
        "delta_d_koashi_winter": {p: float(ev.delta_d_kw[0, i]) for i, p in enumerate(PARTIES)},
        "ggm": float(ev.ggm[0]),
        "max_schmidt_party": ms,
        "max_schmidt_tie": bool(ev.tie[0]),
        "dissension": float(dissension(psi)),
        "koashi_winter_residual": float(koashi_winter_residual(psi)),
        "theorem1": _verdict(t1 >= -tol_tangle and ev.delta_c[0, 0] >= -TOL_CKW, t1, "A"),
        "theorem2": _verdict(t2 >= -tol_discord, t2, ms),
        "discord_cone_margin_by_node": per_node_t2,
        "discord_bound": float(discord_bound(ev.ggm[0])),
        "optimizer_failure": bool(ev.optimizer_failure[0]),
    }


def cmd_eval(args) -> int:
    state = _eval_state(args)
    report = state_report(state, args.tol_tangle, args.tol_discord)
    with _output(args.out) as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    if report["optimizer_failure"]:
        return EXIT_OPTIMIZER
    if not (report["theorem1"]["inside"] and report["theorem2"]["inside"]):
        return EXIT_VIOLATION
    return EXIT_OK


def run_checks(camp, tol_tangle: float, tol_discord: float) -> list[dict]:
    """Invariant suite over a sampled campaign; one entry per check."""
    ev = camp.evaluation
    dis = np.atleast_1d(dissension(ev.psi))
    kw = np.atleast_1d(koashi_winter_residual(ev.psi))
    spread = np.ptp(ev.delta_c, axis=1)
    measures = [
        ("theorem1_cone", -ev.theorem1_margin, tol_tangle),
        ("theorem2_cone_max_schmidt", -ev.theorem2_margin, tol_discord),
        ("ckw_positivity", -ev.delta_c.min(axis=1), TOL_CKW),
        ("delta_c_at_most_one", ev.delta_c.max(axis=1) - 1.0, TOL_CKW),
        ("delta_c_node_spread", spread, TOL_SPREAD),
        ("koashi_winter_residual", kw, TOL_IDENTITY),
        ("discord_cross_path", np.abs(ev.delta_d - ev.delta_d_kw).max(axis=1), TOL_IDENTITY),
        ("dissension_identity", np.abs(dis + ev.delta_d[:, 0]), TOL_IDENTITY),
        ("optimizer_failures", ev.optimizer_failure.astype(float), 0.0),
    ]
    out = []
    for name, vals, tol in measures:
        worst = int(np.argmax(vals))
        bad = int(np.sum(vals > tol))
        entry = {"check": name, "max": float(vals[worst]), "tolerance": tol, "violations": bad}
        if bad:
            entry["offending_state"] = {
                "state_id": int(camp.state_id[worst]),
                "family": str(camp.family[worst]),
                "seed": int(camp.seed),
                "stream": int(camp.stream[worst]),
                "amplitudes": " ".join(repr(complex(a)) for a in ev.psi[worst]),
                "theorem1_margin": float(ev.theorem1_margin[worst]),
                "theorem2_margin": float(ev.theorem2_margin[worst]),
            }
        out.append(entry)
    for i, p in enumerate(PARTIES):
        m = theorem2_margin(ev.delta_d[:, i], ev.ggm)
        out.append(
            {
                "check": f"discord_cone_node_{p}",
                "max": float(np.max(-m)),
                "tolerance": tol_discord,
                "violations": int(np.sum(-m > tol_discord)),
                "informational": True,
            }
        )
    return out


def cmd_verify(args) -> int:
    fams = _families(args.family)
    t0 = time.perf_counter()
    camp = run_campaign(fams, args.n, args.seed, args.workers)
    checks = run_checks(camp, args.tol_tangle, args.tol_discord)
    for c in checks:
        if c.get("informational"):
            status = "info"
        else:
            status = "PASS" if c["violations"] == 0 else "FAIL"
        print(f"{c['check']:<28} max={c['max']:+.3e} tol={c['tolerance']:.0e} violations={c['violations']:<6d} {status}")
        if "offending_state" in c:
            _log(f"  offending state: {json.dumps(c['offending_state'])}")
    _log(f"verified {args.n} states ({','.join(fams)}) in {time.perf_counter() - t0:.1f} s")
    summary = {
        "tool_version": __version__,
        "seed": args.seed,
        "rng": RNG_ALGORITHM,
        "families": fams,
        "n": args.n,
        "checks": checks,
    }
    if args.out:
        with _output(args.out) as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    hard = [c for c in checks if not c.get("informational")]
    if any(c["check"] == "optimizer_failures" and c["violations"] for c in hard):
        return EXIT_OPTIMIZER
    return EXIT_VIOLATION if any(c["violations"] for c in hard) else EXIT_OK


def _add_tols(p):
    p.add_argument("--tol-tangle", type=float, default=TOL_TANGLE)
    p.add_argument("--tol-discord", type=float, default=TOL_DISCORD)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monocone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"monocone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="sample states and write measure records")
    p.add_argument("--family", default="haar", help="comma-separated: haar,gen_ghz,ghz_class,w_class")
    p.add_argument("--n", type=_positive, default=25000, help="total number of states")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--measure", choices=("tangle", "discord"), default="tangle")
    p.add_argument("--node", choices=("A", "B", "C", "max-schmidt"), default="max-schmidt")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--svg", help="figure path (format from suffix)")
    p.add_argument("--workers", type=_positive, default=1)
    _add_tols(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scan-gg", help="scan the generalized GHZ family")
    p.add_argument("--alpha-grid", type=int, default=101)
    p.add_argument("--out", default="-")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_scan_gg)

    p = sub.add_parser("eval", help="full JSON report for one state")
    p.add_argument("--amplitudes", help="8 complex amplitudes, e.g. '0.7071 0 0 0 0 0 0 0.7071'")
    p.add_argument("--family", choices=("gen_ghz", "ghz_class", "w_class", "haar"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--params", help="ghz_class: l0..l4,phi; w_class: l0..l3")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--stream", type=_seed, default=0)
    p.add_argument("--out", default="-")
    _add_tols(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run the invariant suite on sampled states")
    p.add_argument("--family", default=DEFAULT_VERIFY_FAMILIES)
    p.add_argument("--n", type=_positive, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", help="JSON summary path")
    _add_tols(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "scan-gg" and args.alpha_grid < 2:
        parser.exit(EXIT_USAGE, "monocone: error: --alpha-grid must be at least 2\n")
    try:
        return args.func(args)
    except UsageError as exc:
        _log(f"monocone: error: {exc}")
        return EXIT_USAGE
    except DiscordOptimizationError as exc:
        _log(f"monocone: optimizer failure: {exc}")
        return EXIT_OPTIMIZER


if __name__ == "__main__":
    sys.exit(main())
