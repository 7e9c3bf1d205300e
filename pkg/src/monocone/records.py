"""Batch evaluation of sampled states into measure records, and their CSV form."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .bipartite import DISCORD_NEG_TOL, concurrence, eof_from_concurrence, minimize_conditional_entropy
from .cone import theorem1_margin, theorem2_margin
from .linalg import PARTIES, reduce_pure, von_neumann_entropy
from .multipartite import ggm_arrays
from .states import RNG_ALGORITHM, RngStream, sample_amplitudes

SCHEMA_VERSION = 1
CHUNK_SIZE = 1024
FAMILY_CODES = {"haar": 0, "gen_ghz": 1, "ghz_class": 2, "w_class": 3}
PAIRS = ("AB", "AC", "BC")


@dataclass
class BatchEvaluation:
    """Per-state measures for a batch, one array row per state."""

    psi: np.ndarray
    entropy: np.ndarray  # (n, 3) single-qubit entropies S_A, S_B, S_C
    tangle: np.ndarray  # (n, 3) 4 det rho_X
    concurrence: dict  # pair -> (n,)
    discord: dict  # (nodal, partner) -> (n,), measurement on partner
    delta_c: np.ndarray  # (n, 3)
    delta_d: np.ndarray  # (n, 3)
    delta_d_kw: np.ndarray  # (n, 3)
    ggm: np.ndarray
    max_schmidt: np.ndarray  # party index
    tie: np.ndarray
    marginal_top: np.ndarray  # (n, 3)
    optimizer_failure: np.ndarray  # bool per state

    @property
    def delta_d_max_schmidt(self) -> np.ndarray:
        return np.take_along_axis(self.delta_d, self.max_schmidt[:, None], axis=1)[:, 0]

    @property
    def theorem1_margin(self) -> np.ndarray:
        return theorem1_margin(np.clip(self.delta_c[:, 0], 0.0, 1.0), self.ggm)

    @property
    def theorem2_margin(self) -> np.ndarray:
        return theorem2_margin(self.delta_d_max_schmidt, self.ggm)


def evaluate_batch(psi) -> BatchEvaluation:
    """All monogamy and GGM quantities for a stack of pure states ``(n, 8)``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1, 8)
    n = psi.shape[0]
    one = {p: reduce_pure(psi, p) for p in PARTIES}
    two = {p: reduce_pure(psi, p) for p in PAIRS}
    s1 = {p: von_neumann_entropy(r) for p, r in one.items()}
    s2 = {p: von_neumann_entropy(r) for p, r in two.items()}
    tangle = np.stack(
        [4.0 * (r[:, 0, 0].real * r[:, 1, 1].real - np.abs(r[:, 0, 1]) ** 2) for r in one.values()],
        axis=1,
    )

    stacked = np.concatenate([two[p] for p in PAIRS])
    conc_all = concurrence(stacked).reshape(3, n)
    conc = dict(zip(PAIRS, conc_all))

    # measurement on the second party of each pair, then on the first
    second = minimize_conditional_entropy(stacked, "second")
    first = minimize_conditional_entropy(stacked, "first")
    cond = {}
    for k, (x, y) in enumerate(PAIRS):
        sl = slice(k * n, (k + 1) * n)
        cond[(x, y)] = second.value[sl]
        cond[(y, x)] = first.value[sl]
    failure = ~(second.converged.reshape(3, n).all(axis=0) & first.converged.reshape(3, n).all(axis=0))

    discord = {}
    for (nodal, partner), c in cond.items():
        pair = "".join(sorted(nodal + partner))
        d = s1[partner] - s2[pair] + c
        failure |= d < -DISCORD_NEG_TOL
        discord[(nodal, partner)] = np.where((d < 0) & (d >= -DISCORD_NEG_TOL), 0.0, d)

    def pair_key(x, y):
        return "".join(sorted(x + y))

    dc, dd, dkw = [], [], []
    for i, x in enumerate(PARTIES):
        y, z = [p for p in PARTIES if p != x]
        cy, cz = conc[pair_key(x, y)], conc[pair_key(x, z)]
        dc.append(tangle[:, i] - cy**2 - cz**2)
        dd.append(s1[x] - discord[(x, y)] - discord[(x, z)])
        dkw.append(s1[x] - eof_from_concurrence(cy) - eof_from_concurrence(cz))

    g, idx, lam, tie = ggm_arrays(psi)
    return BatchEvaluation(
        psi=psi,
        entropy=np.stack([s1[p] for p in PARTIES], axis=1),
        tangle=tangle,
        concurrence=conc,
        discord=discord,
        delta_c=np.stack(dc, axis=1),
        delta_d=np.stack(dd, axis=1),
        delta_d_kw=np.stack(dkw, axis=1),
        ggm=g,
        max_schmidt=idx,
        tie=tie,
        marginal_top=lam,
        optimizer_failure=failure,
    )


@dataclass
class MeasureRecord:
    state_id: int
    family: str
    seed: int
    stream: int
    delta_c: float
    delta_d_node_a: float
    delta_d_node_b: float
    delta_d_node_c: float
    delta_d_max_schmidt: float
    ggm: float
    max_schmidt_party: str
    theorem1_margin: float
    theorem2_margin: float


COLUMNS = [f.name for f in fields(MeasureRecord)]


@dataclass
class Campaign:
    """Sampled states with their evaluation and provenance, sorted by state id."""

    state_id: np.ndarray
    family: np.ndarray
    seed: int
    stream: np.ndarray
    evaluation: BatchEvaluation

    def records(self) -> list[MeasureRecord]:
        ev = self.evaluation
        t1, t2, dms = ev.theorem1_margin, ev.theorem2_margin, ev.delta_d_max_schmidt
        return [
            MeasureRecord(
                int(self.state_id[i]),
                str(self.family[i]),
                int(self.seed),
                int(self.stream[i]),
                float(ev.delta_c[i, 0]),
                float(ev.delta_d[i, 0]),
                float(ev.delta_d[i, 1]),
                float(ev.delta_d[i, 2]),
                float(dms[i]),
                float(ev.ggm[i]),
                PARTIES[int(ev.max_schmidt[i])],
                float(t1[i]),
                float(t2[i]),
            )
            for i in range(len(self.state_id))
        ]


def _split_counts(n: int, k: int) -> list[int]:
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def plan_chunks(families: list[str], n: int, seed: int, chunk_size: int = CHUNK_SIZE):
    """Deterministic work units ``(first_state_id, family, seed, stream, count)``.

    ``n`` is split evenly over ``families``; each family is cut into chunks
    of ``chunk_size`` states drawn from stream ``family_code << 32 | chunk``.
    The plan does not depend on the worker count.
    """
    plan = []
    sid = 0
    for fam, count in zip(families, _split_counts(n, len(families))):
        code = FAMILY_CODES[fam]
        for c, lo in enumerate(range(0, count, chunk_size)):
            m = min(chunk_size, count - lo)
            plan.append((sid, fam, seed, (code << 32) | c, m))
            sid += m
    return plan


def _run_chunk(task):
    sid, fam, seed, stream, m = task
    psi = sample_amplitudes(fam, RngStream(seed, stream), m)
    return task, psi, evaluate_batch(psi)


def _concat_evaluations(parts: list[BatchEvaluation]) -> BatchEvaluation:
    kw = {}
    for f in fields(BatchEvaluation):
        vals = [getattr(p, f.name) for p in parts]
        if isinstance(vals[0], dict):
            kw[f.name] = {k: np.concatenate([v[k] for v in vals]) for k in vals[0]}
        else:
            kw[f.name] = np.concatenate(vals)
    return BatchEvaluation(**kw)


def run_campaign(families: list[str], n: int, seed: int, workers: int = 1) -> Campaign:
    """Sample ``n`` states over ``families`` and evaluate them."""
    for fam in families:
        if fam not in FAMILY_CODES:
            raise ValueError(f"unknown family {fam!r}")
    plan = plan_chunks(families, n, seed)
    if workers > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, plan))
    else:
        results = [_run_chunk(t) for t in plan]
    results.sort(key=lambda r: r[0][0])
    ids, fams, streams = [], [], []
    for (sid, fam, _, stream, m), _, _ in results:
        ids.append(np.arange(sid, sid + m))
        fams.append(np.full(m, fam, dtype=object))
        streams.append(np.full(m, stream, dtype=np.uint64))
    ev = _concat_evaluations([r[2] for r in results])
    return Campaign(np.concatenate(ids), np.concatenate(fams), seed, np.concatenate(streams), ev)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_records_csv(out, records: list[MeasureRecord], meta: dict) -> None:
    """CSV with ``#`` comment lines recording provenance, then a header row."""
    out.write(f"# monocone measure records, schema v{SCHEMA_VERSION}\n")
    out.write(f"# tool_version={__version__}\n")
    out.write(f"# rng={RNG_ALGORITHM}\n")
    for k, v in meta.items():
        out.write(f"# {k}={v}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        row = []
        for name in COLUMNS:
            v = getattr(r, name)
            row.append(format_float(v) if isinstance(v, float) else v)
        w.writerow(row)


def read_records_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse a records CSV back into ``(meta, rows)``."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            if "=" in line:
                k, v = line[1:].strip().split("=", 1)
                meta[k.strip()] = v.strip()
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return meta, rows
