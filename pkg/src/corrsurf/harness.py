"""Monte-Carlo experiment driver: sampling, decoding, and threshold fits.

Each experiment cell is (family, k, d, rounds, p, p_cor) and produces one
RunRecord with a Wilson confidence interval on the logical failure rate.
Thresholds are estimated from crossings of log-failure-rate curves for
consecutive distances, with a parametric bootstrap for the interval.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

from . import lattice, matching, noise
from .errors import ConfigError, InfeasibleDecodeError
from .matching import BatchDecoder, build_matching_graph
from .noise import NoiseModel

CSV_HEADER = (
    "family,k,d,rounds,p,p_cor,shots,failures,logical_rate,ci_low,ci_high,seed"
)

_CHUNK = 10_000


@dataclass(frozen=True)
class RunRecord:
    family: str
    k: int | None
    d: int
    rounds: int
    p: float
    p_cor: float
    shots: int
    failures: int
    logical_rate: float
    ci_low: float
    ci_high: float
    seed: int


def wilson_ci(
    failures: int, shots: int, z: float = 1.96
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if shots <= 0:
        raise ConfigError("shots must be positive")
    if not 0 <= failures <= shots:
        raise ConfigError("failures out of range")
    phat = failures / shots
    denom = 1.0 + z * z / shots
    center = (phat + z * z / (2 * shots)) / denom
    half = (
        z
        * math.sqrt(phat * (1 - phat) / shots + z * z / (4 * shots * shots))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))


def _cell_rng(seed: int, cell: int, shard: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(cell, shard))
    )


def _decoder_for_model(model: NoiseModel) -> BatchDecoder:
    if model.descriptor.family in ("type1", "type2"):
        subs = noise.decompose_by_components(model)
        return BatchDecoder([build_matching_graph(s) for s in subs])
    return BatchDecoder([build_matching_graph(model)])


def _mechanism_tables(
    model: NoiseModel,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-mechanism detector columns (-1 padded, <=2 each) and flips."""
    m = len(model.mechanisms)
    det = np.full((m, 2), -1, dtype=np.int64)
    obs = np.zeros(m, dtype=np.uint8)
    for i, mech in enumerate(model.mechanisms):
        dets = sorted(mech.detectors)
        if len(dets) > 2:
            raise ConfigError("mechanism with more than two detectors")
        for j, dd in enumerate(dets):
            det[i, j] = dd
        obs[i] = mech.flips_observable
    return det[:, 0], det[:, 1], obs


def _scatter_syndromes(
    firing: np.ndarray,
    det1: np.ndarray,
    det2: np.ndarray,
    obs: np.ndarray,
    num_detectors: int,
) -> tuple[np.ndarray, np.ndarray]:
    """XOR each firing mechanism's detector columns into per-shot bits."""
    shots = firing.shape[0]
    dets = np.zeros((shots, num_detectors), dtype=np.uint8)
    actual = np.zeros(shots, dtype=np.uint8)
    rows, cols = np.nonzero(firing)
    for table in (det1, det2):
        hit = table[cols] >= 0
        np.bitwise_xor.at(dets, (rows[hit], table[cols[hit]]), 1)
    flips = obs[cols] != 0
    np.bitwise_xor.at(actual, rows[flips], 1)
    return dets, actual


def run_code_capacity(
    family: str,
    d: int,
    p: float,
    shots: int,
    seed: int,
    k: int | None = None,
    cell: int = 0,
) -> RunRecord:
    """Sample, decode, and score one code-capacity experiment cell."""
    code = lattice.build_planar_code(d)
    if family == "iid":
        model = noise.build_iid_z(code, p)
    elif family == "type1":
        if k is None:
            raise ConfigError("type1 requires a correlation length k")
        model = noise.build_type1(code, k, p)
    elif family == "type2":
        model = noise.build_type2(code, p)
    else:
        raise ConfigError(f"unknown noise family {family!r}")

    decoder = _decoder_for_model(model)
    det1, det2, obs_table = _mechanism_tables(model)
    probs = np.array([mech.probability for mech in model.mechanisms])

    failures = 0
    done = 0
    shard = 0
    while done < shots:
        batch = min(_CHUNK, shots - done)
        rng = _cell_rng(seed, cell, shard)
        firing = rng.random((batch, probs.size)) < probs
        dets, actual = _scatter_syndromes(
            firing, det1, det2, obs_table, model.num_detectors
        )
        predicted = decoder.decode_batch(dets)
        failures += int(np.sum(predicted ^ actual))
        done += batch
        shard += 1

    rate = failures / shots
    lo, hi = wilson_ci(failures, shots)
    return RunRecord(
        family=family,
        k=k,
        d=d,
        rounds=0,
        p=p,
        p_cor=0.0,
        shots=shots,
        failures=failures,
        logical_rate=rate,
        ci_low=lo,
        ci_high=hi,
        seed=seed,
    )


def run_circuit_level(
    family: str,
    d: int,
    p: float,
    p_cor: float,
    shots: int,
    seed: int,
    rounds: int | None = None,
    cell: int = 0,
) -> RunRecord:
    """Frame-sample the annotated memory circuit and decode both graphs."""
    from . import circuit as circuit_mod

    if family not in ("type1-k2", "type2", "none"):
        raise ConfigError(f"unknown circuit-level family {family!r}")
    rounds = d if rounds is None else rounds
    code = lattice.build_planar_code(d)
    circ = circuit_mod.attach_noise(
        circuit_mod.build_memory_circuit(code, rounds), p, p_cor, family
    )
    failures = 0
    if p > 0.0 or p_cor > 0.0:
        model = circuit_mod.extract_mechanisms(circ)
        dec_x = matching.ComponentDecoder(
            matching.build_graph_from_mechanisms(
                model.x_mechanisms, circ.num_detectors
            )
        )
        dec_z = matching.ComponentDecoder(
            matching.build_graph_from_mechanisms(
                model.z_mechanisms, circ.num_detectors
            )
        )
        done = 0
        shard = 0
        while done < shots:
            batch = min(_CHUNK, shots - done)
            rng = _cell_rng(seed, cell, shard)
            dets, actual = circuit_mod.pauli_frame_sample(circ, batch, rng)
            predicted, _ = dec_x.decode_batch(dets)
            pred_z, _ = dec_z.decode_batch(dets)
            predicted ^= pred_z
            failures += int(np.sum(predicted ^ actual))
            done += batch
            shard += 1

    rate = failures / shots
    lo, hi = wilson_ci(failures, shots)
    return RunRecord(
        family=family,
        k=2 if family == "type1-k2" else None,
        d=d,
        rounds=rounds,
        p=p,
        p_cor=p_cor,
        shots=shots,
        failures=failures,
        logical_rate=rate,
        ci_low=lo,
        ci_high=hi,
        seed=seed,
    )


def records_to_csv(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in records:
        writer.writerow(
            [
                r.family,
                "" if r.k is None else r.k,
                r.d,
                r.rounds,
                f"{r.p:.10g}",
                f"{r.p_cor:.10g}",
                r.shots,
                r.failures,
                f"{r.logical_rate:.10g}",
                f"{r.ci_low:.10g}",
                f"{r.ci_high:.10g}",
                r.seed,
            ]
        )
    return buf.getvalue()


@dataclass(frozen=True)
class ThresholdEstimate:
    p_th: float
    ci_low: float
    ci_high: float
    crossings: tuple[tuple[int, int, float], ...]  # (d1, d2, crossing)


def _log_rate(failures: float, shots: float) -> float:
    # Zero-failure cells get a half-count so the log stays finite.
    return math.log(max(failures, 0.5) / shots)


def _pair_crossing(
    ps: Sequence[float],
    r1: Sequence[float],
    r2: Sequence[float],
) -> float | None:
    """Crossing of two log-rate curves via local linear fits.

    Finds the sign change of (log r1 - log r2), then fits each curve
    linearly in p over the 4 grid points nearest the change and intersects
    the two lines.
    """
    diff = [a - b for a, b in zip(r1, r2)]
    idx = None
    for i in range(len(ps) - 1):
        if diff[i] == 0 or diff[i] * diff[i + 1] <= 0:
            idx = i
            break
    if idx is None:
        return None
    lo = max(0, min(idx - 1, len(ps) - 4))
    window = slice(lo, lo + 4)
    x = np.array(ps[window])
    a1, b1 = np.polyfit(x, np.array(r1[window]), 1)
    a2, b2 = np.polyfit(x, np.array(r2[window]), 1)
    if a1 == a2:
        return None
    return float((b2 - b1) / (a1 - a2))


def estimate_threshold(
    records: Sequence[RunRecord],
    bootstrap: int = 1000,
    seed: int = 0,
) -> ThresholdEstimate:
    """Threshold from log-failure-rate crossings of consecutive distances."""
    by_d: dict[int, dict[float, RunRecord]] = {}
    for r in records:
        by_d.setdefault(r.d, {})[r.p] = r
    ds = sorted(by_d)
    if len(ds) < 2:
        raise ConfigError("need at least two distances for a threshold fit")

    def crossings_for(rates: dict[int, dict[float, float]]) -> list[tuple[int, int, float]]:
        out = []
        for d1, d2 in zip(ds, ds[1:]):
            shared = sorted(set(rates[d1]) & set(rates[d2]))
            if len(shared) < 4:
                raise InfeasibleDecodeError(
                    f"distances {d1} and {d2} share fewer than 4 grid points"
                )
            c = _pair_crossing(
                shared,
                [rates[d1][p] for p in shared],
                [rates[d2][p] for p in shared],
            )
            if c is not None:
                out.append((d1, d2, c))
        return out

    base_rates = {
        d: {p: _log_rate(r.failures, r.shots) for p, r in cells.items()}
        for d, cells in by_d.items()
    }
    base = crossings_for(base_rates)
    if not base:
        raise InfeasibleDecodeError(
            "no crossing bracketed by the sampled grid: failure-rate curves "
            "for consecutive distances never change order"
        )
    p_th = float(np.mean([c for _, _, c in base]))

    rng = np.random.default_rng(seed)
    resampled = []
    for _ in range(bootstrap):
        rates = {}
        for d, cells in by_d.items():
            rates[d] = {}
            for p, r in cells.items():
                f = rng.binomial(r.shots, r.failures / r.shots)
                rates[d][p] = _log_rate(f, r.shots)
        try:
            cs = crossings_for(rates)
        except InfeasibleDecodeError:
            continue
        if cs:
            resampled.append(float(np.mean([c for _, _, c in cs])))
    if len(resampled) < max(10, bootstrap // 10):
        raise InfeasibleDecodeError(
            "bootstrap could not locate a crossing in most resamples"
        )
    lo, hi = np.percentile(resampled, [2.5, 97.5])
    return ThresholdEstimate(
        p_th=p_th,
        ci_low=float(lo),
        ci_high=float(hi),
        crossings=tuple(base),
    )


def plot_rates_svg(records: Sequence[RunRecord], title: str = "") -> str:
    """Minimal SVG log-log plot of logical rate vs p, one polyline per d."""
    by_d: dict[int, list[RunRecord]] = {}
    for r in records:
        by_d.setdefault(r.d, []).append(r)
    width, height, margin = 640, 480, 60
    pts = [
        (r.p, max(r.logical_rate, 0.5 / r.shots))
        for rs in by_d.values()
        for r in rs
    ]
    if not pts:
        raise ConfigError("no records to plot")
    xs = [math.log10(p) for p, _ in pts]
    ys = [math.log10(r) for _, r in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1e-9
    if y1 == y0:
        y1 = y0 + 1e-9

    def sx(v: float) -> float:
        return margin + (v - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(v: float) -> float:
        return height - margin - (v - y0) / (y1 - y0) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2}" y="24" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height-margin}" x2="{width-margin}" y2="{height-margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height-margin}" stroke="black"/>',
        f'<text x="{width/2}" y="{height-16}" text-anchor="middle" font-size="12">log10 p</text>',
        f'<text x="18" y="{height/2}" font-size="12" transform="rotate(-90 18 {height/2})" text-anchor="middle">log10 logical rate</text>',
    ]
    for ci, d in enumerate(sorted(by_d)):
        rs = sorted(by_d[d], key=lambda r: r.p)
        color = colors[ci % len(colors)]
        coords = " ".join(
            f"{sx(math.log10(r.p)):.1f},{sy(math.log10(max(r.logical_rate, 0.5 / r.shots))):.1f}"
            for r in rs
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for r in rs:
            parts.append(
                f'<circle cx="{sx(math.log10(r.p)):.1f}" '
                f'cy="{sy(math.log10(max(r.logical_rate, 0.5 / r.shots))):.1f}" '
                f'r="3" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{width-margin+6}" y="{margin + 16 * ci}" font-size="12" '
            f'fill="{color}">d={d}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
