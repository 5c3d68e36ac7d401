"""Command-line interface: sampling runs, decoding, analysis, and export."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import circuit as circuit_mod
from . import harness, lattice, matching, noise, symmetry
from .errors import ConfigError, CorrsurfError


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _require(config: dict, field: str):
    if field not in config:
        raise ConfigError(f"config is missing required field {field!r}")
    return config[field]


def _cmd_sample(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    experiment = _require(config, "experiment")
    family = _require(config, "family")
    ds = _require(config, "d")
    ps = _require(config, "p")
    shots = int(_require(config, "shots"))
    seed = int(config.get("seed", 0))
    out_path = config.get("out")

    records = []
    cell = 0
    if experiment == "code-capacity":
        k = config.get("k")
        for d in ds:
            for p in ps:
                records.append(
                    harness.run_code_capacity(
                        family, int(d), float(p), shots, seed,
                        k=None if k is None else int(k), cell=cell,
                    )
                )
                cell += 1
    elif experiment == "circuit":
        ratio = float(config.get("p_cor_ratio", 1.0))
        for d in ds:
            for p in ps:
                records.append(
                    harness.run_circuit_level(
                        family, int(d), float(p), float(p) * ratio,
                        shots, seed, cell=cell,
                    )
                )
                cell += 1
    else:
        raise ConfigError(f"unknown experiment {experiment!r}")

    csv_text = harness.records_to_csv(records)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def _build_model(args: argparse.Namespace) -> noise.NoiseModel:
    code = lattice.build_planar_code(args.d)
    config = {"family": args.family, "d": args.d, "p": args.p}
    if args.family == "type1":
        if args.k is None:
            raise ConfigError("type1 requires --k")
        config["k"] = args.k
    return noise.build_from_config(code, config)


def _cmd_decode(args: argparse.Namespace) -> int:
    model = _build_model(args)
    code = model.code
    bits = [int(b) for b in args.syndrome.replace(",", "")]
    if len(bits) != code.num_checks:
        raise ConfigError(
            f"syndrome must list {code.num_checks} bits, got {len(bits)}"
        )
    graph = matching.build_matching_graph(model)
    result = matching.decode(graph, bits)
    out = {
        "matched_pairs": [list(pr) for pr in result.matched_pairs],
        "correction_support": list(result.correction.support()),
        "logical_flip": bool(result.logical_flip),
        "total_weight": result.total_weight,
    }
    print(json.dumps(out, indent=2))
    return 0


def _read_csv_records(path: str) -> list[harness.RunRecord]:
    import csv as csv_lib

    records = []
    try:
        with open(path) as fh:
            reader = csv_lib.DictReader(fh)
            for row in reader:
                records.append(
                    harness.RunRecord(
                        family=row["family"],
                        k=int(row["k"]) if row["k"] else None,
                        d=int(row["d"]),
                        rounds=int(row["rounds"]),
                        p=float(row["p"]),
                        p_cor=float(row["p_cor"]),
                        shots=int(row["shots"]),
                        failures=int(row["failures"]),
                        logical_rate=float(row["logical_rate"]),
                        ci_low=float(row["ci_low"]),
                        ci_high=float(row["ci_high"]),
                        seed=int(row["seed"]),
                    )
                )
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot parse CSV {path}: {exc}") from exc
    return records


def _cmd_threshold(args: argparse.Namespace) -> int:
    records = _read_csv_records(args.csv)
    est = harness.estimate_threshold(records, seed=args.seed)
    print(
        json.dumps(
            {
                "p_th": est.p_th,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
                "crossings": [list(c) for c in est.crossings],
            },
            indent=2,
        )
    )
    return 0


def _cmd_symmetry_check(args: argparse.Namespace) -> int:
    model = _build_model(args)
    report = symmetry.compute_s_sys(model)
    out = {
        "error_span_rank": report.error_span_rank,
        "symmetry_rank": report.symmetry_rank,
        "contains_logical": report.contains_logical,
    }
    if report.logical_witness is not None:
        out["logical_witness_support"] = list(report.logical_witness.support())
    print(json.dumps(out, indent=2))
    return 0


def _cmd_decompose(args: argparse.Namespace) -> int:
    model = _build_model(args)
    subs = noise.decompose_by_components(model)
    out = []
    for sub in subs:
        virtuals = noise.virtual_qubit_map(sub)
        out.append(
            {
                "component": sub.descriptor.component,
                "mechanisms": len(sub.mechanisms),
                "detectors": sorted(sub.detector_support()),
                "virtual_qubits": [
                    {
                        "detectors": sorted(v.detectors),
                        "effective_probability": v.effective_probability,
                        "group_size": len(v.mechanisms),
                    }
                    for v in virtuals
                ],
            }
        )
    print(json.dumps(out, indent=2))
    return 0


def _cmd_dem(args: argparse.Namespace) -> int:
    if args.circuit:
        code = lattice.build_planar_code(args.d)
        circuit_family = {
            "iid": "none", "type1": "type1-k2", "type2": "type2"
        }[args.family]
        circ = circuit_mod.attach_noise(
            circuit_mod.build_memory_circuit(code, args.rounds or args.d),
            args.p,
            args.p_cor if args.p_cor is not None else args.p,
            circuit_family,
        )
        text = circuit_mod.model_to_dem_text(
            circuit_mod.extract_mechanisms(circ)
        )
    else:
        text = noise.model_to_dem_text(_build_model(args))
    sys.stdout.write(text)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    records = _read_csv_records(args.csv)
    svg = harness.plot_rates_svg(records, title=args.title)
    with open(args.out, "w") as fh:
        fh.write(svg)
    return 0


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", required=True,
                        choices=["iid", "type1", "type2"])
    parser.add_argument("--d", type=int, required=True)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--p", type=float, default=0.01)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrsurf",
        description="Planar-code decoding experiments under correlated noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="run experiment cells to CSV")
    p_sample.add_argument("--config", required=True)
    p_sample.set_defaults(func=_cmd_sample)

    p_decode = sub.add_parser("decode", help="decode one syndrome")
    _add_model_args(p_decode)
    p_decode.add_argument("--syndrome", required=True,
                          help="bit string, X-checks then Z-checks")
    p_decode.set_defaults(func=_cmd_decode)

    p_thr = sub.add_parser("threshold", help="estimate threshold from CSV")
    p_thr.add_argument("--csv", required=True)
    p_thr.add_argument("--seed", type=int, default=0)
    p_thr.set_defaults(func=_cmd_threshold)

    p_sym = sub.add_parser("symmetry-check",
                           help="analyze the model's symmetry group")
    _add_model_args(p_sym)
    p_sym.set_defaults(func=_cmd_symmetry_check)

    p_dec = sub.add_parser("decompose",
                           help="split a correlated model into components")
    _add_model_args(p_dec)
    p_dec.set_defaults(func=_cmd_decompose)

    p_dem = sub.add_parser("dem", help="emit the detector error model")
    _add_model_args(p_dem)
    p_dem.add_argument("--circuit", action="store_true")
    p_dem.add_argument("--rounds", type=int, default=None)
    p_dem.add_argument("--p-cor", type=float, default=None)
    p_dem.set_defaults(func=_cmd_dem)

    p_plot = sub.add_parser("plot", help="render a CSV as an SVG chart")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--title", default="logical error rate")
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorrsurfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except AssertionError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
