"""Circuit-level memory experiment with Pauli-frame simulation.

Builds the syndrome-extraction circuit for the planar code (X-basis
memory), annotates it with gate/idle/measurement noise plus an optional
per-round correlated Z layer, samples it by propagating a Pauli frame,
and extracts a spacetime error model (one mechanism per merged fault
symptom) suitable for matching-based decoding.

Conventions fixed here:
  * Ancilla order: X-check ancillas first, then Z-check ancillas, after
    the data qubits.
  * CX schedules: X-checks couple to their N, E, W, S neighbor in steps
    1-4; Z-checks use N, W, E, S.  Each data qubit is touched by at most
    one gate per step, so the step layers commute.
  * X-check detectors: first round vs deterministic preparation, then
    consecutive-round comparisons, then a final comparison against the
    check value reconstructed from the destructive data measurement
    (rounds+1 detectors per check).  Z-check detectors: consecutive-round
    comparisons only (rounds-1 per check), since Z-checks are neither
    deterministic at preparation nor reconstructible from X-basis data
    measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import noise as noise_mod
from .errors import ConfigError, InvariantViolation
from .lattice import Coord, PlanarCode

_X_OFFSETS = ((-1, 0), (0, 1), (0, -1), (1, 0))  # N, E, W, S
_Z_OFFSETS = ((-1, 0), (0, -1), (0, 1), (1, 0))  # N, W, E, S

# Two-qubit depolarizing outcomes 1..15 as (pauli_a, pauli_b),
# 0=I, 1=X, 2=Y, 3=Z.
_DEPOL2_OUTCOMES = tuple(
    (o >> 2, o & 3) for o in range(1, 16)
)
_HAS_X = (False, True, True, False)  # per single-qubit Pauli code
_HAS_Z = (False, False, True, True)


@dataclass(frozen=True)
class Instruction:
    name: str  # RX RZ H CX MX MZ TICK DEPOLARIZE2 Z_ERROR CORR_Z
    targets: tuple[int, ...] = ()
    arg: float | None = None


@dataclass(frozen=True)
class Detector:
    kind: str  # "X" or "Z"
    coord: Coord
    round: int
    measurements: tuple[int, ...]


@dataclass(frozen=True)
class Circuit:
    code: PlanarCode
    rounds: int
    num_qubits: int
    instructions: tuple[Instruction, ...]
    detectors: tuple[Detector, ...]
    observable: tuple[int, ...]
    num_measurements: int

    @property
    def num_detectors(self) -> int:
        return len(self.detectors)


def build_memory_circuit(code: PlanarCode, rounds: int) -> Circuit:
    """Noiseless X-basis memory circuit with `rounds` extraction rounds."""
    if rounds < 1:
        raise ConfigError(f"rounds must be >= 1, got {rounds}")
    n = code.n
    nx = len(code.x_checks)
    nz = len(code.z_checks)
    x_anc = [n + j for j in range(nx)]
    z_anc = [n + nx + j for j in range(nz)]
    num_qubits = n + nx + nz

    instrs: list[Instruction] = []
    meas_count = 0
    meas_x = [[0] * rounds for _ in range(nx)]
    meas_z = [[0] * rounds for _ in range(nz)]

    def emit(name: str, targets: Sequence[int] = (), arg: float | None = None):
        instrs.append(Instruction(name, tuple(targets), arg))

    emit("RX", range(n))
    emit("TICK")
    for r in range(rounds):
        emit("RX", x_anc)
        emit("RZ", z_anc)
        emit("TICK")
        for step in range(4):
            pairs: list[int] = []
            for j, (coord, _) in enumerate(code.x_checks):
                nb = Coord(
                    coord.row + _X_OFFSETS[step][0],
                    coord.col + _X_OFFSETS[step][1],
                )
                if nb in code.coord_index:
                    pairs += [x_anc[j], code.coord_index[nb]]
            for j, (coord, _) in enumerate(code.z_checks):
                nb = Coord(
                    coord.row + _Z_OFFSETS[step][0],
                    coord.col + _Z_OFFSETS[step][1],
                )
                if nb in code.coord_index:
                    pairs += [code.coord_index[nb], z_anc[j]]
            emit("CX", pairs)
            emit("TICK")
        for j in range(nx):
            meas_x[j][r] = meas_count + j
        emit("MX", x_anc)
        meas_count += nx
        for j in range(nz):
            meas_z[j][r] = meas_count + j
        emit("MZ", z_anc)
        meas_count += nz
        emit("TICK")
    data_meas = {q: meas_count + q for q in range(n)}
    emit("MX", range(n))
    meas_count += n

    detectors: list[Detector] = []
    for j, (coord, op) in enumerate(code.x_checks):
        detectors.append(Detector("X", coord, 0, (meas_x[j][0],)))
        for r in range(1, rounds):
            detectors.append(
                Detector("X", coord, r, (meas_x[j][r - 1], meas_x[j][r]))
            )
        support = [data_meas[q] for q in op.support()]
        detectors.append(
            Detector("X", coord, rounds, tuple([meas_x[j][rounds - 1]] + support))
        )
    for j, (coord, _) in enumerate(code.z_checks):
        for r in range(1, rounds):
            detectors.append(
                Detector("Z", coord, r, (meas_z[j][r - 1], meas_z[j][r]))
            )

    observable = tuple(data_meas[q] for q in code.logical_x.support())
    return Circuit(
        code=code,
        rounds=rounds,
        num_qubits=num_qubits,
        instructions=tuple(instrs),
        detectors=tuple(detectors),
        observable=observable,
        num_measurements=meas_count,
    )


def attach_noise(
    circuit: Circuit,
    p: float,
    p_cor: float,
    correlated_family: str = "none",
) -> Circuit:
    """Insert noise after each layer; see the module docstring for rules.

    After CX layers: two-qubit depolarizing (15 outcomes at p/15 each) on
    the gate pairs plus Z(p) on idle qubits.  After reset layers: Z(p) on
    every qubit.  Measurements get a flip probability p.  After the
    measurement layer of each round, each correlated mechanism of the
    chosen family fires with probability p_cor on the data qubits.
    """
    if not (0.0 <= p < 0.5 and 0.0 <= p_cor < 0.5):
        raise ConfigError("p and p_cor must lie in [0, 0.5)")
    if correlated_family not in ("none", "type1-k2", "type2"):
        raise ConfigError(f"unknown correlated family {correlated_family!r}")
    if p == 0.0 and p_cor == 0.0:
        return circuit

    corr_supports: list[tuple[int, ...]] = []
    if p_cor > 0.0 and correlated_family != "none":
        if correlated_family == "type1-k2":
            cmodel = noise_mod.build_type1(circuit.code, 2, p_cor)
        else:
            cmodel = noise_mod.build_type2(circuit.code, p_cor)
        corr_supports = [m.pauli.support() for m in cmodel.mechanisms]

    all_qubits = tuple(range(circuit.num_qubits))
    out: list[Instruction] = []
    layer: list[Instruction] = []

    def flush() -> None:
        if not layer:
            return
        names = {ins.name for ins in layer}
        busy: set[int] = set()
        for ins in layer:
            busy.update(ins.targets)
        idle = tuple(q for q in all_qubits if q not in busy)
        if "CX" in names:
            for ins in layer:
                out.append(ins)
                if ins.name == "CX" and p > 0.0:
                    out.append(Instruction("DEPOLARIZE2", ins.targets, p))
            if p > 0.0 and idle:
                out.append(Instruction("Z_ERROR", idle, p))
        elif names & {"MX", "MZ"}:
            for ins in layer:
                if ins.name in ("MX", "MZ") and p > 0.0:
                    out.append(replace(ins, arg=p))
                else:
                    out.append(ins)
            if p > 0.0 and idle:
                out.append(Instruction("Z_ERROR", idle, p))
            # End-of-round correlated layer: ancilla measurement layers
            # contain MZ; the final data layer does not.
            if "MZ" in names and corr_supports:
                for support in corr_supports:
                    out.append(Instruction("CORR_Z", support, p_cor))
        else:
            out.extend(layer)
            if p > 0.0:
                out.append(Instruction("Z_ERROR", all_qubits, p))
        layer.clear()

    for ins in circuit.instructions:
        if ins.name == "TICK":
            flush()
            out.append(ins)
        else:
            layer.append(ins)
    flush()
    return replace(circuit, instructions=tuple(out))


@dataclass(frozen=True)
class FaultSite:
    """One elementary fault location within an annotated circuit."""

    index: int
    instruction_index: int
    kind: str  # "depol2" | "z" | "meas" | "corr"
    qubits: tuple[int, ...]
    outcome: int  # depol2 outcome 1..15; 0 otherwise
    probability: float


def enumerate_faults(circuit: Circuit) -> list[FaultSite]:
    """Elementary faults in deterministic (execution) order."""
    sites: list[FaultSite] = []
    for ii, ins in enumerate(circuit.instructions):
        if ins.name == "DEPOLARIZE2":
            pairs = [
                (ins.targets[i], ins.targets[i + 1])
                for i in range(0, len(ins.targets), 2)
            ]
            for a, b in pairs:
                for o in range(1, 16):
                    sites.append(
                        FaultSite(
                            len(sites), ii, "depol2", (a, b), o, ins.arg / 15
                        )
                    )
        elif ins.name == "Z_ERROR":
            for q in ins.targets:
                sites.append(FaultSite(len(sites), ii, "z", (q,), 0, ins.arg))
        elif ins.name in ("MX", "MZ") and ins.arg:
            for q in ins.targets:
                sites.append(
                    FaultSite(len(sites), ii, "meas", (q,), 0, ins.arg)
                )
        elif ins.name == "CORR_Z":
            sites.append(
                FaultSite(len(sites), ii, "corr", ins.targets, 0, ins.arg)
            )
    return sites


def pauli_frame_sample(
    circuit: Circuit,
    shots: int,
    rng: np.random.Generator | None = None,
    injections: Sequence[Iterable[int]] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the annotated circuit; returns (detector bits, observable).

    With `injections`, random sampling is disabled and shot s suffers
    exactly the faults whose `FaultSite.index` values are listed in
    injections[s] (deterministic; used for model extraction and tests).
    """
    if injections is not None and len(injections) != shots:
        raise ConfigError("injections must list one fault set per shot")
    fault_rows: dict[int, list[int]] = {}
    if injections is not None:
        for s, ids in enumerate(injections):
            for f in ids:
                fault_rows.setdefault(f, []).append(s)

    fx = np.zeros((shots, circuit.num_qubits), dtype=np.uint8)
    fz = np.zeros((shots, circuit.num_qubits), dtype=np.uint8)
    meas = np.zeros((shots, circuit.num_measurements), dtype=np.uint8)
    mcount = 0
    fault_id = 0

    def rand_mask(p: float, shape) -> np.ndarray:
        return (rng.random(shape) < p).astype(np.uint8)

    for ins in circuit.instructions:
        name = ins.name
        if name == "TICK":
            continue
        qs = np.array(ins.targets, dtype=np.intp)
        if name in ("RX", "RZ"):
            fx[:, qs] = 0
            fz[:, qs] = 0
        elif name == "H":
            tmp = fx[:, qs].copy()
            fx[:, qs] = fz[:, qs]
            fz[:, qs] = tmp
        elif name == "CX":
            cs = qs[0::2]
            ts = qs[1::2]
            fx[:, ts] ^= fx[:, cs]
            fz[:, cs] ^= fz[:, ts]
        elif name == "DEPOLARIZE2":
            pairs = [(qs[i], qs[i + 1]) for i in range(0, len(qs), 2)]
            if injections is None:
                po = ins.arg / 15
                a_idx = qs[0::2]
                b_idx = qs[1::2]
                for pa, pb in _DEPOL2_OUTCOMES:
                    mask = rand_mask(po, (shots, len(pairs)))
                    if _HAS_X[pa]:
                        fx[:, a_idx] ^= mask
                    if _HAS_Z[pa]:
                        fz[:, a_idx] ^= mask
                    if _HAS_X[pb]:
                        fx[:, b_idx] ^= mask
                    if _HAS_Z[pb]:
                        fz[:, b_idx] ^= mask
            for a, b in pairs:
                for o in range(1, 16):
                    if injections is not None:
                        rows = fault_rows.get(fault_id)
                        if rows:
                            pa, pb = o >> 2, o & 3
                            if _HAS_X[pa]:
                                fx[rows, a] ^= 1
                            if _HAS_Z[pa]:
                                fz[rows, a] ^= 1
                            if _HAS_X[pb]:
                                fx[rows, b] ^= 1
                            if _HAS_Z[pb]:
                                fz[rows, b] ^= 1
                    fault_id += 1
        elif name == "Z_ERROR":
            if injections is None:
                fz[:, qs] ^= rand_mask(ins.arg, (shots, len(qs)))
                fault_id += len(qs)
            else:
                for q in ins.targets:
                    rows = fault_rows.get(fault_id)
                    if rows:
                        fz[rows, q] ^= 1
                    fault_id += 1
        elif name == "CORR_Z":
            if injections is None:
                mask = rand_mask(ins.arg, (shots, 1))
                fz[:, qs] ^= mask
                fault_id += 1
            else:
                rows = fault_rows.get(fault_id)
                if rows:
                    fz[np.ix_(rows, qs)] ^= 1
                fault_id += 1
        elif name in ("MX", "MZ"):
            flips = fz[:, qs].copy() if name == "MX" else fx[:, qs].copy()
            if ins.arg:
                if injections is None:
                    flips ^= rand_mask(ins.arg, (shots, len(qs)))
                    fault_id += len(qs)
                else:
                    for col, _q in enumerate(ins.targets):
                        rows = fault_rows.get(fault_id)
                        if rows:
                            flips[rows, col] ^= 1
                        fault_id += 1
            meas[:, mcount : mcount + len(qs)] = flips
            mcount += len(qs)
        else:
            raise ConfigError(f"unknown instruction {name!r}")

    det = np.zeros((shots, circuit.num_detectors), dtype=np.uint8)
    for i, d in enumerate(circuit.detectors):
        det[:, i] = np.bitwise_xor.reduce(meas[:, list(d.measurements)], axis=1)
    obs = np.bitwise_xor.reduce(meas[:, list(circuit.observable)], axis=1)
    return det, obs


@dataclass(frozen=True)
class SpacetimeMechanism:
    probability: float
    detectors: frozenset[int]  # global detector indices
    flips_observable: bool


@dataclass(frozen=True)
class SpacetimeModel:
    """Extracted error model: one mechanism list per detector graph."""

    circuit: Circuit
    x_mechanisms: tuple[SpacetimeMechanism, ...]
    z_mechanisms: tuple[SpacetimeMechanism, ...]

    @property
    def num_detectors(self) -> int:
        return self.circuit.num_detectors


def _merge_symptom(
    table: dict[tuple[frozenset[int], bool], float],
    dets: frozenset[int],
    prob: float,
    flip: bool,
) -> None:
    # Faults with identical detectors but opposite observable action stay
    # separate mechanisms (degenerate-logical ambiguity); identical
    # symptom-and-flip pairs combine by odd-parity firing.
    key = (dets, flip)
    if key in table:
        q = table[key]
        table[key] = q * (1 - prob) + prob * (1 - q)
    else:
        table[key] = prob


def extract_mechanisms(circuit: Circuit) -> SpacetimeModel:
    """Propagate every elementary fault once and merge symptoms per graph.

    Symptoms touching more than two detectors of one graph are greedily
    decomposed into existing one- and two-detector symptoms; their
    probability is parity-merged into each component.
    """
    sites = enumerate_faults(circuit)
    if not sites:
        raise ConfigError("circuit carries no noise annotations")
    det, obs = pauli_frame_sample(
        circuit, len(sites), injections=[[s.index] for s in sites]
    )
    kinds = np.array([1 if d.kind == "X" else 0 for d in circuit.detectors])
    x_cols = np.nonzero(kinds == 1)[0]
    z_cols = np.nonzero(kinds == 0)[0]

    x_table: dict[tuple[frozenset[int], bool], float] = {}
    z_table: dict[tuple[frozenset[int], bool], float] = {}
    composites: list[tuple[str, frozenset[int], float, bool, FaultSite]] = []
    for s in sites:
        if s.probability <= 0.0:
            continue
        row = det[s.index]
        dx = frozenset(int(c) for c in x_cols[row[x_cols] != 0])
        dz = frozenset(int(c) for c in z_cols[row[z_cols] != 0])
        flip = bool(obs[s.index])
        if flip and not dx:
            raise InvariantViolation(
                f"fault at instruction {s.instruction_index} flips the "
                "observable without any X-graph symptom"
            )
        for dets, graph_flip, table in (
            (dx, flip, x_table),
            (dz, False, z_table),
        ):
            if not dets:
                continue
            if len(dets) <= 2:
                _merge_symptom(table, dets, s.probability, graph_flip)
            else:
                composites.append(
                    ("X" if table is x_table else "Z", dets, s.probability, graph_flip, s)
                )

    def part_variants(
        table: dict[tuple[frozenset[int], bool], float], dets: frozenset[int]
    ) -> list[bool]:
        return [f for f in (False, True) if (dets, f) in table]

    for label, dets, prob, flip, site in composites:
        table = x_table if label == "X" else z_table
        remaining = sorted(dets)
        parts: list[frozenset[int]] = []
        while remaining:
            a = remaining[0]
            pair = None
            for b in remaining[1:]:
                if part_variants(table, frozenset((a, b))):
                    pair = frozenset((a, b))
                    break
            if pair is not None:
                parts.append(pair)
                remaining.remove(a)
                remaining.remove(max(pair - {a}))
            elif part_variants(table, frozenset((a,))):
                parts.append(frozenset((a,)))
                remaining.remove(a)
            else:
                raise ConfigError(
                    f"cannot decompose symptom {sorted(dets)} of the fault "
                    f"at instruction {site.instruction_index} "
                    f"(kind {site.kind}, qubits {site.qubits})"
                )
        # Choose one flip variant per part so that the parity matches the
        # composite's observable action; prefer the higher-probability
        # variant, correcting parity on the most ambivalent part.
        choice = []
        for part in parts:
            variants = part_variants(table, part)
            best = max(variants, key=lambda f: table[(part, f)])
            choice.append((part, best, len(variants) == 2))
        parity = flip
        for _, f, _both in choice:
            parity ^= f
        if parity:
            fixed = False
            for i, (part, f, both) in enumerate(choice):
                if both:
                    choice[i] = (part, not f, both)
                    fixed = True
                    break
            if not fixed:
                raise InvariantViolation(
                    f"decomposition of symptom {sorted(dets)} flips the "
                    "observable inconsistently "
                    f"(fault at instruction {site.instruction_index})"
                )
        for part, f, _ in choice:
            q = table[(part, f)]
            table[(part, f)] = q * (1 - prob) + prob * (1 - q)

    def finish(table) -> tuple[SpacetimeMechanism, ...]:
        return tuple(
            SpacetimeMechanism(prob, dets, flip)
            for (dets, flip), prob in sorted(
                table.items(), key=lambda kv: (sorted(kv[0][0]), kv[0][1])
            )
            if prob > 0.0
        )

    return SpacetimeModel(
        circuit=circuit,
        x_mechanisms=finish(x_table),
        z_mechanisms=finish(z_table),
    )


def circuit_to_text(circuit: Circuit) -> str:
    """Line-based serialization (instructions, detectors, observable)."""
    lines = [f"qubits {circuit.num_qubits}", f"rounds {circuit.rounds}"]
    for ins in circuit.instructions:
        head = ins.name if ins.arg is None else f"{ins.name}({ins.arg:.10g})"
        lines.append(
            head + (" " + " ".join(map(str, ins.targets)) if ins.targets else "")
        )
    for d in circuit.detectors:
        lines.append(
            f"DETECTOR {d.kind} {d.coord.row} {d.coord.col} {d.round} : "
            + " ".join(map(str, d.measurements))
        )
    lines.append("OBSERVABLE : " + " ".join(map(str, circuit.observable)))
    return "\n".join(lines) + "\n"


def model_to_dem_text(model: SpacetimeModel) -> str:
    """Detector-error-model-style listing of the extracted mechanisms."""
    lines = []
    for label, mechs in (("X", model.x_mechanisms), ("Z", model.z_mechanisms)):
        lines.append(f"# graph {label}")
        for m in mechs:
            parts = [f"error({m.probability:.10g})"]
            parts.extend(f"D{i}" for i in sorted(m.detectors))
            if m.flips_observable:
                parts.append("L0")
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
