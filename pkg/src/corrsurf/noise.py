"""Correlated Z-error channels on the planar code.

A noise model is a list of independent error mechanisms; each mechanism
fires with its own probability and applies a fixed multi-qubit Z error.
Three families are provided:

  iid    - one single-qubit Z per data qubit
  type1  - Z^k on k collinear data qubits (horizontal runs on even rows,
           vertical runs on odd columns)
  type2  - Z x Z on diagonally adjacent data-qubit pairs (all orientations)

Mechanism detector signatures are derived from the code's syndrome map at
construction and never stored stale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import lattice, pauli
from .lattice import Coord, PlanarCode
from .pauli import PauliOp


@dataclass(frozen=True)
class ModelDescriptor:
    family: str  # "iid" | "type1" | "type2"
    d: int
    p: float
    k: int | None = None
    component: int | None = None

    def to_config(self) -> dict:
        out = {"family": self.family, "d": self.d, "p": self.p}
        if self.k is not None:
            out["k"] = self.k
        if self.component is not None:
            out["component"] = self.component
        return out


@dataclass(frozen=True)
class ErrorMechanism:
    probability: float
    pauli: PauliOp
    detectors: frozenset[int]
    flips_logical_x: bool
    flips_logical_z: bool

    @property
    def flips_observable(self) -> bool:
        """Whether the mechanism flips the protected X-type observable."""
        return self.flips_logical_x


@dataclass(frozen=True)
class NoiseModel:
    code: PlanarCode
    mechanisms: tuple[ErrorMechanism, ...]
    descriptor: ModelDescriptor

    @property
    def num_detectors(self) -> int:
        return self.code.num_checks

    def detector_support(self) -> frozenset[int]:
        out: set[int] = set()
        for mech in self.mechanisms:
            out |= mech.detectors
        return frozenset(out)


def _make_mechanism(code: PlanarCode, op: PauliOp, p: float) -> ErrorMechanism:
    bits = lattice.syndrome(code, op)
    detectors = frozenset(i for i, b in enumerate(bits) if b)
    return ErrorMechanism(
        probability=p,
        pauli=op,
        detectors=detectors,
        flips_logical_x=not pauli.commutes(op, code.logical_x),
        flips_logical_z=not pauli.commutes(op, code.logical_z),
    )


def _parity_combine(p: float, q: float) -> float:
    """Probability that exactly one of two independent events occurs."""
    return p * (1.0 - q) + q * (1.0 - p)


def _build(
    code: PlanarCode,
    paulis: Iterable[PauliOp],
    p: float,
    descriptor: ModelDescriptor,
) -> NoiseModel:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    # Mechanisms with an identical Pauli are merged by odd-parity firing.
    merged: dict[tuple[int, int], float] = {}
    op_by_key: dict[tuple[int, int], PauliOp] = {}
    for op in paulis:
        key = (op.x_mask, op.z_mask)
        if key in merged:
            merged[key] = _parity_combine(merged[key], p)
        else:
            merged[key] = p
            op_by_key[key] = op
    mechanisms = tuple(
        _make_mechanism(code, op_by_key[key], prob)
        for key, prob in merged.items()
    )
    return NoiseModel(code=code, mechanisms=mechanisms, descriptor=descriptor)


def build_iid_z(code: PlanarCode, p: float) -> NoiseModel:
    """One single-qubit-Z mechanism per data qubit."""
    ops = [code.z_on(coord) for coord in code.data_coords]
    return _build(code, ops, p, ModelDescriptor("iid", code.d, p))


def build_type1(code: PlanarCode, k: int, p1: float) -> NoiseModel:
    """Z^k line mechanisms: horizontal on even rows, vertical on odd cols.

    Horizontal windows cover k consecutive even-column data qubits of one
    even row (d*(d-k+1) placements); vertical windows cover k consecutive
    odd-row data qubits of one odd column ((d-1)*(d-k) placements).
    """
    if k < 2:
        raise ValueError(f"correlation length must be >= 2, got {k}")
    if k > code.d:
        raise ValueError(f"correlation length {k} exceeds distance {code.d}")
    span = 2 * code.d - 1
    ops = []
    for r in range(0, span, 2):
        for c0 in range(0, span - 2 * (k - 1), 2):
            ops.append(code.z_on(*[(r, c0 + 2 * j) for j in range(k)]))
    for c in range(1, span, 2):
        for r0 in range(1, span - 2 * (k - 1), 2):
            ops.append(code.z_on(*[(r0 + 2 * j, c) for j in range(k)]))
    return _build(code, ops, p1, ModelDescriptor("type1", code.d, p1, k=k))


def build_type2(code: PlanarCode, p2: float) -> NoiseModel:
    """Z x Z on every diagonally adjacent data-data pair inside the lattice."""
    ops = []
    for r, c in code.data_coords:
        for dr, dc in ((1, 1), (1, -1)):
            nb = Coord(r + dr, c + dc)
            if lattice.is_data_coord(code.d, nb):
                ops.append(code.z_on((r, c), nb))
    return _build(code, ops, p2, ModelDescriptor("type2", code.d, p2))


def sample(model: NoiseModel, rng: np.random.Generator) -> PauliOp:
    """Fire each mechanism independently; return the product Pauli."""
    draws = rng.random(len(model.mechanisms))
    acc = pauli.identity(model.code.n)
    for mech, u in zip(model.mechanisms, draws):
        if u < mech.probability:
            acc = pauli.multiply(acc, mech.pauli)
    return acc


def sample_firings(
    model: NoiseModel, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """(shots, m) boolean firing matrix; column order = mechanism order."""
    probs = np.array([mech.probability for mech in model.mechanisms])
    return rng.random((shots, probs.size)) < probs


def decompose_by_components(model: NoiseModel) -> list[NoiseModel]:
    """Split a single-family correlated model into syndrome-disjoint parts.

    Detectors are connected when one mechanism triggers both; each
    connected component of detectors yields one sub-model holding every
    mechanism whose detectors fall in that component.
    """
    if model.descriptor.family not in ("type1", "type2"):
        raise ValueError(
            "decomposition applies to a single correlated family "
            f"(got {model.descriptor.family!r})"
        )
    for mech in model.mechanisms:
        if not mech.detectors:
            raise ValueError(
                "undetectable mechanism (no detectors): "
                f"support {mech.pauli.support()}"
            )

    parent = list(range(model.num_detectors))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for mech in model.mechanisms:
        dets = sorted(mech.detectors)
        for a, b in zip(dets, dets[1:]):
            union(a, b)

    groups: dict[int, list[ErrorMechanism]] = {}
    for mech in model.mechanisms:
        root = find(min(mech.detectors))
        groups.setdefault(root, []).append(mech)

    out = []
    for idx, root in enumerate(sorted(groups)):
        desc = ModelDescriptor(
            family=model.descriptor.family,
            d=model.descriptor.d,
            p=model.descriptor.p,
            k=model.descriptor.k,
            component=idx,
        )
        out.append(
            NoiseModel(
                code=model.code,
                mechanisms=tuple(groups[root]),
                descriptor=desc,
            )
        )
    supports = [m.detector_support() for m in out]
    for i in range(len(supports)):
        for j in range(i + 1, len(supports)):
            if supports[i] & supports[j]:
                raise AssertionError("component detector supports overlap")
    return out


@dataclass(frozen=True)
class VirtualQubit:
    detectors: frozenset[int]
    effective_probability: float
    mechanisms: tuple[ErrorMechanism, ...]


def virtual_qubit_map(sub_model: NoiseModel) -> list[VirtualQubit]:
    """Group mechanisms by identical detector set into virtual qubits.

    The effective probability is the odd-parity firing probability of the
    group. For any group of size >= 2, pairwise products of the member
    Paulis must be stabilizers; anything else breaks the i.i.d.-equivalence
    mapping and is reported as a structural failure.
    """
    for mech in sub_model.mechanisms:
        if len(mech.detectors) > 2:
            raise ValueError("virtual-qubit map requires <= 2 detectors")
    groups: dict[frozenset[int], list[ErrorMechanism]] = {}
    for mech in sub_model.mechanisms:
        groups.setdefault(mech.detectors, []).append(mech)

    stab_span = sub_model.code.stabilizer_span
    out = []
    for dets in sorted(groups, key=sorted):
        mechs = groups[dets]
        for i in range(len(mechs)):
            for j in range(i + 1, len(mechs)):
                product = pauli.multiply(mechs[i].pauli, mechs[j].pauli)
                if not pauli.in_span(product, stab_span):
                    raise ValueError(
                        "structural failure: mechanisms with detector set "
                        f"{sorted(dets)} differ by a non-stabilizer"
                    )
        # P(odd number of the group's mechanisms fire).
        no_flip = 1.0
        for mech in mechs:
            no_flip *= 1.0 - 2.0 * mech.probability
        p_eff = 0.5 * (1.0 - no_flip)
        out.append(
            VirtualQubit(
                detectors=dets,
                effective_probability=p_eff,
                mechanisms=tuple(mechs),
            )
        )
    return out


def model_to_dem_text(model: NoiseModel) -> str:
    """Detector-error-model-style listing, one mechanism per line."""
    lines = []
    for mech in model.mechanisms:
        parts = [f"error({mech.probability:.10g})"]
        parts.extend(f"D{i}" for i in sorted(mech.detectors))
        if mech.flips_observable:
            parts.append("L0")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def build_from_config(code: PlanarCode, config: dict) -> NoiseModel:
    """Build a model from a {family, d, k?, p} descriptor record."""
    family = config["family"]
    p = float(config["p"])
    if family == "iid":
        return build_iid_z(code, p)
    if family == "type1":
        return build_type1(code, int(config["k"]), p)
    if family == "type2":
        return build_type2(code, p)
    raise ValueError(f"unknown noise family {family!r}")
