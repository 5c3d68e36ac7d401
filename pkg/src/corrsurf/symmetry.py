"""Structural analysis of correlated error models.

The mechanisms of a noise model generate a GF(2) span (the error span).
Its zero-syndrome sub-span is the model's internal symmetry group; whether
that group contains a logical operator decides whether the model can cause
undetectable logical failure at all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from . import lattice, pauli
from .errors import ConfigError
from .lattice import Coord, PlanarCode
from .noise import NoiseModel
from .pauli import GroupSpan, PauliOp


@dataclass(frozen=True)
class SymmetryReport:
    error_span_rank: int
    symmetry_rank: int
    contains_logical: bool
    logical_witness: PauliOp | None


def error_span(model: NoiseModel) -> GroupSpan:
    """GF(2) span generated by the model's mechanism Paulis."""
    return pauli.span_from_generators(
        model.code.n, [m.pauli for m in model.mechanisms]
    )


def compute_s_sys(model: NoiseModel) -> SymmetryReport:
    """Zero-syndrome sub-span of the error span, and its logical content."""
    code = model.code
    span = error_span(model)
    checks = [g for _, g in code.x_checks] + [g for _, g in code.z_checks]
    sym = pauli.centralizer_restricted(span, checks)

    witness = _logical_witness(code, span, checks)
    return SymmetryReport(
        error_span_rank=span.rank,
        symmetry_rank=sym.rank,
        contains_logical=witness is not None,
        logical_witness=witness,
    )


def _logical_witness(
    code: PlanarCode, span: GroupSpan, checks: Sequence[PauliOp]
) -> PauliOp | None:
    """An element of span with zero syndrome anticommuting with logical_x."""
    if span.rank == 0:
        return None
    rows = []
    rhs = []
    for g in checks:
        row = 0
        for j, b in enumerate(span.basis):
            if not pauli.commutes(b, g):
                row |= 1 << j
        rows.append(row)
        rhs.append(0)
    row = 0
    for j, b in enumerate(span.basis):
        if not pauli.commutes(b, code.logical_x):
            row |= 1 << j
    rows.append(row)
    rhs.append(1)
    coeffs = pauli.solve_gf2(rows, rhs, span.rank)
    if coeffs is None:
        return None
    acc = pauli.identity(code.n)
    for j in range(span.rank):
        if (coeffs >> j) & 1:
            acc = pauli.multiply(acc, span.basis[j])
    return acc


def square_block_operator(code: PlanarCode, corner: Coord, k: int) -> PauliOp:
    """Product of the k x k block of plaquette checks with top-left corner.

    `corner` must name a Z-check coordinate (odd row, even column).
    """
    r0, c0 = corner
    if r0 % 2 != 1 or c0 % 2 != 0:
        raise ConfigError(f"{corner} is not a plaquette coordinate")
    z_by_coord = dict(code.z_checks)
    acc = pauli.identity(code.n)
    for i in range(k):
        for j in range(k):
            coord = Coord(r0 + 2 * i, c0 + 2 * j)
            if coord not in z_by_coord:
                raise ConfigError(f"block leaves the lattice at {coord}")
            acc = pauli.multiply(acc, z_by_coord[coord])
    return acc


def verify_square_symmetry_elements(code: PlanarCode, k: int) -> int:
    """Check every interior k x k plaquette block against the line model.

    Each block product must lie both in the stabilizer group and in the
    error span of the length-k line model; returns the number of blocks
    verified, raising on the first violation.
    """
    from .noise import build_type1

    model = build_type1(code, k, 0.1)
    span = error_span(model)
    span_max = 2 * code.d - 1
    count = 0
    for r0 in range(1, span_max - 2 * (k - 1), 2):
        for c0 in range(0, span_max - 2 * (k - 1) + 1, 2):
            op = square_block_operator(code, Coord(r0, c0), k)
            if not pauli.in_span(op, code.stabilizer_span):
                raise AssertionError(
                    f"block at ({r0},{c0}) is not a stabilizer"
                )
            if not pauli.in_span(op, span):
                raise AssertionError(
                    f"block at ({r0},{c0}) is outside the error span"
                )
            count += 1
    return count


def success_probability_exact(
    model: NoiseModel,
    decoder: Callable[[tuple[int, ...]], PauliOp],
) -> float:
    """Exact decoder success probability by full mechanism enumeration.

    Sums the probability of every firing pattern whose residual (error
    times decoder correction) is a stabilizer.  Requires <= 20 mechanisms.
    """
    mechs = model.mechanisms
    if len(mechs) > 20:
        raise ConfigError(
            f"exact enumeration limited to 20 mechanisms, got {len(mechs)}"
        )
    code = model.code
    cache: dict[tuple[int, ...], PauliOp] = {}
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(mechs)):
        prob = 1.0
        err = pauli.identity(code.n)
        for fired, mech in zip(bits, mechs):
            prob *= mech.probability if fired else 1.0 - mech.probability
            if fired:
                err = pauli.multiply(err, mech.pauli)
        syn = lattice.syndrome(code, err)
        if syn not in cache:
            cache[syn] = decoder(syn)
        if lattice.residual_class(code, err, cache[syn]) == "stabilizer":
            total += prob
    return total
