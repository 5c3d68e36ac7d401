"""Distance-d planar surface code in checkerboard coordinates.

Data qubits sit at (row, col) with row ≡ col (mod 2), 0 <= row, col <= 2d-2.
X-checks (vertex operators, products of X) sit at even rows / odd columns;
Z-checks (plaquette operators, products of Z) at odd rows / even columns.
The logical Z is the Z-chain along row 0; the logical X is the X-chain
along column 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from . import pauli
from .pauli import GroupSpan, PauliOp


class Coord(NamedTuple):
    row: int
    col: int


_NEIGHBOR_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class PlanarCode:
    """Immutable geometry + stabilizer data of one planar code instance."""

    d: int
    n: int
    data_coords: tuple[Coord, ...]
    x_checks: tuple[tuple[Coord, PauliOp], ...]
    z_checks: tuple[tuple[Coord, PauliOp], ...]
    logical_x: PauliOp
    logical_z: PauliOp
    stabilizer_span: GroupSpan
    coord_index: dict[Coord, int] = field(repr=False)

    @property
    def num_checks(self) -> int:
        return len(self.x_checks) + len(self.z_checks)

    @property
    def check_coords(self) -> tuple[Coord, ...]:
        """All check coordinates in syndrome order (X-checks first)."""
        return tuple(c for c, _ in self.x_checks) + tuple(
            c for c, _ in self.z_checks
        )

    def data_index(self, coord: Coord | tuple[int, int]) -> int:
        return self.coord_index[Coord(*coord)]

    def z_on(self, *coords: tuple[int, int]) -> PauliOp:
        """Z error on the given data coordinates (test/model convenience)."""
        return pauli.pauli_from_support(
            self.n, zs=[self.data_index(c) for c in coords]
        )

    def x_on(self, *coords: tuple[int, int]) -> PauliOp:
        return pauli.pauli_from_support(
            self.n, xs=[self.data_index(c) for c in coords]
        )


def is_data_coord(d: int, coord: Coord) -> bool:
    r, c = coord
    return 0 <= r <= 2 * d - 2 and 0 <= c <= 2 * d - 2 and (r % 2) == (c % 2)


def build_planar_code(d: int) -> PlanarCode:
    """Construct the distance-d planar code; see the module docstring."""
    if d < 2:
        raise ValueError(f"distance must be >= 2, got {d}")
    span = 2 * d - 1

    data_coords = tuple(
        Coord(r, c)
        for r in range(span)
        for c in range(span)
        if (r % 2) == (c % 2)
    )
    n = len(data_coords)
    assert n == d * d + (d - 1) * (d - 1)
    coord_index = {coord: i for i, coord in enumerate(data_coords)}

    def check_support(coord: Coord) -> list[int]:
        r, c = coord
        out = []
        for dr, dc in _NEIGHBOR_OFFSETS:
            nb = Coord(r + dr, c + dc)
            if nb in coord_index:
                out.append(coord_index[nb])
        return out

    x_checks = []
    for r in range(0, span, 2):
        for c in range(1, span, 2):
            support = check_support(Coord(r, c))
            x_checks.append(
                (Coord(r, c), pauli.pauli_from_support(n, xs=support))
            )
    z_checks = []
    for r in range(1, span, 2):
        for c in range(0, span, 2):
            support = check_support(Coord(r, c))
            z_checks.append(
                (Coord(r, c), pauli.pauli_from_support(n, zs=support))
            )

    logical_z = pauli.pauli_from_support(
        n, zs=[coord_index[Coord(0, c)] for c in range(0, span, 2)]
    )
    logical_x = pauli.pauli_from_support(
        n, xs=[coord_index[Coord(r, 0)] for r in range(0, span, 2)]
    )

    stabilizer_span = pauli.span_from_generators(
        n, [p for _, p in x_checks] + [p for _, p in z_checks]
    )

    return PlanarCode(
        d=d,
        n=n,
        data_coords=data_coords,
        x_checks=tuple(x_checks),
        z_checks=tuple(z_checks),
        logical_x=logical_x,
        logical_z=logical_z,
        stabilizer_span=stabilizer_span,
        coord_index=coord_index,
    )


def syndrome(code: PlanarCode, error: PauliOp) -> tuple[int, ...]:
    """Bit i is 1 iff the error anticommutes with check i.

    Check ordering: all X-checks in construction order, then all Z-checks.
    """
    if error.n != code.n:
        raise ValueError("error qubit count mismatch")
    bits = []
    for _, g in code.x_checks:
        bits.append(0 if pauli.commutes(error, g) else 1)
    for _, g in code.z_checks:
        bits.append(0 if pauli.commutes(error, g) else 1)
    return tuple(bits)


def residual_class(
    code: PlanarCode, error: PauliOp, correction: PauliOp
) -> str:
    """Logical class of error * correction; "stabilizer" = decode success."""
    s_err = syndrome(code, error)
    s_cor = syndrome(code, correction)
    if s_err != s_cor:
        mismatch = next(i for i, (a, b) in enumerate(zip(s_err, s_cor)) if a != b)
        raise ValueError(
            f"syndrome mismatch between error and correction at check {mismatch}"
        )
    residual = pauli.multiply(error, correction)
    return pauli.logical_class(
        code.stabilizer_span, (code.logical_x, code.logical_z), residual
    )


def export_description(code: PlanarCode) -> str:
    """Stable text listing of qubits, check supports, and logicals."""
    lines = [f"planar_code d={code.d} n={code.n}"]
    for i, (r, c) in enumerate(code.data_coords):
        lines.append(f"data {i} {r} {c}")
    for kind, checks in (("x_check", code.x_checks), ("z_check", code.z_checks)):
        for (r, c), op in checks:
            support = " ".join(str(q) for q in op.support())
            lines.append(f"{kind} {r} {c} {support}")
    lines.append(
        "logical_x " + " ".join(str(q) for q in code.logical_x.support())
    )
    lines.append(
        "logical_z " + " ".join(str(q) for q in code.logical_z.support())
    )
    return "\n".join(lines) + "\n"
