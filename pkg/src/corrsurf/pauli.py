"""n-qubit Pauli operators modulo phase, with GF(2) group-span algebra.

A Pauli is a pair of packed bit masks (x_mask, z_mask) stored as Python
integers; bit i of x_mask is set when an X component acts on qubit i, and
likewise for z_mask. Phases are deliberately not tracked: syndromes and
coset classifications are phase-insensitive.

Spans of commuting-or-not Pauli sets are handled as GF(2) row spaces of
the concatenated 2n-bit vectors (x_mask | z_mask << n), reduced by
deterministic Gaussian elimination with lowest-set-bit pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class PauliOp:
    """An n-qubit Pauli modulo phase."""

    n: int
    x_mask: int
    z_mask: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"mask out of range for n={self.n}")

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def support(self) -> tuple[int, ...]:
        mask = self.x_mask | self.z_mask
        return tuple(i for i in range(self.n) if (mask >> i) & 1)

    def __str__(self) -> str:
        chars = []
        for i in range(self.n):
            x = (self.x_mask >> i) & 1
            z = (self.z_mask >> i) & 1
            chars.append("IXZY"[x + 2 * z] if x + 2 * z != 3 else "Y")
        return "".join(chars)


def identity(n: int) -> PauliOp:
    return PauliOp(n, 0, 0)


def pauli_from_support(
    n: int, xs: Iterable[int] = (), zs: Iterable[int] = ()
) -> PauliOp:
    """Build a Pauli from lists of qubit indices carrying X / Z components."""
    xm = 0
    for i in xs:
        xm |= 1 << i
    zm = 0
    for i in zs:
        zm |= 1 << i
    return PauliOp(n, xm, zm)


def _check_same_n(a: PauliOp, b: PauliOp) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} != {b.n}")


def commutes(a: PauliOp, b: PauliOp) -> bool:
    """True iff the binary symplectic product of a and b vanishes."""
    _check_same_n(a, b)
    parity = ((a.x_mask & b.z_mask).bit_count() + (a.z_mask & b.x_mask).bit_count()) & 1
    return parity == 0


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    """Phase-free product: component-wise XOR of the masks."""
    _check_same_n(a, b)
    return PauliOp(a.n, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)


def _to_row(op: PauliOp) -> int:
    return op.x_mask | (op.z_mask << op.n)


def _from_row(n: int, row: int) -> PauliOp:
    mask = (1 << n) - 1
    return PauliOp(n, row & mask, row >> n)


def _reduce_rows(rows: Iterable[int]) -> dict[int, int]:
    """Gaussian elimination over GF(2); returns {pivot_bit: row}.

    Pivot is the lowest set bit of each reduced row; rows are processed in
    input order, so the resulting basis is reproducible.
    """
    pivots: dict[int, int] = {}
    for row in rows:
        row = _reduce_against(row, pivots)
        if row:
            pivots[row & -row] = row
    return pivots


def _reduce_against(row: int, pivots: dict[int, int]) -> int:
    while row:
        low = row & -row
        if low not in pivots:
            return row
        row ^= pivots[low]
    return 0


@dataclass(frozen=True)
class GroupSpan:
    """A GF(2)-independent generating set for a group of Paulis mod phase."""

    n: int
    basis: tuple[PauliOp, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def elements(self) -> Iterable[PauliOp]:
        """All 2^rank elements; only for small spans."""
        if self.rank > 24:
            raise ValueError("span too large to enumerate")
        for bits in range(1 << self.rank):
            acc = 0
            i = 0
            b = bits
            while b:
                if b & 1:
                    acc ^= _to_row(self.basis[i])
                i += 1
                b >>= 1
            yield _from_row(self.n, acc)


def span_from_generators(n: int, generators: Sequence[PauliOp]) -> GroupSpan:
    """Reduce a generating set to an independent basis."""
    for g in generators:
        if g.n != n:
            raise ValueError("generator qubit count mismatch")
    pivots = _reduce_rows(_to_row(g) for g in generators)
    basis = tuple(_from_row(n, pivots[p]) for p in sorted(pivots))
    return GroupSpan(n, basis)


def in_span(op: PauliOp, span: GroupSpan) -> bool:
    """True iff op is a GF(2) combination of the span's basis."""
    if op.n != span.n:
        raise ValueError("qubit count mismatch")
    pivots = _reduce_rows(_to_row(b) for b in span.basis)
    return _reduce_against(_to_row(op), pivots) == 0


def span_intersection(a: GroupSpan, b: GroupSpan) -> GroupSpan:
    """Basis of the intersection of two spans (Zassenhaus construction).

    Rows [v | v] for v in a and [w | 0] for w in b are reduced together;
    reduced rows whose left block vanished carry intersection elements in
    the right block.
    """
    if a.n != b.n:
        raise ValueError("qubit count mismatch")
    width = 2 * a.n
    stacked = [(_to_row(v) << width) | _to_row(v) for v in a.basis]
    stacked += [_to_row(w) << width for w in b.basis]

    # Eliminate on the high (left) block first so that rows with zero left
    # block are fully reduced intersection representatives.
    pivots: dict[int, int] = {}
    low_mask = (1 << width) - 1
    intersection_rows = []
    for row in stacked:
        while row >> width:
            high = row >> width
            piv = high & -high
            if piv not in pivots:
                pivots[piv] = row
                row = 0
                break
            row ^= pivots[piv]
        if row & low_mask:
            intersection_rows.append(row & low_mask)
    basis_pivots = _reduce_rows(intersection_rows)
    basis = tuple(_from_row(a.n, basis_pivots[p]) for p in sorted(basis_pivots))
    return GroupSpan(a.n, basis)


def centralizer_restricted(
    span: GroupSpan, generators: Sequence[PauliOp]
) -> GroupSpan:
    """Sub-span of `span` commuting with every generator.

    Kernel of the symplectic-product map from span coefficients to
    commutation parities, mapped back to Pauli products.
    """
    for g in generators:
        if g.n != span.n:
            raise ValueError("qubit count mismatch")
    r = span.rank
    if r == 0:
        return span
    # Column j of the parity system describes basis element j.
    rows = []
    for g in generators:
        row = 0
        for j, bvec in enumerate(span.basis):
            if not commutes(bvec, g):
                row |= 1 << j
        rows.append(row)
    kernel = _kernel_basis(rows, r)
    out = []
    for coeffs in kernel:
        acc = 0
        for j in range(r):
            if (coeffs >> j) & 1:
                acc ^= _to_row(span.basis[j])
        out.append(_from_row(span.n, acc))
    return span_from_generators(span.n, out)


def _kernel_basis(rows: Sequence[int], ncols: int) -> list[int]:
    """Kernel of a GF(2) matrix given as bit-mask rows over ncols columns."""
    pivots: dict[int, int] = {}  # pivot column bit -> reduced row
    for row in rows:
        row = _reduce_against(row, pivots)
        if row:
            pivots[row & -row] = row
    pivot_bits = set(pivots)
    kernel = []
    for j in range(ncols):
        col_bit = 1 << j
        if col_bit in pivot_bits:
            continue
        # Free column: back-substitute a kernel vector with coeff j = 1.
        vec = col_bit
        for piv in sorted(pivots, reverse=True):
            row = pivots[piv]
            if (row & vec).bit_count() & 1:
                vec ^= piv
        kernel.append(vec)
    return kernel


def solve_gf2(rows: Sequence[int], rhs: Sequence[int], ncols: int) -> int | None:
    """Solve A c = b over GF(2); A given as bit-mask rows, b as 0/1 values.

    Returns one solution as a coefficient bit mask, or None if the system
    is inconsistent.
    """
    pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (row, rhs bit)
    for row, b in zip(rows, rhs):
        b &= 1
        while row:
            low = row & -row
            if low not in pivots:
                pivots[low] = (row, b)
                break
            prow, pb = pivots[low]
            row ^= prow
            b ^= pb
        else:
            if b:
                return None
    # Back-substitution, free variables set to 0.
    solution = 0
    for piv in sorted(pivots, reverse=True):
        row, b = pivots[piv]
        acc = b ^ ((row & solution).bit_count() & 1)
        if acc:
            solution |= piv
    return solution


LOGICAL_CLASSES = ("stabilizer", "logical-x", "logical-z", "logical-y")


def logical_class(
    code_stabilizers: GroupSpan,
    logicals: Sequence[PauliOp],
    residual: PauliOp,
) -> str:
    """Classify a zero-syndrome residual against the logical pair.

    `logicals` is (logical_x, logical_z). A residual anticommuting with
    logical_x only acts as a logical Z, and vice versa.
    """
    for idx, g in enumerate(code_stabilizers.basis):
        if not commutes(residual, g):
            raise ValueError(
                f"residual anticommutes with stabilizer generator {idx}"
            )
    logical_x, logical_z = logicals
    anti_x = not commutes(residual, logical_x)
    anti_z = not commutes(residual, logical_z)
    if anti_x and anti_z:
        return "logical-y"
    if anti_x:
        return "logical-z"
    if anti_z:
        return "logical-x"
    return "stabilizer"
