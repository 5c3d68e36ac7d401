"""Unit tests for the bit-mask Pauli algebra and GF(2) span tools."""

from __future__ import annotations

import pytest

from corrsurf import pauli
from corrsurf.pauli import PauliOp


def test_pauli_validation():
    with pytest.raises(ValueError):
        PauliOp(2, 4, 0)
    with pytest.raises(ValueError):
        PauliOp(-1, 0, 0)


def test_weight_and_support():
    op = pauli.pauli_from_support(5, xs=[0, 3], zs=[3, 4])
    assert op.weight() == 3
    assert op.support() == (0, 3, 4)
    assert str(op) == "XIIYZ"


@pytest.mark.parametrize(
    "a,b,expected",
    [
        # single-qubit X vs Z anticommute
        (((0,), ()), ((), (0,)), False),
        # X vs X commute
        (((0,), ()), ((0,), ()), True),
        # XX vs ZZ commute (two anticommuting factors)
        (((0, 1), ()), ((), (0, 1)), True),
        # Y vs X on same qubit anticommute
        (((0,), (0,)), ((0,), ()), False),
        # disjoint supports commute
        (((0,), ()), ((), (1,)), True),
    ],
)
def test_commutes(a, b, expected):
    pa = pauli.pauli_from_support(2, xs=a[0], zs=a[1])
    pb = pauli.pauli_from_support(2, xs=b[0], zs=b[1])
    assert pauli.commutes(pa, pb) is expected
    assert pauli.commutes(pb, pa) is expected


def test_multiply_is_xor():
    a = pauli.pauli_from_support(3, xs=[0, 1])
    b = pauli.pauli_from_support(3, xs=[1, 2], zs=[0])
    ab = pauli.multiply(a, b)
    assert ab.x_mask == 0b101
    assert ab.z_mask == 0b001
    assert pauli.multiply(a, a).is_identity


def test_qubit_count_mismatch():
    with pytest.raises(ValueError):
        pauli.commutes(pauli.identity(2), pauli.identity(3))


def test_span_rank_and_membership():
    gens = [
        pauli.pauli_from_support(4, zs=[0, 1]),
        pauli.pauli_from_support(4, zs=[1, 2]),
        pauli.pauli_from_support(4, zs=[0, 2]),  # dependent
    ]
    span = pauli.span_from_generators(4, gens)
    assert span.rank == 2
    assert pauli.in_span(pauli.pauli_from_support(4, zs=[0, 2]), span)
    assert not pauli.in_span(pauli.pauli_from_support(4, zs=[0]), span)
    assert pauli.in_span(pauli.identity(4), span)


def test_span_elements_enumeration():
    gens = [
        pauli.pauli_from_support(3, zs=[0]),
        pauli.pauli_from_support(3, zs=[1]),
    ]
    span = pauli.span_from_generators(3, gens)
    elements = {(e.x_mask, e.z_mask) for e in span.elements()}
    assert elements == {(0, 0), (0, 1), (0, 2), (0, 3)}


def test_span_intersection():
    a = pauli.span_from_generators(
        3,
        [
            pauli.pauli_from_support(3, zs=[0]),
            pauli.pauli_from_support(3, zs=[1]),
        ],
    )
    b = pauli.span_from_generators(
        3,
        [
            pauli.pauli_from_support(3, zs=[0, 1]),
            pauli.pauli_from_support(3, zs=[2]),
        ],
    )
    inter = pauli.span_intersection(a, b)
    assert inter.rank == 1
    assert pauli.in_span(pauli.pauli_from_support(3, zs=[0, 1]), inter)


def test_centralizer_restricted():
    span = pauli.span_from_generators(
        2,
        [
            pauli.pauli_from_support(2, zs=[0]),
            pauli.pauli_from_support(2, zs=[1]),
        ],
    )
    probe = pauli.pauli_from_support(2, xs=[0])
    cent = pauli.centralizer_restricted(span, [probe])
    # Only Z on qubit 1 commutes with X on qubit 0.
    assert cent.rank == 1
    assert pauli.in_span(pauli.pauli_from_support(2, zs=[1]), cent)


@pytest.mark.parametrize(
    "rows,rhs,ncols,expected",
    [
        ([0b11, 0b10], [1, 1], 2, 0b10),  # x0^x1=1, x1=1
        ([0b1, 0b1], [1, 0], 1, None),  # inconsistent
        ([0b01], [1], 2, 0b01),
        ([], [], 3, 0),
    ],
)
def test_solve_gf2(rows, rhs, ncols, expected):
    assert pauli.solve_gf2(rows, rhs, ncols) == expected


def test_solve_gf2_verifies():
    rows = [0b1011, 0b0110, 0b1101]
    rhs = [1, 0, 1]
    sol = pauli.solve_gf2(rows, rhs, 4)
    assert sol is not None
    for row, b in zip(rows, rhs):
        assert (row & sol).bit_count() & 1 == b


def test_logical_class_classification():
    n = 2
    stab = pauli.span_from_generators(
        n, [pauli.pauli_from_support(n, zs=[0, 1])]
    )
    lx = pauli.pauli_from_support(n, xs=[0, 1])
    lz = pauli.pauli_from_support(n, zs=[0])
    assert pauli.logical_class(stab, (lx, lz), pauli.identity(n)) == "stabilizer"
    assert pauli.logical_class(stab, (lx, lz), lz) == "logical-z"
    assert pauli.logical_class(stab, (lx, lz), lx) == "logical-x"
    assert (
        pauli.logical_class(stab, (lx, lz), pauli.multiply(lx, lz))
        == "logical-y"
    )


def test_logical_class_rejects_nonzero_syndrome():
    n = 2
    stab = pauli.span_from_generators(
        n, [pauli.pauli_from_support(n, zs=[0, 1])]
    )
    lx = pauli.pauli_from_support(n, xs=[0, 1])
    lz = pauli.pauli_from_support(n, zs=[0])
    bad = pauli.pauli_from_support(n, xs=[0])  # anticommutes with Z0Z1
    with pytest.raises(ValueError, match="generator 0"):
        pauli.logical_class(stab, (lx, lz), bad)
