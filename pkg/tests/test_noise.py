"""Unit tests for the correlated noise-model families."""

from __future__ import annotations

import numpy as np
import pytest

from corrsurf import lattice, noise, pauli


@pytest.fixture(scope="module")
def code3():
    return lattice.build_planar_code(3)


@pytest.fixture(scope="module")
def code5():
    return lattice.build_planar_code(5)


def test_iid_mechanism_count(code3):
    model = noise.build_iid_z(code3, 0.1)
    assert len(model.mechanisms) == 13
    for mech in model.mechanisms:
        assert mech.pauli.weight() == 1
        assert 1 <= len(mech.detectors) <= 2


@pytest.mark.parametrize(
    "d,k,expected",
    [
        (3, 2, 3 * 2 + 2 * 1),
        (3, 3, 3 * 1 + 2 * 0),
        (5, 2, 5 * 4 + 4 * 3),
        (5, 3, 5 * 3 + 4 * 2),
        (9, 3, 9 * 7 + 8 * 6),
    ],
)
def test_type1_mechanism_count(d, k, expected):
    code = lattice.build_planar_code(d)
    model = noise.build_type1(code, k, 0.05)
    assert len(model.mechanisms) == expected


@pytest.mark.parametrize("d,expected", [(3, 16), (5, 4 * 16)])
def test_type2_mechanism_count(d, expected):
    code = lattice.build_planar_code(d)
    model = noise.build_type2(code, 0.05)
    assert len(model.mechanisms) == expected
    for mech in model.mechanisms:
        (r1, c1), (r2, c2) = [
            code.data_coords[q] for q in mech.pauli.support()
        ]
        assert abs(r1 - r2) == 1 and abs(c1 - c2) == 1


def test_type1_rejects_bad_k(code3):
    with pytest.raises(ValueError):
        noise.build_type1(code3, 1, 0.1)
    with pytest.raises(ValueError):
        noise.build_type1(code3, 4, 0.1)


def test_probability_range(code3):
    with pytest.raises(ValueError):
        noise.build_iid_z(code3, 1.5)


def test_detectors_match_syndrome(code5):
    model = noise.build_type1(code5, 2, 0.1)
    for mech in model.mechanisms:
        bits = lattice.syndrome(code5, mech.pauli)
        assert mech.detectors == {i for i, b in enumerate(bits) if b}
        assert 1 <= len(mech.detectors) <= 2


def test_full_row_line_is_logical(code3):
    # k = d lines are logicals: zero syndrome, anticommute with logical X
    op = code3.z_on((0, 0), (0, 2), (0, 4))
    assert not any(lattice.syndrome(code3, op))
    assert not pauli.commutes(op, code3.logical_x)


def test_parity_merge_of_duplicate_paulis(code3):
    ops = [code3.z_on((0, 0)), code3.z_on((0, 0))]
    model = noise._build(
        code3, ops, 0.1, noise.ModelDescriptor("type1", 3, 0.1, k=2)
    )
    assert len(model.mechanisms) == 1
    assert model.mechanisms[0].probability == pytest.approx(2 * 0.1 * 0.9)


def test_sample_reproducible(code3):
    model = noise.build_type2(code3, 0.2)
    a = noise.sample(model, np.random.default_rng(5))
    b = noise.sample(model, np.random.default_rng(5))
    assert a == b


def test_sample_zero_probability(code3):
    model = noise.build_iid_z(code3, 0.0)
    assert noise.sample(model, np.random.default_rng(0)).is_identity


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_decompose_type2_two_components(d):
    model = noise.build_type2(lattice.build_planar_code(d), 0.1)
    subs = noise.decompose_by_components(model)
    assert len(subs) == 2
    supports = [s.detector_support() for s in subs]
    assert not (supports[0] & supports[1])
    assert sum(len(s.mechanisms) for s in subs) == len(model.mechanisms)


@pytest.mark.parametrize("d", [5, 7, 9])
def test_decompose_type1_k2_four_components(d):
    model = noise.build_type1(lattice.build_planar_code(d), 2, 0.1)
    subs = noise.decompose_by_components(model)
    assert len(subs) == 4
    for i, a in enumerate(subs):
        for b in subs[i + 1 :]:
            assert not (a.detector_support() & b.detector_support())


def test_decompose_rejects_iid(code3):
    with pytest.raises(ValueError, match="family"):
        noise.decompose_by_components(noise.build_iid_z(code3, 0.1))


def test_virtual_qubit_pairing_type2(code3):
    model = noise.build_type2(code3, 0.1)
    subs = noise.decompose_by_components(model)
    for sub in subs:
        for vq in noise.virtual_qubit_map(sub):
            assert len(vq.mechanisms) in (1, 2)
            if len(vq.mechanisms) == 2:
                # paired diagonals differ by a plaquette
                product = pauli.multiply(
                    vq.mechanisms[0].pauli, vq.mechanisms[1].pauli
                )
                assert pauli.in_span(product, code3.stabilizer_span)
                assert vq.effective_probability == pytest.approx(
                    2 * 0.1 * (1 - 0.1)
                )


def test_virtual_qubit_singletons_type1_k3():
    code = lattice.build_planar_code(9)
    model = noise.build_type1(code, 3, 0.07)
    for sub in noise.decompose_by_components(model):
        for vq in noise.virtual_qubit_map(sub):
            assert len(vq.mechanisms) == 1
            assert vq.effective_probability == pytest.approx(0.07)


def test_virtual_qubit_structural_failure(code3):
    # Hand-built model: two mechanisms share detectors but differ by a
    # logical, which must be flagged as a structural failure.
    ops = [
        code3.z_on((0, 0)),
        code3.z_on((0, 2), (0, 4)),  # same syndrome {X(0,1)}, logical apart
    ]
    model = noise._build(
        code3, ops, 0.1, noise.ModelDescriptor("type2", 3, 0.1)
    )
    with pytest.raises(ValueError, match="structural failure"):
        noise.virtual_qubit_map(model)


def test_dem_text(code3):
    model = noise.build_iid_z(code3, 0.125)
    text = noise.model_to_dem_text(model)
    lines = text.strip().split("\n")
    assert len(lines) == 13
    assert lines[0].startswith("error(0.125) D")
    assert any("L0" in line for line in lines)


def test_build_from_config(code3):
    model = noise.build_from_config(
        code3, {"family": "type1", "d": 3, "k": 2, "p": 0.05}
    )
    assert model.descriptor.family == "type1"
    assert model.descriptor.k == 2
    with pytest.raises(ValueError, match="unknown"):
        noise.build_from_config(code3, {"family": "bogus", "p": 0.1})
