"""Unit tests for the syndrome-extraction circuit and frame simulator."""

from __future__ import annotations

import numpy as np
import pytest

from corrsurf import circuit, lattice, matching
from corrsurf.errors import ConfigError


@pytest.fixture(scope="module")
def code3():
    return lattice.build_planar_code(3)


@pytest.fixture(scope="module")
def noisy3(code3):
    circ = circuit.build_memory_circuit(code3, 3)
    return circuit.attach_noise(circ, 0.01, 0.005, "type1-k2")


def test_detector_counts(code3):
    circ = circuit.build_memory_circuit(code3, 3)
    x_dets = [d for d in circ.detectors if d.kind == "X"]
    z_dets = [d for d in circ.detectors if d.kind == "Z"]
    # X-checks: rounds+1 detectors each (prep + comparisons + final
    # reconstruction); Z-checks: rounds-1 (comparisons only)
    assert len(x_dets) == 6 * 4
    assert len(z_dets) == 6 * 2
    assert circ.num_measurements == 3 * 12 + 13
    assert len(circ.observable) == 3


def test_rounds_validation(code3):
    with pytest.raises(ConfigError):
        circuit.build_memory_circuit(code3, 0)


def test_schedule_single_gate_per_qubit_per_layer(code3):
    circ = circuit.build_memory_circuit(code3, 1)
    for ins in circ.instructions:
        if ins.name == "CX":
            assert len(set(ins.targets)) == len(ins.targets)


def test_noiseless_all_zero(code3):
    circ = circuit.build_memory_circuit(code3, 3)
    det, obs = circuit.pauli_frame_sample(circ, 10_000, np.random.default_rng(0))
    assert det.sum() == 0
    assert obs.sum() == 0


def test_attach_noise_zero_is_identity(code3):
    circ = circuit.build_memory_circuit(code3, 2)
    assert circuit.attach_noise(circ, 0.0, 0.0, "type1-k2") is circ


def test_attach_noise_validation(code3):
    circ = circuit.build_memory_circuit(code3, 2)
    with pytest.raises(ConfigError):
        circuit.attach_noise(circ, 0.6, 0.0, "none")
    with pytest.raises(ConfigError):
        circuit.attach_noise(circ, 0.01, 0.01, "bogus")


def test_correlated_annotation_rate(code3):
    circ = circuit.build_memory_circuit(code3, 2)
    noisy = circuit.attach_noise(circ, 0.004, 0.002, "type1-k2")
    corr = [i for i in noisy.instructions if i.name == "CORR_Z"]
    # 8 length-2 line mechanisms per round, each at p_cor
    assert len(corr) == 8 * 2
    assert all(i.arg == 0.002 for i in corr)


def test_depolarizing_fault_sites(code3):
    circ = circuit.build_memory_circuit(code3, 1)
    noisy = circuit.attach_noise(circ, 0.0015, 0.0, "none")
    sites = circuit.enumerate_faults(noisy)
    depol = [s for s in sites if s.kind == "depol2"]
    cx_pairs = sum(
        len(i.targets) // 2
        for i in noisy.instructions
        if i.name == "DEPOLARIZE2"
    )
    assert len(depol) == 15 * cx_pairs
    assert all(s.probability == pytest.approx(0.0015 / 15) for s in depol)


def test_single_data_z_symptom(noisy3, code3):
    # a lone Z between rounds fires the qubit's adjacent X-checks once
    sites = circuit.enumerate_faults(noisy3)
    interior = code3.data_index((2, 2))
    corner = code3.data_index((0, 0))
    for qubit, expected in ((interior, 2), (corner, 1)):
        fault = next(
            s for s in sites if s.kind == "z" and s.qubits == (qubit,)
        )
        det, obs = circuit.pauli_frame_sample(
            noisy3, 1, injections=[[fault.index]]
        )
        fired = np.nonzero(det[0])[0]
        assert len(fired) == expected
        for i in fired:
            assert noisy3.detectors[i].kind == "X"


def test_measurement_flip_symptom(noisy3):
    # an ancilla measurement flip fires the two detectors comparing it
    sites = circuit.enumerate_faults(noisy3)
    anc = noisy3.code.n  # first X-check ancilla
    fault = next(
        s for s in sites if s.kind == "meas" and s.qubits == (anc,)
    )
    det, obs = circuit.pauli_frame_sample(noisy3, 1, injections=[[fault.index]])
    fired = np.nonzero(det[0])[0]
    assert len(fired) == 2
    assert obs[0] == 0


def test_detector_linearity(noisy3):
    sites = circuit.enumerate_faults(noisy3)
    rng = np.random.default_rng(4)
    pairs = rng.integers(0, len(sites), size=(100, 2))
    inj = (
        [[int(a)] for a, _ in pairs]
        + [[int(b)] for _, b in pairs]
        + [[int(a), int(b)] for a, b in pairs]
    )
    det, obs = circuit.pauli_frame_sample(noisy3, 300, injections=inj)
    for i in range(100):
        assert np.array_equal(det[i] ^ det[100 + i], det[200 + i])
        assert (obs[i] ^ obs[100 + i]) == obs[200 + i]


def test_frame_sampling_reproducible(noisy3):
    a = circuit.pauli_frame_sample(noisy3, 100, np.random.default_rng(9))
    b = circuit.pauli_frame_sample(noisy3, 100, np.random.default_rng(9))
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


def test_extracted_mechanisms_are_matchable(noisy3):
    model = circuit.extract_mechanisms(noisy3)
    for mech in model.x_mechanisms + model.z_mechanisms:
        assert 1 <= len(mech.detectors) <= 2
        assert 0 < mech.probability < 0.5
    x_kinds = {noisy3.detectors[i].kind
               for m in model.x_mechanisms for i in m.detectors}
    z_kinds = {noisy3.detectors[i].kind
               for m in model.z_mechanisms for i in m.detectors}
    assert x_kinds == {"X"}
    assert z_kinds == {"Z"}
    # X faults never flip the X-basis observable
    assert not any(m.flips_observable for m in model.z_mechanisms)
    # hook-style faults leave space-like two-detector Z-graph edges
    assert any(len(m.detectors) == 2 for m in model.z_mechanisms)


def test_parity_merge_value():
    # two faults with identical symptom combine as q(1-q)+q(1-q)
    table = {}
    q = 0.01
    dets = frozenset({3, 7})
    circuit._merge_symptom(table, dets, q, False)
    circuit._merge_symptom(table, dets, q, False)
    assert table[(dets, False)] == pytest.approx(2 * q * (1 - q))
    # opposite observable action stays a separate mechanism
    circuit._merge_symptom(table, dets, q, True)
    assert table[(dets, True)] == pytest.approx(q)


def test_extracted_model_matches_frame_marginals(code3):
    """Mechanism Monte Carlo and direct frame sampling must agree."""
    circ = circuit.attach_noise(
        circuit.build_memory_circuit(code3, 3), 0.01, 0.01, "type2"
    )
    model = circuit.extract_mechanisms(circ)
    shots = 40_000
    det_frame, _ = circuit.pauli_frame_sample(
        circ, shots, np.random.default_rng(21)
    )
    rng = np.random.default_rng(22)
    det_mc = np.zeros((shots, circ.num_detectors), dtype=np.uint8)
    for mech in model.x_mechanisms + model.z_mechanisms:
        fired = rng.random(shots) < mech.probability
        for ddet in mech.detectors:
            det_mc[fired, ddet] ^= 1
    freq_frame = det_frame.mean(axis=0)
    freq_mc = det_mc.mean(axis=0)
    sigma = np.sqrt(np.maximum(freq_frame * (1 - freq_frame), 1e-9) / shots)
    assert np.all(np.abs(freq_frame - freq_mc) < 5 * sigma + 1e-4)


def test_subthreshold_distance_ordering():
    rates = {}
    for d in (3, 5):
        code = lattice.build_planar_code(d)
        circ = circuit.attach_noise(
            circuit.build_memory_circuit(code, d), 0.002, 0.002, "type1-k2"
        )
        model = circuit.extract_mechanisms(circ)
        decoder = matching.ComponentDecoder(
            matching.build_graph_from_mechanisms(
                model.x_mechanisms, circ.num_detectors
            )
        )
        det, obs = circuit.pauli_frame_sample(
            circ, 10_000, np.random.default_rng(31)
        )
        flips, _ = decoder.decode_batch(det)
        rates[d] = float(np.mean(flips ^ obs))
    assert rates[5] < rates[3]


def test_circuit_serialization(noisy3):
    text = circuit.circuit_to_text(noisy3)
    assert text.startswith("qubits 25\nrounds 3\n")
    assert "DETECTOR X 0 1 0 :" in text
    assert "OBSERVABLE :" in text
    assert "DEPOLARIZE2(0.01)" in text
    assert "CORR_Z(0.005)" in text


def test_dem_export(noisy3):
    model = circuit.extract_mechanisms(noisy3)
    text = circuit.model_to_dem_text(model)
    assert "# graph X" in text and "# graph Z" in text
    assert "L0" in text
