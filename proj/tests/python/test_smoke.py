import json
import math

import numpy as np
import pytest

import akim


def test_gate_matches_definition():
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    cz = np.diag([1, 1, 1, -1])
    g0, g1 = 0.3, 1.9
    p = np.kron(np.diag([1, np.exp(1j * g0)]), np.diag([1, np.exp(1j * g1)]))
    assert np.allclose(akim.build_gate(g0, g1), p @ cz @ np.kron(h, h), atol=1e-15)


def test_duality_checks():
    assert akim.check_2du(1.1, 2.3)["pass"]
    zero = np.array([1, 0], dtype=complex)
    assert akim.check_sic(zero, zero, 0.4, 2.0)["pass"]
    a, b = akim.parse_dimer("case-a:theta=0.3")
    assert akim.check_sec(a, b, 0.0, 0.7)["residual"] < 1e-10
    assert akim.check_clifford(akim.build_gate(0.0, math.pi / 2))
    assert not akim.check_clifford(akim.build_gate(math.pi / 4, 0.0))


def test_quench_paths_agree():
    psi = akim.parse_state("bloch:0.3,1,2,0.5", 4)
    zero = np.array([1, 0], dtype=complex)
    ch = akim.Channel(4, 1.1, 2.3)
    rho = np.outer(psi, psi.conj())
    for t in (1, 2):
        rho = ch.apply(rho)
        oracle = akim.quench_oracle(4, psi, zero, zero, 1.1, 2.3, t)
        im = akim.rdm_via_im(psi, t, 1.1, 2.3)
        assert np.abs(rho - oracle).max() < 1e-9
        assert np.abs(im - oracle).max() < 1e-9


def test_entanglement_ramp():
    psi = akim.parse_state("case-a:theta=0", 8)
    r = akim.trajectory(8, 0.0, 0.7, psi, 6, "min(2t,N_A)")
    assert np.allclose(r["entropy"], [0, 2, 4, 6, 8, 8, 8], atol=1e-8)
    assert all(r["flat"])


def test_channel_spectrum_and_identity():
    spec = akim.Channel(4, 0.0, 0.7).spectrum()
    assert len(spec["eigenvalues"]) == 256
    assert spec["fixed_dimension"] == 1
    k, res, before, dim = akim.finite_time_identity("b", 4, math.pi / 2, math.pi / 2)
    assert (k, dim) == (3, 8) and res < 1e-10 and before > 1e-6


def test_sff_and_coe():
    mean, err = akim.sff(4, "random", samples=3, seed=1, t_max=5)
    assert mean[0] == 256.0
    assert len(err) == 6
    assert akim.coe_reference(1, 8) == pytest.approx(2 - math.log(1 + 2 / 256), rel=1e-15)


def test_stabilizers():
    rho = np.diag([0.5, 0.5, 0, 0]).astype(complex)
    s = akim.stabilizer_decomposition(rho)
    assert s["labels"] == ["+ZI"]
    assert s["operator_entanglement"][0][0] < 1e-12


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        akim.parse_angle("pie")
    with pytest.raises(OverflowError):
        akim.sff(12, samples=1, t_max=1)


def test_cli_in_process(tmp_path):
    assert akim.run(["gate", "--g0", "0.5pi", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "pass"
    assert akim.run(["gate", "--nope"]) == 2
