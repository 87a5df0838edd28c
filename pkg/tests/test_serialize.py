import json
import math

import numpy as np
import pytest

from chicap import Ensemble, HConstraint, identity_channel, solve_capacity
from chicap import serialize
from chicap.counterexample import gap_report
from chicap.rand import random_channel, random_ensemble, random_stochastic_matrix


class TestMatrixRoundtrip:
    def test_complex_matrix(self):
        m = np.array([[1.0 + 2.0j, 0.5], [-0.5j, 0.25]])
        assert np.allclose(serialize.matrix_from_json(serialize.matrix_to_json(m)), m)


class TestChannelRoundtrip:
    def test_kraus_channel(self):
        rng = np.random.default_rng(0)
        phi = random_channel(3, 3, rng)
        back = serialize.channel_from_dict(serialize.channel_to_dict(phi))
        assert back.dim_in == 3 and back.dim_out == 3
        from chicap import apply
        from chicap.rand import random_state

        rho = random_state(3, rng)
        assert np.allclose(apply(back, rho), apply(phi, rho), atol=1e-12)

    def test_classical_channel(self):
        rng = np.random.default_rng(1)
        t = random_stochastic_matrix(2, 3, rng)
        phi = serialize.channel_from_dict(
            serialize.channel_to_dict(__import__("chicap").classical_channel(t))
        )
        assert np.allclose(phi.stochastic_matrix(), t)

    def test_rejects_both_representations(self):
        with pytest.raises(ValueError):
            serialize.channel_from_dict(
                {"dim_in": 1, "dim_out": 1, "kraus": [], "stochastic": [[1.0]]}
            )

    def test_rejects_neither_representation(self):
        with pytest.raises(ValueError):
            serialize.channel_from_dict({"dim_in": 1, "dim_out": 1})


class TestEnsembleRoundtrip:
    def test_roundtrip(self):
        rng = np.random.default_rng(2)
        pi = random_ensemble(3, 4, rng)
        back = serialize.ensemble_from_dict(serialize.ensemble_to_dict(pi))
        assert np.allclose(back.weights, pi.weights)
        for a, b in zip(back.states, pi.states):
            assert np.allclose(a, b)

    def test_state_validation_rejects_nonstate(self):
        from chicap.errors import NonState

        data = {"weights": [1.0], "states": [serialize.matrix_to_json(np.eye(2))]}
        with pytest.raises(NonState):
            serialize.ensemble_from_dict(data)
        # Unnormalized atoms are fine when validation is off.
        serialize.ensemble_from_dict(data, validate_states=False)


class TestConstraintRoundtrip:
    def test_roundtrip(self):
        h = HConstraint([0.0, 1.0, 2.5], 1.25)
        back = serialize.constraint_from_dict(serialize.constraint_to_dict(h))
        assert np.allclose(back.energies, h.energies)
        assert back.bound == h.bound


class TestDeterministicDumps:
    def test_byte_identical(self):
        obj = {"a": 1.0 / 3.0, "b": [1, 2.5, math.inf], "c": {"d": True}}
        assert serialize.dumps(obj) == serialize.dumps(obj)

    def test_infinity_marker(self):
        text = serialize.dumps({"gap": math.inf})
        assert '"inf"' in text
        assert json.loads(text)["gap"] == "inf"

    def test_parseable_and_precise(self):
        x = 0.1234567890123456789
        text = serialize.dumps({"x": x})
        assert json.loads(text)["x"] == x

    def test_trailing_newline(self):
        assert serialize.dumps({}).endswith("\n")


class TestCsv:
    def test_trace_csv(self):
        report = solve_capacity(identity_channel(2))
        text = serialize.trace_to_csv(report)
        lines = text.strip().split("\n")
        assert lines[0] == "iter,chi,gap,mean_energy,support_size"
        assert len(lines) == len(report.trace) + 1
        assert "\r" not in text

    def test_counterexample_csv(self):
        report = gap_report(100)
        text = serialize.counterexample_to_csv(report.points)
        lines = text.strip().split("\n")
        assert lines[0] == "n,q_n,h_value,one_minus_h,residual"
        assert len(lines) == len(report.points) + 1

    def test_report_dict_has_trace(self):
        report = solve_capacity(identity_channel(2))
        d = serialize.report_to_dict(report)
        assert d["chi_value"] == report.chi_value
        assert len(d["trace"]) == len(report.trace)
        # Must serialize without error, including the ensemble block.
        serialize.dumps(d)
