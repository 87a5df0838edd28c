import math

import numpy as np
import pytest

from chicap import (
    Ensemble,
    Projector,
    barycenter,
    chi,
    chi_truncated,
    discretize,
    donald_residual,
    identity_channel,
    purify_ensemble,
)
from chicap.channel import classical_channel
from chicap.ensemble import chi_truncated_expanded
from chicap.errors import DimensionMismatch, EmptyEnsemble, InvalidResolution
from chicap.rand import random_channel, random_ensemble, random_state

from oracles import mutual_information, xlog2x


def _pure(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


class TestEnsembleValidation:
    def test_empty(self):
        with pytest.raises(EmptyEnsemble):
            Ensemble(np.array([]), ())

    def test_weight_sum(self):
        with pytest.raises(ValueError):
            Ensemble([0.5, 0.6], (np.eye(2) / 2, np.eye(2) / 2))

    def test_nonpositive_weight(self):
        with pytest.raises(ValueError):
            Ensemble([1.0, 0.0], (np.eye(2) / 2, np.eye(2) / 2))

    def test_mixed_dims(self):
        with pytest.raises(DimensionMismatch):
            Ensemble([0.5, 0.5], (np.eye(2) / 2, np.eye(3) / 3))


class TestChi:
    def test_noiseless_orthogonal(self):
        pi = Ensemble([0.5, 0.5], (_pure([1, 0]), _pure([0, 1])))
        assert chi(identity_channel(2), pi) == pytest.approx(1.0, abs=1e-12)

    def test_single_atom_is_zero(self):
        rng = np.random.default_rng(1)
        pi = Ensemble([1.0], (random_state(3, rng),))
        assert chi(identity_channel(3), pi) == pytest.approx(0.0, abs=1e-10)

    def test_matches_mutual_information_for_classical(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            t = np.array([[0.8, 0.3, 0.1], [0.1, 0.6, 0.2], [0.1, 0.1, 0.7]])
            p = rng.dirichlet(np.ones(3))
            phi = classical_channel(t)
            pi = Ensemble(p, tuple(_pure(np.eye(3)[:, i]) for i in range(3)))
            assert chi(phi, pi) == pytest.approx(
                mutual_information(t, p), abs=1e-10
            )

    def test_nonnegative(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            phi = random_channel(3, 3, rng)
            pi = random_ensemble(3, 4, rng)
            assert chi(phi, pi) >= -1e-12


class TestChiTruncated:
    def test_full_rank_equals_chi(self):
        rng = np.random.default_rng(4)
        phi = random_channel(4, 4, rng)
        pi = random_ensemble(4, 3, rng)
        p = Projector.identity(4)
        assert chi_truncated(phi, pi, p) == pytest.approx(chi(phi, pi), abs=1e-10)

    def test_rank_one_scalar_value(self):
        # On a rank-one projector each compressed output is the scalar
        # a_i = <e|Phi(rho_i)|e>, and the truncated chi reduces to
        # sum_i w_i a_i log2 a_i - a_bar log2 a_bar.
        rng = np.random.default_rng(5)
        phi = random_channel(3, 3, rng)
        pi = random_ensemble(3, 3, rng)
        p = Projector.standard_basis(3, [0])
        from chicap import apply

        a = [float(np.real(apply(phi, s)[0, 0])) for s in pi.states]
        a_bar = float(np.dot(pi.weights, a))
        expected = sum(w * xlog2x(ai) for w, ai in zip(pi.weights, a)) - xlog2x(a_bar)
        assert chi_truncated(phi, pi, p) == pytest.approx(expected, abs=1e-10)
        assert expected > 0.0  # generically positive even at rank one

    def test_rank_one_equal_traces_gives_zero(self):
        # When all compressed traces coincide the rank-one value vanishes.
        pi = Ensemble([0.5, 0.5], (np.diag([0.4, 0.6]), np.diag([0.4, 0.6])))
        p = Projector.standard_basis(2, [0])
        assert chi_truncated(identity_channel(2), pi, p) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_monotone_in_nested_chain(self):
        rng = np.random.default_rng(6)
        dim = 8
        phi = random_channel(dim, dim, rng)
        pi = random_ensemble(dim, 4, rng)
        values = [
            chi_truncated(phi, pi, Projector.standard_basis(dim, list(range(r))))
            for r in range(1, dim + 1)
        ]
        assert all(values[i + 1] >= values[i] - 1e-12 for i in range(dim - 1))
        assert values[-1] == pytest.approx(chi(phi, pi), abs=1e-10)

    def test_forms_agree(self):
        rng = np.random.default_rng(7)
        phi = random_channel(5, 5, rng)
        pi = random_ensemble(5, 3, rng)
        p = Projector.standard_basis(5, [0, 2, 4])
        assert chi_truncated(phi, pi, p) == pytest.approx(
            chi_truncated_expanded(phi, pi, p), abs=1e-10
        )


class TestDonald:
    def test_residual_small(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            pi = random_ensemble(4, 3, rng)
            sigma = random_state(4, rng)
            assert donald_residual(pi, sigma) <= 1e-9
            phi = random_channel(4, 4, rng)
            assert donald_residual(pi, sigma, phi) <= 1e-9

    def test_infinite_both_sides(self):
        pi = Ensemble([1.0], (np.diag([1.0, 0.0]).astype(complex),))
        sigma = np.diag([0.0, 1.0]).astype(complex)
        assert donald_residual(pi, sigma) == 0.0


class TestPurify:
    def test_barycenter_preserved(self):
        rng = np.random.default_rng(9)
        pi = random_ensemble(4, 3, rng)
        pure = purify_ensemble(pi)
        assert np.abs(barycenter(pure) - barycenter(pi)).max() <= 1e-12

    def test_atoms_are_pure(self):
        rng = np.random.default_rng(10)
        pure = purify_ensemble(random_ensemble(3, 2, rng))
        for s in pure.states:
            assert np.trace(s @ s).real == pytest.approx(1.0, abs=1e-10)

    def test_chi_never_decreases(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            phi = random_channel(3, 3, rng)
            pi = random_ensemble(3, 3, rng)
            assert chi(phi, purify_ensemble(pi)) >= chi(phi, pi) - 1e-10

    def test_already_pure_unchanged_values(self):
        pi = Ensemble([0.5, 0.5], (_pure([1, 0]), _pure([0, 1])))
        pure = purify_ensemble(pi)
        assert len(pure) == 2
        assert np.allclose(sorted(pure.weights), [0.5, 0.5])


class TestDiscretize:
    def _clustered_measure(self, rng, dim, n_atoms, n_centers, spread):
        centers = [random_state(dim, rng) for _ in range(n_centers)]
        weights = rng.dirichlet(np.ones(n_atoms))
        states = []
        for _ in range(n_atoms):
            c = centers[int(rng.integers(n_centers))]
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            pert = g @ g.conj().T
            pert /= np.trace(pert).real
            states.append((1 - spread) * c + spread * pert)
        return Ensemble(weights, tuple(states))

    def test_barycenter_preserved(self):
        rng = np.random.default_rng(12)
        mu = self._clustered_measure(rng, 3, 400, 5, 1e-4)
        for n in (2, 5, 10):
            red = discretize(mu, n)
            assert np.abs(barycenter(red) - barycenter(mu)).max() <= 1e-12

    def test_atom_count_shrinks(self):
        rng = np.random.default_rng(13)
        mu = self._clustered_measure(rng, 3, 400, 5, 1e-4)
        red = discretize(mu, 5)
        assert len(red) < len(mu)

    def test_lipschitz_average_bound(self):
        # For an L-Lipschitz function (trace norm), cells of diameter < 1/n
        # plus the merged remainder of mass < 1/n bound the averaging error
        # by L/n + 2 sup|f| / n.
        rng = np.random.default_rng(14)
        dim = 3
        mu = self._clustered_measure(rng, dim, 300, 6, 1e-3)
        a = random_state(dim, rng)

        def f(s):  # 1-Lipschitz in trace norm, |f| <= 1
            return float(np.real(np.trace(a @ s)))

        for n in (2, 5, 10):
            red = discretize(mu, n)
            exact = sum(w * f(s) for w, s in zip(mu.weights, mu.states))
            approx = sum(w * f(s) for w, s in zip(red.weights, red.states))
            assert abs(exact - approx) <= 1.0 / n + 2.0 / n + 1e-12

    def test_invalid_resolution(self):
        rng = np.random.default_rng(15)
        with pytest.raises(InvalidResolution):
            discretize(random_ensemble(2, 3, rng), 0)

    def test_single_cell_when_everything_close(self):
        rho = np.eye(2).astype(complex) / 2
        mu = Ensemble(
            np.full(10, 0.1), tuple(rho + 0.0 * rho for _ in range(10))
        )
        red = discretize(mu, 3)
        assert len(red) == 1
        assert np.allclose(red.states[0], rho)
