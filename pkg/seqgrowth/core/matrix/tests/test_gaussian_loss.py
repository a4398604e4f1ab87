import numpy as np
import pytest

from seqgrowth.core.base.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    NotPositiveDefiniteError,
)
from seqgrowth.core.matrix.gaussian_loss import (
    gaussian_loss,
    kl_gap,
    loss_gradient,
    loss_hessian_form,
    optimal_diagonal_init,
)
from seqgrowth.core.matrix.sym_matrix import SpdPair


def _loss_at(s, q):
    return gaussian_loss(s, SpdPair.from_matrix(q))


def test_loss_of_identity():
    s = np.diag([2.0, 3.0])
    assert gaussian_loss(s, SpdPair.identity(2)) == pytest.approx(5.0)


def test_loss_rejects_wrong_dimension(s4):
    with pytest.raises(DimensionMismatchError):
        gaussian_loss(s4, SpdPair.identity(3))


def test_loss_rejects_indefinite_q(s4):
    pair = SpdPair.identity(4)
    pair.q[0, 0] = -1.0
    with pytest.raises(NotPositiveDefiniteError):
        gaussian_loss(s4, pair)


def test_gradient_matches_central_differences(make_spd, s4):
    q = make_spd(4, seed=3)
    pair = SpdPair.from_matrix(q)
    gradient = loss_gradient(s4, pair).entries
    h = 1e-6
    numeric = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            direction = np.zeros((4, 4))
            direction[i, j] = direction[j, i] = 1.0
            plus = _loss_at(s4, q + h * direction)
            minus = _loss_at(s4, q - h * direction)
            derivative = (plus - minus) / (2 * h)
            # a symmetric off-diagonal perturbation moves both entries
            numeric[i, j] = numeric[j, i] = derivative if i == j else derivative / 2
    assert np.max(np.abs(numeric - gradient)) <= 1e-5


def test_hessian_form_matches_second_difference(make_spd, s4):
    q = make_spd(4, seed=5)
    pair = SpdPair.from_matrix(q)
    direction = np.zeros((4, 4))
    direction[0, 2] = direction[2, 0] = 1.0 / np.sqrt(2.0)
    h = 1e-4
    second = (
        _loss_at(s4, q + h * direction) - 2 * _loss_at(s4, q) + _loss_at(s4, q - h * direction)
    ) / h**2
    analytic = loss_hessian_form(pair, direction, direction)
    assert analytic == pytest.approx(second, rel=1e-4)
    r = pair.r
    assert analytic == pytest.approx(r[0, 0] * r[2, 2] + r[0, 2] ** 2)


def test_kl_gap_is_zero_at_the_inverse(s4):
    pair = SpdPair.from_matrix(np.linalg.inv(s4))
    assert kl_gap(s4, pair) == pytest.approx(0.0, abs=1e-10)


def test_kl_gap_is_the_loss_difference(make_spd, s4):
    pair = SpdPair.from_matrix(make_spd(4, seed=8))
    optimum = gaussian_loss(s4, SpdPair.from_matrix(np.linalg.inv(s4)))
    assert kl_gap(s4, pair) == pytest.approx(gaussian_loss(s4, pair) - optimum, abs=1e-10)
    assert kl_gap(s4, pair) > 0


def test_optimal_diagonal_init_zeroes_the_diagonal_gradient(s4):
    pair = optimal_diagonal_init(s4)
    gradient = loss_gradient(s4, pair).entries
    assert np.allclose(np.diag(gradient), 0.0)
    assert np.array_equal(pair.q, np.diag(1.0 / np.diag(s4)))


def test_optimal_diagonal_init_rejects_zero_variance():
    with pytest.raises(DegenerateInputError):
        optimal_diagonal_init(np.diag([1.0, 0.0]))


@pytest.mark.parametrize("seed", range(5))
def test_loss_is_strictly_convex(make_spd, seed):
    rng = np.random.default_rng(100 + seed)
    d = 2 + seed
    s = make_spd(d, seed=seed)
    q1, q2 = make_spd(d, seed=200 + seed), make_spd(d, seed=300 + seed)
    assert np.linalg.norm(q1 - q2) >= 0.1
    lam = rng.uniform(0.1, 0.9)
    mixed = _loss_at(s, lam * q1 + (1 - lam) * q2)
    assert mixed < lam * _loss_at(s, q1) + (1 - lam) * _loss_at(s, q2) - 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_gradient_monotonicity_bound(make_spd, seed):
    d = 3 + seed % 3
    s = make_spd(d, seed=seed)
    q1, q2 = make_spd(d, seed=400 + seed), make_spd(d, seed=500 + seed)
    g1 = loss_gradient(s, SpdPair.from_matrix(q1)).entries
    g2 = loss_gradient(s, SpdPair.from_matrix(q2)).entries
    lam_max = max(np.linalg.eigvalsh(q1)[-1], np.linalg.eigvalsh(q2)[-1])
    inner = np.sum((g1 - g2) * (q1 - q2))
    assert inner >= np.sum((q1 - q2) ** 2) / lam_max**2


def test_inverse_anchor_minimises_the_loss(s4, make_spd):
    best = _loss_at(s4, np.linalg.inv(s4))
    rng = np.random.default_rng(17)
    for seed in range(100):
        q = make_spd(4, seed=1000 + seed, conditioning=rng.uniform(0.05, 2.0))
        assert best <= _loss_at(s4, q) + 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_gradient_lipschitz_bound(make_spd, seed):
    d = 3 + seed % 3
    s = make_spd(d, seed=seed)
    q1, q2 = make_spd(d, seed=600 + seed), make_spd(d, seed=700 + seed)
    g1 = loss_gradient(s, SpdPair.from_matrix(q1)).entries
    g2 = loss_gradient(s, SpdPair.from_matrix(q2)).entries
    lam_min = min(np.linalg.eigvalsh(q1)[0], np.linalg.eigvalsh(q2)[0])
    assert np.linalg.norm(g1 - g2) <= np.linalg.norm(q1 - q2) / lam_min**2 + 1e-12


def test_loss_is_unbounded_below_for_singular_anchor():
    s = np.diag([1.0, 0.0])
    losses = [_loss_at(s, np.diag([1.0, k])) for k in np.logspace(0, 6, 25)]
    assert np.all(np.diff(losses) < 0)
    assert losses[-1] == pytest.approx(1.0 - 6 * np.log(10.0))


def test_hand_evaluated_loss_values():
    s = np.diag([2.0, 4.0])
    assert _loss_at(s, np.diag([0.5, 0.25])) == pytest.approx(2.0 + np.log(8.0))
    assert kl_gap(np.eye(2), SpdPair.from_matrix(np.diag([2.0, 0.5]))) == pytest.approx(0.5)
    pair = optimal_diagonal_init(s)
    np.testing.assert_allclose(pair.q, np.diag([0.5, 0.25]))
    np.testing.assert_allclose(pair.r, s)
