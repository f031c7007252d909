"""Sparse polynomial arithmetic, ordering, serialization, fitting."""

import numpy as np

from conevol import Polynomial, fit_polynomial, monomial_basis


def test_arithmetic_and_eval():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = (x + y) * (x - y)  # x^2 - y^2
    assert p.terms == {(2, 0): 1.0, (0, 2): -1.0}
    assert p([3.0, 2.0]) == 5.0
    assert np.allclose(p.eval_many([[3, 2], [1, 1]]), [5.0, 0.0])


def test_zero_coefficients_pruned():
    p = Polynomial(2, {(1, 0): 1.0}) - Polynomial(2, {(1, 0): 1.0})
    assert p.terms == {}
    assert p.degree() == 0


def test_graded_lex_serialization():
    p = Polynomial(2, {(0, 0): 1.0, (2, 0): 3.0, (1, 1): 2.0, (0, 1): 5.0})
    ordered = [t["e"] for t in p.to_json()["terms"]]
    assert ordered == [[2, 0], [1, 1], [0, 1], [0, 0]]
    q = Polynomial.from_json(p.to_json(), 2)
    assert q.allclose(p, 1e-12)


def test_monomial_basis_active_restriction():
    basis = monomial_basis(4, 2, active=[1, 3])
    assert all(e[0] == 0 and e[2] == 0 for e in basis)
    assert len(basis) == 6  # 1, b2, b4, b2^2, b2 b4, b4^2


def test_fit_recovers_sparse_polynomial():
    rng = np.random.default_rng(61)
    truth = Polynomial(3, {(1, 1, 0): 2.0, (0, 0, 2): -0.5, (0, 0, 0): 1.25})
    X = rng.uniform(0.5, 1.5, size=(120, 3))
    y = truth.eval_many(X)
    fitted, residual = fit_polynomial(X, y, 3, 2)
    assert residual < 1e-10
    assert fitted.allclose(truth, 1e-9)
