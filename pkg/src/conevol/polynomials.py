"""Sparse multivariate polynomials over the right-hand-side variables.

Terms map exponent tuples to coefficients; zero coefficients are pruned
on construction so the term list is canonical.  Serialization uses
graded-lex term order (total degree descending, then exponents
lexicographically descending) with coefficients rounded to 12
significant digits at print time only.
"""

from dataclasses import dataclass, field

import numpy as np


def _graded_lex_key(exponents):
    return (-sum(exponents), tuple(-e for e in exponents))


@dataclass(frozen=True)
class Polynomial:
    nvars: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars:
                raise ValueError("exponent vector has wrong length")
            if c != 0.0:
                clean[e] = clean.get(e, 0.0) + float(c)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0.0})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {tuple([0] * nvars): value})

    @classmethod
    def variable(cls, nvars, i, coeff=1.0):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): coeff})

    @classmethod
    def linear(cls, coeffs, constant=0.0):
        """c0 + sum_i coeffs[i] * x_i."""
        coeffs = np.asarray(coeffs, dtype=float)
        terms = {}
        if constant:
            terms[tuple([0] * coeffs.size)] = float(constant)
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * coeffs.size
                e[i] = 1
                terms[tuple(e)] = float(c)
        return cls(coeffs.size, terms)

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(self.nvars, terms)

    def __sub__(self, other):
        return self + self._coerce(other) * (-1.0)

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Polynomial.constant(self.nvars, float(other))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = 0.0
        for e, c in self.terms.items():
            total += c * np.prod(x ** np.asarray(e))
        return float(total)

    def eval_many(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        for e, c in self.terms.items():
            out += c * np.prod(X ** np.asarray(e), axis=1)
        return out

    def prune(self, tol: float) -> "Polynomial":
        if not self.terms:
            return self
        top = max(abs(c) for c in self.terms.values())
        return Polynomial(
            self.nvars, {e: c for e, c in self.terms.items() if abs(c) > tol * top}
        )

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: _graded_lex_key(item[0]))

    def allclose(self, other: "Polynomial", tol: float = 1e-9) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(
            abs(self.terms.get(e, 0.0) - other.terms.get(e, 0.0)) <= tol for e in keys
        )

    def to_json(self) -> dict:
        return {
            "terms": [
                {"c": float(f"{c:.12g}"), "e": list(e)} for e, c in self.sorted_terms()
            ]
        }

    @classmethod
    def from_json(cls, data, nvars):
        return cls(nvars, {tuple(t["e"]): float(t["c"]) for t in data["terms"]})

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"b{i + 1}" + (f"^{p}" if p > 1 else "")
                for i, p in enumerate(e)
                if p
            )
            bits.append(f"{c:+.6g}" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + " ".join(bits) + ")"


def monomial_basis(nvars: int, max_degree: int, active=None):
    """Exponent tuples of total degree <= max_degree.

    Restricting to `active` variables keeps the others at exponent 0,
    which shrinks interpolation bases for types with absent facets.
    """
    active = list(range(nvars)) if active is None else list(active)
    out = []

    def rec(pos, remaining, current):
        if pos == len(active):
            e = [0] * nvars
            for idx, p in zip(active, current):
                e[idx] = p
            out.append(tuple(e))
            return
        for p in range(remaining + 1):
            rec(pos + 1, remaining - p, current + [p])

    rec(0, max_degree, [])
    return sorted(out, key=_graded_lex_key)


def fit_polynomial(X: np.ndarray, y: np.ndarray, nvars: int, max_degree: int,
                   active=None, prune_tol: float = 1e-8):
    """Least-squares fit of a total-degree-bounded polynomial to samples.

    Returns (polynomial, residual) where residual is the maximum absolute
    misfit over the supplied points.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    basis = monomial_basis(nvars, max_degree, active)
    V = np.column_stack(
        [np.prod(X ** np.asarray(e), axis=1) for e in basis]
    )
    coeffs, *_ = np.linalg.lstsq(V, y, rcond=None)
    poly = Polynomial(nvars, dict(zip(basis, coeffs))).prune(prune_tol)
    residual = float(np.max(np.abs(poly.eval_many(X) - y))) if len(y) else 0.0
    return poly, residual
