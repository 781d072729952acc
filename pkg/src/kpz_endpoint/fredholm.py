"""Nystrom discretization of integral operators and Fredholm determinants.

An operator K on [a, b] is represented by the matrix
``M_ij = sqrt(w_i w_j) K(x_i, x_j)`` over a Gauss-Legendre rule, so that
symmetric kernels give symmetric matrices and ``det(I - M)`` converges
spectrally to the Fredholm determinant for analytic kernels.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import EvaluationError, SingularityError

SINGULAR_DET = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    rule: object
    entries: np.ndarray

    def __post_init__(self):
        n = len(self.rule)
        if self.entries.shape != (n, n):
            raise ValueError(f"entries shape {self.entries.shape} does not match rule size {n}")
        self.entries.setflags(write=False)

    @cached_property
    def _lu(self):
        a = np.eye(len(self.rule)) - self.entries
        lu, piv = lu_factor(a, check_finite=False)
        return lu, piv

    @cached_property
    def det(self):
        """det(I - M) from the pivoted LU factors."""
        lu, piv = self._lu
        swaps = np.count_nonzero(piv != np.arange(piv.size))
        sign = -1.0 if swaps % 2 else 1.0
        return sign * float(np.prod(np.diag(lu)))

    def solve(self, rhs, guard=True):
        """(I - M)^{-1} rhs for a vector or a matrix of column vectors.

        With ``guard`` the solve is refused when |det(I - M)| <= SINGULAR_DET.
        Without it only a non-finite result is an error; callers that pass
        ``guard=False`` multiply by det(I - M) afterwards, so conditioning
        loss stays relative to a tiny product.
        """
        d = self.det
        if guard and not abs(d) > SINGULAR_DET:
            raise SingularityError(f"I - K is numerically singular (det = {d:.3e})", det=d)
        x = lu_solve(self._lu, rhs, check_finite=False)
        if not np.all(np.isfinite(x)):
            raise SingularityError(f"I - K solve produced non-finite values (det = {d:.3e})", det=d)
        return x


@dataclass(frozen=True, eq=False)
class WeightedVector:
    rule: object
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.rule),):
            raise ValueError("weighted vector does not match rule size")
        if not np.all(np.isfinite(self.values)):
            raise EvaluationError("weighted vector has non-finite entries")
        self.values.setflags(write=False)


def discretize(kernel, rule):
    """Matrix of ``kernel`` on ``rule``; ``kernel(X, Y)`` must broadcast."""
    x = rule.nodes
    k = np.asarray(kernel(x[:, None], x[None, :]), dtype=float)
    k = np.broadcast_to(k, (x.size, x.size))
    bad = ~np.isfinite(k)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise EvaluationError(
            f"kernel is {k[i, j]} at node pair ({float(x[i])!r}, {float(x[j])!r})"
        )
    sw = np.sqrt(rule.weights)
    return DiscreteOperator(rule, sw[:, None] * k * sw[None, :])


def weighted(fn, rule):
    """WeightedVector with entries sqrt(w_i) fn(x_i)."""
    values = np.broadcast_to(np.asarray(fn(rule.nodes), dtype=float), rule.nodes.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise EvaluationError(f"function is {values[i]} at node x[{i}] = {float(rule.nodes[i])!r}")
    return WeightedVector(rule, np.sqrt(rule.weights) * values)


def det_id_minus(op):
    return op.det


def resolvent_quadform(op, u, v):
    """v^T (I - M)^{-1} u."""
    _check_rule(op, u, v)
    return float(v.values @ op.solve(u.values))


def rank_one_det(op, u, v):
    """det(I - M + u v^T), computed directly (not via the resolvent)."""
    _check_rule(op, u, v)
    a = np.eye(len(op.rule)) - op.entries + np.outer(u.values, v.values)
    return float(np.linalg.det(a))


def det_derivative(op, dop):
    """d/ds det(I - M(s)) = -det(I - M) tr((I - M)^{-1} dM), dM = dop.entries."""
    if dop.rule is not op.rule and not np.array_equal(dop.rule.nodes, op.rule.nodes):
        raise ValueError("det_derivative: operators live on different rules")
    x = op.solve(dop.entries)
    return -op.det * float(np.trace(x))


def _check_rule(op, *vecs):
    for vec in vecs:
        if vec.rule is not op.rule and not np.array_equal(vec.rule.nodes, op.rule.nodes):
            raise ValueError("vector and operator live on different rules")
