"""Reference Lagrange elements on the unit triangle and quadrature rules.

The reference triangle has vertices (0,0), (1,0), (0,1); barycentric
coordinates are (1-x-y, x, y).  Node layout for degree k: the three
vertices first, then k-1 equispaced nodes per edge (edges 0-1, 1-2,
2-0, walking from the lower-numbered vertex), then interior nodes.
Quadrature is a conical-product rule (Gauss-Jacobi x Gauss-Legendre),
so all points are strictly interior and all weights positive.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from nozzlebench.errors import InvalidParameterError

SUPPORTED_DEGREES = (1, 2, 3)
MAX_QUADRATURE_EXACTNESS = 10


def _reference_nodes(k):
    """Equispaced Lagrange nodes in (x, y), vertices/edges/interior order."""
    verts = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    nodes = [verts[0], verts[1], verts[2]]
    edges = [(0, 1), (1, 2), (2, 0)]
    for a, b in edges:
        for m in range(1, k):
            t = m / k
            nodes.append((1 - t) * verts[a] + t * verts[b])
    # interior nodes (only k = 3 has one for the supported range)
    for i in range(1, k):
        for j in range(1, k - i):
            nodes.append(np.array([i / k, j / k]))
    return np.array(nodes)


def _monomials(points, k):
    """Vandermonde of monomials x^a y^b, a+b <= k, at given (x, y) points."""
    x, y = points[:, 0], points[:, 1]
    cols = []
    powers = []
    for d in range(k + 1):
        for a in range(d, -1, -1):
            b = d - a
            cols.append(x**a * y**b)
            powers.append((a, b))
    return np.column_stack(cols), powers


@dataclass(frozen=True)
class ReferenceElement:
    """Lagrange element of given degree with cached basis machinery."""

    degree: int
    nodes: np.ndarray  # (n_basis, 2) reference coordinates
    _coeffs: np.ndarray  # inverse Vandermonde: columns are basis coefficients

    @property
    def n_basis(self):
        return len(self.nodes)

    def eval(self, points):
        """Values (npts, n_basis) and gradients (npts, n_basis, 2)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        V, powers = _monomials(points, self.degree)
        vals = V @ self._coeffs
        x, y = points[:, 0], points[:, 1]
        dVx = np.zeros_like(V)
        dVy = np.zeros_like(V)
        for c, (a, b) in enumerate(powers):
            if a > 0:
                dVx[:, c] = a * x ** (a - 1) * y**b
            if b > 0:
                dVy[:, c] = b * x**a * y ** (b - 1)
        grads = np.stack([dVx @ self._coeffs, dVy @ self._coeffs], axis=-1)
        return vals, grads


@lru_cache(maxsize=None)
def reference_element(k: int) -> ReferenceElement:
    if k not in SUPPORTED_DEGREES:
        raise InvalidParameterError(f"unsupported degree {k}; expected one of {SUPPORTED_DEGREES}")
    nodes = _reference_nodes(k)
    V, _ = _monomials(nodes, k)
    coeffs = np.linalg.inv(V)
    return ReferenceElement(degree=k, nodes=nodes, _coeffs=coeffs)


def reference_basis_eval(k, points):
    """Basis values and reference gradients at barycentric points.

    ``points`` may be (n, 3) barycentric or (n, 2) reference coordinates.
    Returns (values, gradients) with shapes (n, n_basis) and
    (n, n_basis, 2); gradients are with respect to (x, y).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] == 3:
        points = points[:, 1:]
    elem = reference_element(int(k))
    return elem.eval(points)


@dataclass(frozen=True)
class QuadratureRule:
    """Positive-weight rule on the reference triangle."""

    points: np.ndarray  # (nq, 3) barycentric
    weights: np.ndarray  # (nq,), sums to 1/2
    exactness: int

    @property
    def xy(self):
        return self.points[:, 1:]


@lru_cache(maxsize=None)
def quadrature_rule(exactness: int) -> QuadratureRule:
    """Conical-product rule exact for total degree <= ``exactness``."""
    if exactness > MAX_QUADRATURE_EXACTNESS:
        raise InvalidParameterError(
            f"exactness {exactness} > {MAX_QUADRATURE_EXACTNESS} unsupported"
        )
    n = max(1, (int(exactness) + 2) // 2)
    # Gauss-Jacobi with weight (1 - x) on [0, 1]
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    xj = 0.5 * (xj + 1.0)
    wj = wj / 4.0  # weight rescale: dx/2 and (1-x) -> (1-t)/2
    # Gauss-Legendre on [0, 1]
    xl, wl = roots_legendre(n)
    xl = 0.5 * (xl + 1.0)
    wl = 0.5 * wl
    X, Y = np.meshgrid(xj, xl, indexing="ij")
    W = np.outer(wj, wl)
    x = X.ravel()
    y = (Y * (1.0 - X)).ravel()
    w = W.ravel()  # the (1 - x) area factor lives in the Jacobi weight
    pts = np.column_stack([1.0 - x - y, x, y])
    return QuadratureRule(points=pts, weights=w, exactness=int(exactness))


def monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!."""
    from math import factorial

    return factorial(a) * factorial(b) / factorial(a + b + 2)
