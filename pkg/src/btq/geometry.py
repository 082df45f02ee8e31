"""Charts, Kaehler data, diastasis and exact quadrature for the Riemann sphere.

Conventions. The Kaehler form is omega = i dz dzbar/(1+z zbar)^2 in the
stereographic coordinate z, so the total area is 2*pi (a round sphere of
radius 1/sqrt(2)).  z = 0 is the north pole x3 = +1; the single point the
chart misses is the south pole (0,0,-1).  In the radial substitution
s = |z|^2/(1+|z|^2) the volume form is exactly ds dphi on (0,1) x (0,2*pi),
which is what makes finite-node quadrature exact for all the integrands
this package produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._zpoly import Rational
from .errors import CapacityError

TOTAL_AREA = 2.0 * math.pi

# hard cap on tensor-product quadrature size; make_rule refuses beyond this
MAX_QUAD_NODES = 8_000_000


@dataclass(frozen=True)
class KahlerConventions:
    """Every sign/normalization the formulas leave open, pinned in one place.

    poisson_constant is the c in {x_i, x_j} = c eps_ijk x_k; laplace_sign
    and laplace_scale turn the ambient-identity Laplacian into the one the
    metric g(X,Y) = omega(X, IY) defines (eigenvalues -2 l(l+1) here).
    The defaults are the values the runtime calibration selects.
    """

    total_area: float = TOTAL_AREA
    poisson_constant: float = 2.0
    laplace_sign: int = 1
    laplace_scale: float = 2.0

    def as_dict(self):
        return {
            "total_area": self.total_area,
            "poisson_constant": self.poisson_constant,
            "laplace_sign": self.laplace_sign,
            "laplace_scale": self.laplace_scale,
        }


DEFAULT_CONVENTIONS = KahlerConventions()


class SpherePoint:
    """A point of S^2 with its stereographic coordinate.

    chart is "finite" (coordinate z, north-pole chart) or "infinity"
    (the south pole, the one point the z-chart misses).
    """

    __slots__ = ("chart", "z")

    def __init__(self, chart, z=0j):
        if chart not in ("finite", "infinity"):
            raise ValueError(f"unknown chart {chart!r}")
        self.chart = chart
        self.z = complex(z) if chart == "finite" else None

    @classmethod
    def from_z(cls, z):
        return cls("finite", z)

    @classmethod
    def infinity(cls):
        return cls("infinity")

    @classmethod
    def from_ambient(cls, x1, x2, x3, tol=1e-9):
        r2 = x1 * x1 + x2 * x2 + x3 * x3
        if abs(r2 - 1.0) > tol:
            raise ValueError(f"({x1},{x2},{x3}) is not on the unit sphere")
        if 1.0 + x3 <= 1e-300:
            return cls.infinity()
        return cls("finite", complex(x1, x2) / (1.0 + x3))

    def ambient(self):
        """(x1, x2, x3) with x1^2+x2^2+x3^2 = 1."""
        if self.chart == "infinity":
            return (0.0, 0.0, -1.0)
        z = self.z
        u = 1.0 + abs(z) ** 2
        return (2.0 * z.real / u, 2.0 * z.imag / u, (2.0 - u) / u)

    def antipode(self):
        x1, x2, x3 = self.ambient()
        return SpherePoint.from_ambient(-x1, -x2, -x3)

    def _lift(self):
        # unit vector in C^2 representing the point of P^1
        if self.chart == "infinity":
            return (0.0 + 0j, 1.0 + 0j)
        n = math.sqrt(1.0 + abs(self.z) ** 2)
        return (1.0 / n + 0j, self.z / n)

    def __repr__(self):
        if self.chart == "infinity":
            return "SpherePoint(infinity)"
        return f"SpherePoint(z={self.z})"


def diastasis(p, q):
    """Calabi diastasis D(p,q) = -log |<p,q>|^2 of unit lifts.

    Symmetric, zero iff p == q, +inf for antipodal pairs (extended-real
    valued by design, never an error).
    """
    ap, bp = p._lift()
    aq, bq = q._lift()
    k = ap.conjugate() * aq + bp.conjugate() * bq
    k2 = abs(k) ** 2
    if k2 == 0.0:
        return math.inf
    return max(0.0, -math.log(k2))


@dataclass(frozen=True)
class QuadratureRule:
    """Product rule: Gauss nodes in s = |z|^2/(1+|z|^2), uniform nodes in phi.

    Exact (to roundoff) for p(s) e^{i q phi} with deg p <= max_radial_degree
    and |q| <= max_angular_frequency.
    """

    s_nodes: np.ndarray
    s_weights: np.ndarray
    n_phi: int
    max_radial_degree: int
    max_angular_frequency: int

    @property
    def n_nodes(self):
        return len(self.s_nodes) * self.n_phi

    def phi_nodes(self):
        return 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi

    def grid(self):
        """Flattened (s, phi, w) arrays in fixed C order (s outer, phi inner)."""
        s = np.repeat(self.s_nodes, self.n_phi)
        phi = np.tile(self.phi_nodes(), len(self.s_nodes))
        w = np.repeat(self.s_weights, self.n_phi) * (2.0 * math.pi / self.n_phi)
        return s, phi, w

    def integrate(self, values):
        """Integrate grid samples against the volume form (fixed node order)."""
        _, _, w = self.grid()
        return np.sum(w * values)


def make_rule(m, degree, margin=0):
    """Rule exact for every level-m matrix-element integrand with symbols
    of total degree <= degree: radial degree >= m+degree, angular
    frequency >= 2m+degree (plus the requested safety margin)."""
    if m < 0 or degree < 0 or margin < 0:
        raise ValueError("level, degree and margin must be nonnegative")
    need_radial = m + degree + margin
    need_angular = 2 * m + degree + margin
    n_s = (need_radial + 2) // 2  # 2 n_s - 1 >= need_radial
    n_s = max(n_s, 1)
    n_phi = need_angular + 1
    if n_s * n_phi > MAX_QUAD_NODES:
        raise CapacityError(
            f"quadrature would need {n_s * n_phi} nodes (cap {MAX_QUAD_NODES})")
    x, w = np.polynomial.legendre.leggauss(n_s)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * w
    return QuadratureRule(
        s_nodes=s,
        s_weights=ws,
        n_phi=n_phi,
        max_radial_degree=2 * n_s - 1,
        max_angular_frequency=n_phi - 1,
    )


def beta_moment(a, b):
    """Exact integral of s^a (1-s)^b e^{i*0*phi} against ds dphi = 2*pi*B(a+1,b+1)."""
    return 2.0 * math.pi * float(Fraction(math.factorial(a) * math.factorial(b),
                                          math.factorial(a + b + 1)))


def curvature_check(m, points):
    """Max defect of -dz dzbar log h_m = m/(1+z zbar)^2 for h_m = (1+z zbar)^-m.

    The left side is produced by the rational quotient-rule calculus (the
    same machinery the prequantum operator uses), the right side from the
    Kaehler form, so a zero defect really does tie the bundle metric to
    omega rather than comparing an expression with itself.
    """
    # dzbar log h_m = -m * dzbar(u)/u = (-m z)/u as a rational form
    dlog = Rational({(1, 0): -float(m)}, 1)
    lhs = dlog.dz() * (-1.0)  # -dz dzbar log h_m
    worst = 0.0
    for p in points:
        if p.chart != "finite":
            continue
        z = p.z
        u = 1.0 + abs(z) ** 2
        rhs = float(m) / u**2
        worst = max(worst, abs(lhs.eval(np.complex128(z)) - rhs))
    return worst
