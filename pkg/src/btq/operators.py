"""Quantum operators at level m: Toeplitz matrices by three independent
construction paths, geometric-quantization matrices, norms and commutators.

Paths for T_f: (1) grid quadrature, assembling B^H diag(w f) B in fixed
chunk order (bit-deterministic across thread counts); (2) exact radial
moments, expanding the chart numerator of each monomial and integrating
every z^a zbar^b (1+z zbar)^-(m+d) term as an exact Beta ratio -- no
quadrature at all; (3) the explicit integral kernel, expanding
(1 + z conj(zeta))^m binomially and re-projecting on the raw monomial
frame.  Pairwise agreement of the three is the package's core self-test.

The geometric-quantization operator is Q_f = Pi(-(1/m) nabla_{X_f} + i f)Pi
with the Hamiltonian field of the area form; the 1/m is the level-m scaling
(the m-th bundle power quantizes m times the symplectic form), and Tuynman's
relation Q_f = i T_{f - Laplacian(f)/(2m)} is the exactness check.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover - dependency is declared
    from contextlib import nullcontext

    def threadpool_limits(limits=None):
        return nullcontext()

from ._zpoly import chart_rational, zp_eval
from .errors import LevelMismatchError, UnderResolvedRuleError
from .geometry import DEFAULT_CONVENTIONS, make_rule
from .hilbert import SectionVector, basis_eval_grid, monomial_norm
from .symbols import eval_ambient, laplace_beltrami

BINARY_HEADER = b"BTQOPV01"
_HERM_TOL = 1e-12
_CHUNK = 4096


class QuantumOperator:
    """Dense complex matrix at level m in the orthonormal basis."""

    __slots__ = ("m", "mat", "hermitian", "_norm")

    def __init__(self, m, mat, hermitian=None):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (m + 1, m + 1):
            raise ValueError(f"level {m} needs a {m + 1}x{m + 1} matrix")
        self.m = m
        self.mat = mat
        if hermitian is None:
            scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 1.0)
            hermitian = float(np.max(np.abs(mat - mat.conj().T))) <= _HERM_TOL * scale
        self.hermitian = bool(hermitian)
        self._norm = None

    def hermitian_defect(self):
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def __add__(self, other):
        self._check(other)
        return QuantumOperator(self.m, self.mat + other.mat)

    def __sub__(self, other):
        self._check(other)
        return QuantumOperator(self.m, self.mat - other.mat)

    def __mul__(self, scalar):
        return QuantumOperator(self.m, self.mat * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return QuantumOperator(self.m, -self.mat)

    def __matmul__(self, other):
        self._check(other)
        return QuantumOperator(self.m, self.mat @ other.mat)

    def _check(self, other):
        if not isinstance(other, QuantumOperator):
            raise TypeError("expected a QuantumOperator")
        if self.m != other.m:
            raise LevelMismatchError(f"levels {self.m} and {other.m} differ")

    def norm(self):
        if self._norm is None:
            self._norm = operator_norm(self)
        return self._norm

    # -- serialization ---------------------------------------------------

    def to_json_dict(self):
        return {"m": self.m,
                "rows": [[[v.real, v.imag] for v in row] for row in self.mat]}

    @classmethod
    def from_json_dict(cls, obj):
        mat = np.array([[complex(r, i) for r, i in row] for row in obj["rows"]])
        return cls(obj["m"], mat)

    def to_json(self):
        return json.dumps(self.to_json_dict())

    def to_binary(self):
        """Header "BTQOPV01" + row-major little-endian float64 re/im pairs."""
        return BINARY_HEADER + np.ascontiguousarray(self.mat.astype("<c16")).tobytes()

    @classmethod
    def from_binary(cls, blob):
        if blob[:8] != BINARY_HEADER:
            raise ValueError("bad operator binary header")
        flat = np.frombuffer(blob[8:], dtype="<c16")
        n = math.isqrt(flat.size)
        if n * n != flat.size:
            raise ValueError("operator binary payload is not square")
        return cls(n - 1, flat.reshape(n, n).astype(complex))


def identity(m):
    return QuantumOperator(m, np.eye(m + 1, dtype=complex), hermitian=True)


# -- deterministic chunked assembly -------------------------------------------


def weighted_pairing(left, wvals, right, threads=1, chunk=_CHUNK):
    """left^H diag(wvals) right, accumulated over fixed node chunks.

    Each chunk product runs on one BLAS thread and partial sums are reduced
    in chunk order, so the result is bit-identical for any `threads`.
    """
    n = left.shape[0]
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]

    def part(bound):
        lo, hi = bound
        return left[lo:hi].conj().T @ (wvals[lo:hi, None] * right[lo:hi])

    with threadpool_limits(limits=1):
        if threads <= 1:
            parts = [part(b) for b in bounds]
        else:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(part, bounds))
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


def _resolve_table(f_degree, m, rule=None, table=None, margin=0, extra_degree=0):
    if table is None:
        if rule is None:
            rule = make_rule(m, f_degree + extra_degree, margin=margin)
        table = basis_eval_grid(m, rule)
    need = m + f_degree + extra_degree
    if table.rule.max_radial_degree < need or table.rule.max_angular_frequency < need:
        raise UnderResolvedRuleError(
            f"rule resolves degree {table.rule.max_radial_degree}, need {need}")
    if table.m != m:
        raise ValueError("table level mismatch")
    return table


# -- path 1: quadrature --------------------------------------------------------


def toeplitz(f, m, rule=None, table=None, threads=1, margin=0):
    """T_f at level m by exact quadrature: (T_f)_jk = <e_j, f e_k>."""
    table = _resolve_table(f.degree, m, rule, table, margin)
    fv = eval_ambient(f, table.x1, table.x2, table.x3)
    mat = weighted_pairing(table.B, table.w * fv, table.B, threads=threads)
    hermitian = None
    if f.is_real:
        scale = max(1.0, float(np.max(np.abs(mat))))
        if float(np.max(np.abs(mat - mat.conj().T))) > _HERM_TOL * scale:
            raise UnderResolvedRuleError(
                "real symbol produced a non-Hermitian Toeplitz matrix")
        hermitian = True
    return QuantumOperator(m, mat, hermitian=hermitian)


# -- path 2: exact Beta moments ------------------------------------------------


def _chart_numerator(a, b, c):
    """(z+zbar)^a (-i(z-zbar))^b (1-z zbar)^c expanded exactly."""
    poly = {(0, 0): complex(1.0)}

    def mul(p, q):
        out = {}
        for (i1, j1), c1 in p.items():
            for (i2, j2), c2 in q.items():
                e = (i1 + i2, j1 + j2)
                out[e] = out.get(e, 0j) + c1 * c2
        return out

    for _ in range(a):
        poly = mul(poly, {(1, 0): 1.0 + 0j, (0, 1): 1.0 + 0j})
    for _ in range(b):
        poly = mul(poly, {(1, 0): -1j, (0, 1): 1j})
    for _ in range(c):
        poly = mul(poly, {(0, 0): 1.0 + 0j, (1, 1): -1.0 + 0j})
    return poly


def toeplitz_exact(f, m):
    """T_f by exact radial Beta moments (no quadrature): the oracle path.

    Every chart monomial z^alpha zbar^beta over (1+z zbar)^(m+d) integrates
    to an exact rational multiple of the monomial norms; entries are finite
    sums of such ratios, and the angular selection rule |j-k| <= a+b with
    parity is automatic.
    """
    n = m + 1
    mat = np.zeros((n, n), dtype=complex)
    sq = np.array([math.sqrt(float(math.comb(m, k))) for k in range(n)])
    for (a, b, c), coeff in sorted(f.terms.items()):
        d = a + b + c
        poly = _chart_numerator(a, b, c)
        for (alpha, beta), cc in sorted(poly.items()):
            q = alpha - beta  # row j = k + q
            for k in range(n):
                j = k + q
                if not 0 <= j < n:
                    continue
                big_a = k + alpha
                kappa = Fraction(m + 1, (m + d + 1) * math.comb(m + d, big_a))
                mat[j, k] += coeff * cc * (float(kappa) * sq[j] * sq[k])
    hermitian = None
    if f.is_real:
        hermitian = bool(np.max(np.abs(mat - mat.conj().T)) <=
                         _HERM_TOL * max(1.0, np.max(np.abs(mat))))
    return QuantumOperator(m, mat, hermitian=hermitian)


# -- path 3: integral kernel ---------------------------------------------------


def _monomial_frame(table):
    """Raw monomial values z^k (1+|z|^2)^(-m/2) at the nodes (no norms)."""
    m = table.m
    k = np.arange(m + 1)
    mag = np.sqrt(table.s[:, None] ** k[None, :]
                  * (1.0 - table.s)[:, None] ** (m - k)[None, :])
    return mag * np.exp(1j * np.outer(table.phi, k))


def kernel_apply(f, m, sec, rule=None, table=None):
    """Apply T_f to a section through the explicit integral kernel.

    (T_f s)(z) = (m+1)/(2 pi) int (1+z conj(zeta))^m f s (1+|zeta|^2)^-m
    Omega(zeta); the binomial expansion of the kernel gives the raw monomial
    coefficients directly, which are then re-expressed in the orthonormal
    basis.  Agrees with toeplitz(f,...) applied to the coefficients.
    """
    table = _resolve_table(f.degree, m, rule, table)
    if sec.m != m:
        raise ValueError("section level mismatch")
    out = _kernel_image(f, table, sec.coeffs.reshape(-1, 1))[:, 0]
    return SectionVector(m, out)


def _kernel_image(f, table, coeff_cols):
    m = table.m
    norms = np.array([monomial_norm(m, k) for k in range(m + 1)])
    frame = _monomial_frame(table)
    raw = coeff_cols / np.sqrt(norms)[:, None]
    vals = frame @ raw
    fv = eval_ambient(f, table.x1, table.x2, table.x3)
    integrals = frame.conj().T @ (table.w[:, None] * (fv[:, None] * vals))
    comb = np.array([float(math.comb(m, k)) for k in range(m + 1)])
    raw_out = ((m + 1) / (2.0 * math.pi)) * comb[:, None] * integrals
    return raw_out * np.sqrt(norms)[:, None]


def kernel_matrix(f, m, rule=None, table=None):
    """T_f reconstructed column-by-column from the kernel path."""
    table = _resolve_table(f.degree, m, rule, table)
    cols = _kernel_image(f, table, np.eye(m + 1, dtype=complex))
    return QuantumOperator(m, cols)


# -- geometric quantization ----------------------------------------------------


def prequantum(f, m, rule=None, table=None, threads=1):
    """Q_f = Pi P_f Pi with P_f = -(1/m) nabla_{X_f} + i f at level m.

    In the chart, for a holomorphic representative p:
    P_f p = (i/m)(1+z zbar)^2 (dzbar f)(dz p - m zbar p/(1+z zbar)) + i f p.
    Derivatives raise the integrand degree, hence the +2 exactness margin.
    Anti-Hermitian (to quadrature accuracy) for real f.
    """
    table = _resolve_table(f.degree, m, rule, table, extra_degree=2)
    rat = chart_rational(f.terms)
    d = rat.pole
    z, u, w, B = table.z, table.u, table.w, table.B
    fv = eval_ambient(f, table.x1, table.x2, table.x3)
    # dzbar f = G/u^(d+1) by the quotient rule; we need u * dzbar f = G/u^d
    gv = zp_eval(rat.dzbar().num, z)
    u_dzbar_f = gv if d == 0 else gv * u ** (-float(d))
    if m > 0:
        col = (1j / m) * u_dzbar_f * u / z  # pairs with k z^(k-1)
    else:
        col = np.zeros_like(z)
    base = 1j * (fv - np.conj(z) * u_dzbar_f)
    k = np.arange(m + 1)
    pe = B * base[:, None] + (B * col[:, None]) * k[None, :]
    mat = weighted_pairing(B, w, pe, threads=threads)
    return QuantumOperator(m, mat, hermitian=False)


def tuynman_rhs(f, m, conventions=DEFAULT_CONVENTIONS, rule=None, table=None):
    """i T_{f - Laplacian(f)/(2m)}: the Toeplitz side of Tuynman's relation."""
    if m < 1:
        raise ValueError("Tuynman's relation needs m >= 1")
    g = f - laplace_beltrami(f, conventions) * (1.0 / (2.0 * m))
    return toeplitz(g, m, rule=rule, table=table) * 1j


# -- norms and commutators -----------------------------------------------------


def _power_norm(mat, tol=1e-13, max_iter=500_000, min_iter=16):
    """sqrt of the top eigenvalue of A^H A by shifted power iteration.

    Deterministic all-ones start; the positive shift (an upper bound on the
    spectrum) keeps the iteration matrix definite so the first step never
    annihilates the start vector.  Stops when the Rayleigh quotient moves by
    less than tol relative per step.
    """
    n = mat.shape[0]
    gram = mat.conj().T @ mat
    shift = float(np.max(np.sum(np.abs(gram), axis=1)))
    if shift == 0.0:
        return 0.0
    v = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
    rho_prev = None
    for it in range(max_iter):
        w = gram @ v + shift * v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        rho = float(np.real(np.vdot(v, gram @ v)))
        if rho_prev is not None and it >= min_iter \
                and abs(rho - rho_prev) <= tol * max(abs(rho), 1e-290):
            rho_prev = rho
            break
        rho_prev = rho
    return math.sqrt(max(rho_prev, 0.0))


def operator_norm(op):
    """Largest singular value: Hermitian eigendecomposition when flagged,
    else shifted power iteration on A^H A."""
    if op.hermitian:
        if op.m == 0:
            return float(abs(op.mat[0, 0]))
        return float(np.max(np.abs(np.linalg.eigvalsh(op.mat))))
    return _power_norm(op.mat)


def commutator(a, b):
    """[A, B] = AB - BA (anti-Hermitian for Hermitian inputs)."""
    a._check(b)
    return QuantumOperator(a.m, a.mat @ b.mat - b.mat @ a.mat)
