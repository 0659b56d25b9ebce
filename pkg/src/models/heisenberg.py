"""
HeisenbergModel for the HeisenBH subelliptic geometry engine.
The Heisenberg group H_n as a strictly pseudoconvex CR manifold.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import sympy

from config.settings import Config
from config.constants import HORIZONTAL_TOLERANCE


def _permutation_sign(perm: Tuple[int, ...]) -> int:
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def volume_form_coefficient(n: int) -> int:
    """
    Signed coefficient of theta ^ (d theta)^n against dx^1..dx^n dy^1..dy^n dt.

    The top form is evaluated on the coordinate basis by the alternating sum
    over permutations, with the point left symbolic, so the result is an
    exact integer independent of the point.

    Args:
        n: CR dimension

    Returns:
        int: signed coefficient, (-1)^(n(n-1)/2) * 4^n * n!
    """
    if n < 1:
        raise ValueError(f"CR dimension must be >= 1, got {n}")

    xs = sympy.symbols(f"x1:{n + 1}")
    ys = sympy.symbols(f"y1:{n + 1}")
    m = 2 * n + 1
    theta = [-2 * y for y in ys] + [2 * x for x in xs] + [sympy.Integer(1)]

    def dtheta(i: int, j: int):
        # 4 sum dx^a ^ dy^a on basis vectors e_i, e_j
        if i < n and j == i + n:
            return sympy.Integer(4)
        if j < n and i == j + n:
            return sympy.Integer(-4)
        return sympy.Integer(0)

    total = sympy.Integer(0)
    for perm in itertools.permutations(range(m)):
        term = theta[perm[0]]
        for k in range(n):
            term = term * dtheta(perm[2 * k + 1], perm[2 * k + 2])
            if term == 0:
                break
        if term != 0:
            total += _permutation_sign(perm) * term
    coefficient = sympy.simplify(total / 2 ** n)
    if coefficient.free_symbols:
        raise ArithmeticError(f"Volume coefficient depends on the point: {coefficient}")
    return int(coefficient)


def volume_density(n: int) -> float:
    """Density c_n of the measure theta ^ (d theta)^n against Lebesgue measure."""
    if n < 1:
        raise ValueError(f"CR dimension must be >= 1, got {n}")
    return float(4 ** n * math.factorial(n))


@dataclass(frozen=True)
class HeisenbergModel:
    """
    Heisenberg group H_n with contact form theta = dt + 2 sum(x dy - y dx).

    Points are arrays whose last axis holds (x^1..x^n, y^1..y^n, t); every
    pointwise method broadcasts over leading axes. The orthonormal frame is
    X~_a = s X_a with s the frame normalization.
    """

    n: int = Config.CR_DIMENSION
    frame_normalization: float = Config.FRAME_NORMALIZATION

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"CR dimension must be a positive integer, got {self.n}")
        if not self.frame_normalization > 0:
            raise ValueError(f"Frame normalization must be positive, got {self.frame_normalization}")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def s(self) -> float:
        return float(self.frame_normalization)

    @property
    def volume_density(self) -> float:
        return volume_density(self.n)

    def _points(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.dim:
            raise ValueError(f"Point must have {self.dim} coordinates, got {p.shape[-1]}")
        return p

    def _check_frame_index(self, a: int):
        if not 1 <= a <= 2 * self.n:
            raise IndexError(f"Frame index {a} outside 1..{2 * self.n}")

    # Frame and contact structure

    def frame_vector(self, a: int, p) -> np.ndarray:
        """
        Coordinate components of X~_a at p.

        Args:
            a: frame index in 1..2n
            p: point(s), last axis of length 2n+1

        Returns:
            np.ndarray: components with the same shape as p
        """
        self._check_frame_index(a)
        p = self._points(p)
        n, s = self.n, self.s
        out = np.zeros_like(p)
        if a <= n:
            alpha = a - 1
            out[..., alpha] = s
            out[..., 2 * n] = 2.0 * s * p[..., n + alpha]
        else:
            alpha = a - n - 1
            out[..., n + alpha] = s
            out[..., 2 * n] = -2.0 * s * p[..., alpha]
        return out

    def frame_matrix(self, p) -> np.ndarray:
        """Columns X~_1..X~_2n, shape (..., 2n+1, 2n)."""
        return np.stack([self.frame_vector(a, p) for a in range(1, 2 * self.n + 1)], axis=-1)

    def frame_jacobian(self, a: int) -> np.ndarray:
        """Constant Jacobian d(X~_a^k)/dp^j of the (affine) frame coefficients, indexed [k, j]."""
        self._check_frame_index(a)
        n, s = self.n, self.s
        jac = np.zeros((self.dim, self.dim))
        if a <= n:
            jac[2 * n, n + a - 1] = 2.0 * s
        else:
            jac[2 * n, a - n - 1] = -2.0 * s
        return jac

    def bracket(self, a: int, b: int, p) -> np.ndarray:
        """Coordinate components of [X~_a, X~_b] at p."""
        xa = self.frame_vector(a, p)
        xb = self.frame_vector(b, p)
        return (np.einsum('kj,...j->...k', self.frame_jacobian(b), xa)
                - np.einsum('kj,...j->...k', self.frame_jacobian(a), xb))

    def reeb_vector(self, p) -> np.ndarray:
        p = self._points(p)
        out = np.zeros_like(p)
        out[..., 2 * self.n] = 1.0
        return out

    def contact_form(self, p) -> np.ndarray:
        """Components of theta in the coordinate cobasis."""
        p = self._points(p)
        n = self.n
        out = np.empty_like(p)
        out[..., :n] = -2.0 * p[..., n:2 * n]
        out[..., n:2 * n] = 2.0 * p[..., :n]
        out[..., 2 * n] = 1.0
        return out

    def dtheta(self, u, v) -> np.ndarray:
        """d theta = 4 sum dx^a ^ dy^a on coordinate vectors."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        n = self.n
        return 4.0 * np.sum(u[..., :n] * v[..., n:2 * n] - u[..., n:2 * n] * v[..., :n], axis=-1)

    def is_horizontal(self, p, v, tolerance: float = HORIZONTAL_TOLERANCE) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        scale = np.maximum(1.0, np.linalg.norm(v, axis=-1))
        return np.abs(np.sum(self.contact_form(p) * v, axis=-1)) <= tolerance * scale

    def frame_coefficients(self, p, v) -> np.ndarray:
        """Coefficients of a horizontal vector in the frame X~_a."""
        v = np.asarray(v, dtype=float)
        if not np.all(self.is_horizontal(p, v)):
            raise ValueError("Vector is not horizontal: theta(v) exceeds tolerance")
        return v[..., :2 * self.n] / self.s

    def complex_structure(self, p, v) -> np.ndarray:
        """J on the Levi distribution: J X~_a = X~_{n+a}, J X~_{n+a} = -X~_a."""
        c = self.frame_coefficients(p, v)
        n = self.n
        jc = np.concatenate([-c[..., n:], c[..., :n]], axis=-1)
        return np.einsum('...ka,...a->...k', self.frame_matrix(p), jc)

    def levi_form(self, p, u, v) -> np.ndarray:
        """
        Levi form G_theta(u, v) = d theta(u, J v) on horizontal vectors.

        Raises:
            ValueError: if u or v is not horizontal at p
        """
        u = np.asarray(u, dtype=float)
        if not np.all(self.is_horizontal(p, u)):
            raise ValueError("First argument is not horizontal: theta(u) exceeds tolerance")
        return self.dtheta(u, self.complex_structure(p, v))

    def webster_metric(self, p) -> np.ndarray:
        """Webster metric g_theta in coordinates, shape (..., 2n+1, 2n+1)."""
        basis = np.concatenate([self.frame_matrix(p), self.reeb_vector(p)[..., None]], axis=-1)
        dual = np.linalg.inv(basis)
        return np.swapaxes(dual, -1, -2) @ dual

    def dual_norm_sq(self, p, omega) -> np.ndarray:
        """g*_theta(omega, omega) = sum_a omega(X~_a)^2 + omega(T)^2."""
        omega = np.asarray(omega, dtype=float)
        horizontal = np.einsum('...k,...ka->...a', omega, self.frame_matrix(p))
        return np.sum(horizontal ** 2, axis=-1) + np.sum(omega * self.reeb_vector(p), axis=-1) ** 2

    # Group structure

    def group_multiply(self, p, q) -> np.ndarray:
        """(z, t) . (w, s) = (z + w, t + s + 2 Im(z . conj(w)))."""
        p = self._points(p)
        q = self._points(q)
        n = self.n
        x, y = p[..., :n], p[..., n:2 * n]
        u, v = q[..., :n], q[..., n:2 * n]
        out = p + q
        out[..., 2 * n] = p[..., 2 * n] + q[..., 2 * n] + 2.0 * np.sum(y * u - x * v, axis=-1)
        return out

    def group_inverse(self, p) -> np.ndarray:
        return -self._points(p)

    def translation_differential(self, g) -> np.ndarray:
        """Jacobian of left translation q -> g . q (independent of q)."""
        g = self._points(g)
        n = self.n
        jac = np.broadcast_to(np.eye(self.dim), g.shape[:-1] + (self.dim, self.dim)).copy()
        jac[..., 2 * n, :n] = 2.0 * g[..., n:2 * n]
        jac[..., 2 * n, n:2 * n] = -2.0 * g[..., :n]
        return jac

    # CR structure

    def lewy_operator(self, alpha: int, p) -> np.ndarray:
        """Complex components of Z_alpha = d/dz^alpha + i conj(z^alpha) d/dt."""
        if not 1 <= alpha <= self.n:
            raise IndexError(f"Lewy index {alpha} outside 1..{self.n}")
        p = self._points(p)
        n = self.n
        out = np.zeros(p.shape, dtype=complex)
        out[..., alpha - 1] = 0.5
        out[..., n + alpha - 1] = -0.5j
        out[..., 2 * n] = p[..., n + alpha - 1] + 1j * p[..., alpha - 1]
        return out

    def cr_frame(self, p) -> np.ndarray:
        """
        Columns T, T_1..T_n, T_1bar..T_nbar with T_alpha = (X~_alpha - i X~_{n+alpha}) / 2.

        Returns:
            np.ndarray: complex array of shape (..., 2n+1, 2n+1)
        """
        n = self.n
        frame = self.frame_matrix(p)
        holo = 0.5 * (frame[..., :n] - 1j * frame[..., n:])
        return np.concatenate([self.reeb_vector(p)[..., None].astype(complex), holo, np.conj(holo)], axis=-1)

    def levi_matrix(self) -> np.ndarray:
        """g_{alpha betabar} = G_theta(T_alpha, T_betabar), complex-bilinear extension of the Levi form."""
        n = self.n
        origin = np.zeros(self.dim)
        frame = [self.frame_vector(a, origin) for a in range(1, 2 * n + 1)]
        gram = np.array([[self.levi_form(origin, u, v) for v in frame] for u in frame])
        g = np.empty((n, n), dtype=complex)
        for alpha in range(n):
            for beta in range(n):
                g[alpha, beta] = 0.25 * (gram[alpha, beta] + gram[n + alpha, n + beta]
                                         + 1j * (gram[alpha, n + beta] - gram[n + alpha, beta]))
        return g

    def levi_matrix_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.levi_matrix())

    def frame_decomposition(self, p) -> Tuple[np.ndarray, np.ndarray]:
        """
        Matrices lambda and mu = lambda^{-1} with d/dx^A = lambda_A^B T_B.

        Rows of lambda are coordinate directions in the order (x, y, t);
        columns follow cr_frame (T, T_alpha, T_alphabar).

        Returns:
            Tuple[np.ndarray, np.ndarray]: (lambda, mu), complex, shape (..., 2n+1, 2n+1)
        """
        lam = np.swapaxes(np.linalg.inv(self.cr_frame(p)), -1, -2)
        mu = np.linalg.inv(lam)
        return lam, mu

    def to_dict(self):
        return {
            'n': self.n,
            'frame_normalization': self.s,
            'volume_density': self.volume_density,
        }
