"""Dense complex matrix algebra, bipartite operations and random-matrix samplers.

Matrices are plain ``numpy`` arrays of shape ``(d, d)`` and dtype complex128.
Bipartite indices are flattened system-major: row = s * d_e + e, so a system
operator ``A`` acts on the full space as ``kron(A, I_E)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

MAX_DIM = 4096

HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-10
STATE_PSD_TOL = 1e-9


@dataclass(frozen=True)
class BipartiteDims:
    """System/environment dimensions of a bipartite Hilbert space."""

    d_s: int
    d_e: int

    def __post_init__(self):
        if self.d_s < 2 or self.d_e < 2:
            raise DimensionError(
                f"bipartite factors must both be >= 2, got ({self.d_s}, {self.d_e})"
            )

    @property
    def d(self) -> int:
        return self.d_s * self.d_e


@dataclass(frozen=True)
class RngStream:
    """Seed plus stream id; equal values reproduce identical sample sequences."""

    seed: int
    stream: int = 0

    def generator(self, *subkeys: int) -> np.random.Generator:
        """Fresh generator for this stream, optionally keyed by extra indices."""
        return np.random.default_rng([self.seed, self.stream, *subkeys])


def as_matrix(m) -> np.ndarray:
    """Coerce input to a square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        return True
    return np.max(np.abs(m - m.conj().T)) <= rtol * scale


def is_unitary(m: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    d = m.shape[0]
    return np.max(np.abs(m.conj().T @ m - np.eye(d))) <= atol


def check_state(rho: np.ndarray, tol: float = STATE_PSD_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, PSD within tol."""
    rho = as_matrix(rho)
    if not is_hermitian(rho, rtol=1e-9):
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"state trace {np.trace(rho)} is not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("state has a negative eigenvalue beyond tolerance")
    return rho


def tensor_product(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with the system factor first."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] * b.shape[0] > max_dim:
        raise DimensionError(
            f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds limit {max_dim}"
        )
    return np.kron(a, b)


def _check_bipartite(m: np.ndarray, dims: BipartiteDims) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != dims.d:
        raise DimensionError(f"matrix dim {m.shape[0]} != d_s*d_e = {dims.d}")
    return m


def partial_trace_env(m, dims: BipartiteDims) -> np.ndarray:
    """Trace out the environment factor: (Tr_E M)_{kl} = sum_j M_{(k,j),(l,j)}."""
    m = _check_bipartite(m, dims)
    r = m.reshape(dims.d_s, dims.d_e, dims.d_s, dims.d_e)
    return np.einsum("ajbj->ab", r)


def partial_trace_sys(m, dims: BipartiteDims) -> np.ndarray:
    """Trace out the system factor: (Tr_S M)_{kl} = sum_j M_{(j,k),(j,l)}."""
    m = _check_bipartite(m, dims)
    r = m.reshape(dims.d_s, dims.d_e, dims.d_s, dims.d_e)
    return np.einsum("jajb->ab", r)


def hs_norm_sq(m) -> float:
    """Squared Hilbert-Schmidt (Frobenius) norm, Tr(M^dag M)."""
    m = np.asarray(m)
    return float(np.sum(np.abs(m) ** 2))


def trace_power(m, k: int) -> complex:
    """Tr(M^k) for k in 1..4 by repeated multiplication."""
    if k not in (1, 2, 3, 4):
        raise ValueError(f"k must be in 1..4, got {k}")
    m = as_matrix(m)
    p = m
    for _ in range(k - 1):
        p = p @ m
    return complex(np.trace(p))


def _as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def sample_haar_unitaries(d: int, n: int, rng) -> np.ndarray:
    """Stack of n Haar-distributed d x d unitaries, shape (n, d, d).

    Ginibre matrix -> QR -> column phases fixed by conj(r_jj)/|r_jj|, which
    makes the triangular factor's diagonal positive (plain QR alone is not
    Haar-distributed).
    """
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    gen = _as_generator(rng)
    z = gen.standard_normal((n, d, d)) + 1j * gen.standard_normal((n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag.conj() / np.abs(diag)
    return q * phases[:, None, :]


def sample_haar_unitary(d: int, rng) -> np.ndarray:
    """Single Haar-distributed d x d unitary."""
    return sample_haar_unitaries(d, 1, rng)[0]


def sample_gue_hamiltonians(d: int, n: int, rng) -> np.ndarray:
    """Stack of n GUE matrices normalized to <|H_ij|^2> = 1/d (semicircle on [-2, 2])."""
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    gen = _as_generator(rng)
    a = gen.standard_normal((n, d, d)) + 1j * gen.standard_normal((n, d, d))
    return (a + a.conj().swapaxes(-1, -2)) / (2.0 * np.sqrt(d))


def sample_gue_hamiltonian(d: int, rng) -> np.ndarray:
    """Single GUE matrix with <|H_ij|^2> = 1/d."""
    return sample_gue_hamiltonians(d, 1, rng)[0]


def evolve_diag(x, phases) -> np.ndarray:
    """Conjugate by a diagonal matrix: result_ij = p_i * x_ij * conj(p_j).

    With p = exp(-i E t) this is exp(-iDt) X exp(+iDt); with real positive p
    it is diag(p) X diag(p).
    """
    x = as_matrix(x)
    p = np.asarray(phases, dtype=complex)
    if p.shape != (x.shape[0],):
        raise DimensionError(
            f"phase vector length {p.shape} does not match matrix dim {x.shape[0]}"
        )
    return p[:, None] * x * p.conj()[None, :]
