"""Monte Carlo oracle for the analytic averages.

Every estimator samples Haar unitaries (and spectra where needed) directly
from the matrix-algebra primitives; nothing here touches the Weingarten sums
or the closed-form coefficients, so agreement between the two routes is a
real cross-check.

Sampling is chunked: chunk i uses the generator derived from
(seed, stream, i) and partial sums are reduced in chunk order, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .linalg import (
    BipartiteDims,
    RngStream,
    as_matrix,
    sample_gue_hamiltonians,
    sample_haar_unitaries,
)

CHUNK = 1024


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with entrywise standard error."""

    mean: np.ndarray | float
    stderr: np.ndarray | float
    n: int


def worker_count(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("HAARMOMENTS_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def accumulate_chunks(chunk_fn, n: int, rng: RngStream, workers: int | None = None):
    """Sum chunk_fn(generator, count) over fixed-size chunks, in chunk order.

    chunk_fn returns a tuple/list/array of partial sums over its samples.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)

    def run(i: int):
        return chunk_fn(rng.generator(i), sizes[i])

    w = worker_count(workers)
    if w == 1:
        parts = map(run, range(len(sizes)))
    else:
        executor = ThreadPoolExecutor(max_workers=w)
        parts = executor.map(run, range(len(sizes)))
    total = None
    for part in parts:
        if total is None:
            total = [np.array(p, dtype=np.result_type(p, float)) for p in part]
        else:
            for acc, p in zip(total, part):
                acc += p
    if w != 1:
        executor.shutdown()
    return total


def _scalar_estimate(sums, n: int) -> McEstimate:
    s1, s2 = float(sums[0]), float(sums[1])
    mean = s1 / n
    var = max(s2 / n - mean**2, 0.0)
    return McEstimate(mean=mean, stderr=float(np.sqrt(var / n)), n=n)


def empirical_moments(
    patterns, d: int, n: int, rng: RngStream, workers: int | None = None
) -> list[McEstimate]:
    """Entrywise mean/stderr of the words U X1 U^dag X2 U ... over Haar draws.

    All patterns are evaluated on one shared Haar sample stream, which keeps
    the per-pattern estimates deterministic and amortizes the sampling cost.
    """
    mats = [[as_matrix(x) for x in xs] for xs in patterns]
    for xs in mats:
        if len(xs) % 2 != 1:
            raise ValueError("each pattern needs an odd number of operators")
        for x in xs:
            if x.shape[0] != d:
                raise DimensionError(f"operator dim {x.shape[0]} != d = {d}")

    def chunk(gen: np.random.Generator, count: int):
        u = sample_haar_unitaries(d, count, gen)
        uh = u.conj().swapaxes(-1, -2)
        out = []
        for xs in mats:
            w = u
            for k, x in enumerate(xs):
                w = w @ x
                w = w @ (uh if k % 2 == 0 else u)
            out.append(w.sum(axis=0))
            out.append((w.real**2 + w.imag**2).sum(axis=0))
        return out

    sums = accumulate_chunks(chunk, n, rng, workers=workers)
    estimates = []
    for j in range(len(mats)):
        mean = sums[2 * j] / n
        var = np.maximum(sums[2 * j + 1] / n - np.abs(mean) ** 2, 0.0)
        estimates.append(McEstimate(mean=mean, stderr=np.sqrt(var / n), n=n))
    return estimates


def empirical_moment(
    xs, d: int, n: int, rng: RngStream, workers: int | None = None
) -> McEstimate:
    """Monte Carlo estimate of a single moment-function word."""
    return empirical_moments([xs], d, n, rng, workers=workers)[0]


def _batch_ptrace_env(a: np.ndarray, dims: BipartiteDims) -> np.ndarray:
    r = a.reshape(-1, dims.d_s, dims.d_e, dims.d_s, dims.d_e)
    return np.einsum("sajbj->sab", r)


def empirical_reduced_norm(
    m, dims: BipartiteDims, n: int, rng: RngStream, workers: int | None = None
) -> tuple[McEstimate, McEstimate]:
    """Mean and variance of ||Tr_E{U M U^dag}||^2 over Haar U, each with stderr."""
    m = as_matrix(m)
    if m.shape[0] != dims.d:
        raise DimensionError(f"matrix dim {m.shape[0]} != d = {dims.d}")

    def chunk(gen: np.random.Generator, count: int):
        u = sample_haar_unitaries(dims.d, count, gen)
        a = u @ m @ u.conj().swapaxes(-1, -2)
        pt = _batch_ptrace_env(a, dims)
        x = np.sum(pt.real**2 + pt.imag**2, axis=(1, 2))
        return np.array([x.sum(), (x**2).sum(), (x**3).sum(), (x**4).sum()])

    s1, s2, s3, s4 = accumulate_chunks(chunk, n, rng, workers=workers)
    mu = s1 / n
    m2 = max(s2 / n - mu**2, 0.0)
    m3 = s3 / n - 3 * mu * (s2 / n) + 2 * mu**3
    m4 = s4 / n - 4 * mu * (s3 / n) + 6 * mu**2 * (s2 / n) - 3 * mu**4
    mean_est = McEstimate(mean=mu, stderr=float(np.sqrt(m2 / n)), n=n)
    var_se = float(np.sqrt(max(m4 - m2**2, 0.0) / n))
    var_est = McEstimate(mean=m2, stderr=var_se, n=n)
    return mean_est, var_est


def empirical_fixed_spectrum(
    m,
    dims: BipartiteDims,
    levels,
    t: float,
    n: int,
    rng: RngStream,
    workers: int | None = None,
) -> McEstimate:
    """Mean of ||Tr_E{W e^{-iDt} W^dag M W e^{iDt} W^dag}||^2 over Haar W."""
    m = as_matrix(m)
    if m.shape[0] != dims.d:
        raise DimensionError(f"matrix dim {m.shape[0]} != d = {dims.d}")
    e = np.asarray(levels, dtype=float)
    if e.shape != (dims.d,):
        raise DimensionError(f"spectrum length {e.shape} != d = {dims.d}")
    p = np.exp(-1j * e * t)

    def chunk(gen: np.random.Generator, count: int):
        w = sample_haar_unitaries(dims.d, count, gen)
        wh = w.conj().swapaxes(-1, -2)
        ut = (w * p[None, None, :]) @ wh
        uth = ut.conj().swapaxes(-1, -2)
        a = ut @ m @ uth
        pt = _batch_ptrace_env(a, dims)
        x = np.sum(pt.real**2 + pt.imag**2, axis=(1, 2))
        return np.array([x.sum(), (x**2).sum()])

    return _scalar_estimate(accumulate_chunks(chunk, n, rng, workers=workers), n)


def schmidt_state(dims: BipartiteDims, p0: float) -> np.ndarray:
    """Pure bipartite state vector whose reduced purity equals p0.

    Interpolates between the maximally entangled state (p0 = 1/d_S) and a
    product state (p0 = 1) through Schmidt weights
    w_i = (1 - s)/d_S + s delta_{i0} with s = sqrt((p0 - 1/d_S)/(1 - 1/d_S)).
    """
    ds, de = dims.d_s, dims.d_e
    if de < ds:
        raise DimensionError(f"need d_e >= d_s for Schmidt rank d_s, got {dims}")
    if not 1.0 / ds - 1e-12 <= p0 <= 1.0 + 1e-12:
        raise ValueError(f"reduced purity {p0} outside [1/{ds}, 1]")
    s = np.sqrt(max(0.0, (p0 - 1.0 / ds) / (1.0 - 1.0 / ds)))
    weights = np.full(ds, (1.0 - s) / ds)
    weights[0] += s
    psi = np.zeros(dims.d, dtype=complex)
    for i in range(ds):
        psi[i * de + i] = np.sqrt(weights[i])
    return psi


def product_state(dims: BipartiteDims) -> np.ndarray:
    """|0>_S x |0>_E as a full-space vector."""
    psi = np.zeros(dims.d, dtype=complex)
    psi[0] = 1.0
    return psi


def empirical_purity(
    dims: BipartiteDims,
    spectra,
    psi0: np.ndarray,
    t: float,
    n: int,
    rng: RngStream,
    workers: int | None = None,
) -> McEstimate:
    """Mean reduced purity of the evolved pure state psi0.

    ``spectra`` selects the evolution: "uniform" applies a Haar unitary
    directly; an array of levels evolves with that fixed spectrum and Haar
    eigenvectors; "poi"/"gue" draw a fresh spectrum per sample.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (dims.d,):
        raise DimensionError(f"state vector length {psi0.shape} != d = {dims.d}")
    mode = spectra if isinstance(spectra, str) else "fixed"
    if mode == "fixed":
        fixed_phases = np.exp(-1j * np.asarray(spectra, dtype=float) * t)
    elif mode not in ("uniform", "poi", "gue"):
        raise ValueError(f"unknown evolution mode {spectra!r}")

    def chunk(gen: np.random.Generator, count: int):
        if mode == "uniform":
            u = sample_haar_unitaries(dims.d, count, gen)
            phi = u @ psi0
        else:
            w = sample_haar_unitaries(dims.d, count, gen)
            if mode == "fixed":
                phases = fixed_phases[None, :]
            elif mode == "poi":
                levels = gen.uniform(-2.0, 2.0, size=(count, dims.d))
                phases = np.exp(-1j * levels * t)
            else:
                levels = np.linalg.eigvalsh(sample_gue_hamiltonians(dims.d, count, gen))
                phases = np.exp(-1j * levels * t)
            inner = np.einsum("sji,j->si", w.conj(), psi0)
            phi = np.einsum("sij,sj->si", w, phases * inner)
        phi = phi.reshape(count, dims.d_s, dims.d_e)
        rho_s = np.einsum("sae,sbe->sab", phi, phi.conj())
        x = np.sum(rho_s.real**2 + rho_s.imag**2, axis=(1, 2))
        return np.array([x.sum(), (x**2).sum()])

    return _scalar_estimate(accumulate_chunks(chunk, n, rng, workers=workers), n)


def empirical_thermal_distance(
    levels,
    beta: float,
    rho0,
    t: float,
    n: int,
    rng: RngStream,
    workers: int | None = None,
) -> McEstimate:
    """Mean of ||rho_G - rho(t)||^2 over Haar eigenvectors (closed system).

    Both the Gibbs state and rho(t) share the eigenbasis W; the squared
    distance is evaluated in that basis, where the conjugation by W drops out
    of the Hilbert-Schmidt norm.
    """
    e = np.asarray(levels, dtype=float)
    rho0 = as_matrix(rho0)
    d = e.size
    if rho0.shape[0] != d:
        raise DimensionError(f"state dim {rho0.shape[0]} != spectrum length {d}")
    g = np.exp(-beta * (e - e.min()))
    gibbs_diag = g / g.sum()
    p = np.exp(-1j * e * t)

    def chunk(gen: np.random.Generator, count: int):
        w = sample_haar_unitaries(d, count, gen)
        b = np.einsum("sji,jk,skl->sil", w.conj(), rho0, w)
        c = p[None, :, None] * b * p.conj()[None, None, :]
        diff = c - np.diag(gibbs_diag)[None, :, :]
        x = np.sum(diff.real**2 + diff.imag**2, axis=(1, 2))
        return np.array([x.sum(), (x**2).sum()])

    return _scalar_estimate(accumulate_chunks(chunk, n, rng, workers=workers), n)
