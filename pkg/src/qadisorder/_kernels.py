"""Compiled inner loops: counter-based Gaussians, perturbation, Gray-code walks."""

from __future__ import annotations

import math

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0xD1B54A32D192ED03)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_INV53 = 1.0 / 9007199254740992.0


@nb.njit(cache=True)
def mix64(x):
    # splitmix64 finalizer
    x = (x ^ (x >> _U30)) * _M1
    x = (x ^ (x >> _U27)) * _M2
    return x ^ (x >> _U31)


@nb.njit(cache=True)
def stream_key(master_seed, realization):
    return mix64(mix64(master_seed ^ _SEED_SALT) + (realization + _ONE) * _GOLDEN)


@nb.njit(cache=True)
def stream_word(key, counter):
    return mix64(key + (counter + _ONE) * _GOLDEN)


@nb.njit(cache=True)
def stream_normal(key, parameter):
    """Standard normal for one parameter slot (Box-Muller on two words)."""
    p = np.uint64(parameter)
    w1 = stream_word(key, _TWO * p)
    w2 = stream_word(key, _TWO * p + _ONE)
    u1 = (float(w1 >> _U11) + 1.0) * _INV53
    u2 = float(w2 >> _U11) * _INV53
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@nb.njit(cache=True)
def normals(master_seed, realization, count):
    key = stream_key(master_seed, realization)
    out = np.empty(count)
    for p in range(count):
        out[p] = stream_normal(key, p)
    return out


@nb.njit(cache=True)
def _finish(v, quantize, clamp, lo, hi):
    if quantize:
        v = round(v * 1000.0) / 1000.0
    if clamp:
        if v < lo:
            v = lo
        elif v > hi:
            v = hi
    return v


@nb.njit(cache=True)
def perturb_into(h0, j0, active, sigma_h, sigma_j, quantize, clamp, key, h_out, j_out):
    n = h0.shape[0]
    for i in range(n):
        v = h0[i]
        if active[i] and sigma_h > 0.0:
            v += sigma_h * stream_normal(key, i)
        h_out[i] = _finish(v, quantize, clamp, -2.0, 2.0)
    for e in range(j0.shape[0]):
        v = j0[e]
        if sigma_j > 0.0:
            v += sigma_j * stream_normal(key, n + e)
        j_out[e] = _finish(v, quantize, clamp, -1.0, 1.0)


@nb.njit(cache=True)
def _walk_energy_start(h, jv):
    e = 0.0
    for i in range(h.shape[0]):
        e += h[i]
    for k in range(jv.shape[0]):
        e += jv[k]
    return e


@nb.njit(cache=True)
def _flip_delta(i, spins, h, jv, indptr, nbr, eidx):
    local = h[i]
    for p in range(indptr[i], indptr[i + 1]):
        local += jv[eidx[p]] * spins[nbr[p]]
    return -2.0 * spins[i] * local


@nb.njit(cache=True)
def _lowest_bit(k):
    i = 0
    while not (k >> i) & 1:
        i += 1
    return i


@nb.njit(cache=True)
def walk_minimum(h, jv, indptr, nbr, eidx):
    """Gray-code walk over all 2^n configurations; returns min walked energy."""
    n = h.shape[0]
    spins = np.ones(n)
    e = _walk_energy_start(h, jv)
    best = e
    for k in range(1, 1 << n):
        i = _lowest_bit(k)
        e += _flip_delta(i, spins, h, jv, indptr, nbr, eidx)
        spins[i] = -spins[i]
        if e < best:
            best = e
    return best


@nb.njit(cache=True)
def walk_below(h, jv, indptr, nbr, eidx, threshold):
    """Bit patterns whose walked energy is <= threshold, in walk order."""
    n = h.shape[0]
    spins = np.ones(n)
    e = _walk_energy_start(h, jv)
    found = [np.int64(x) for x in range(0)]
    bits = np.int64(0)
    if e <= threshold:
        found.append(bits)
    for k in range(1, 1 << n):
        i = _lowest_bit(k)
        e += _flip_delta(i, spins, h, jv, indptr, nbr, eidx)
        spins[i] = -spins[i]
        bits ^= np.int64(1) << i
        if e <= threshold:
            found.append(bits)
    return np.array(found, dtype=np.int64)


@nb.njit(cache=True)
def walk_energies(h, jv, indptr, nbr, eidx):
    """Walked energy of every configuration, indexed by bit pattern."""
    n = h.shape[0]
    spins = np.ones(n)
    out = np.empty(1 << n)
    e = _walk_energy_start(h, jv)
    bits = 0
    out[0] = e
    for k in range(1, 1 << n):
        i = _lowest_bit(k)
        e += _flip_delta(i, spins, h, jv, indptr, nbr, eidx)
        spins[i] = -spins[i]
        bits ^= 1 << i
        out[bits] = e
    return out


@nb.njit(cache=True)
def _walk_argmin(h, jv, indptr, nbr, eidx, tie_tol):
    # ties within tie_tol of the running best keep the lowest bit pattern
    n = h.shape[0]
    spins = np.ones(n)
    e = _walk_energy_start(h, jv)
    best = e
    best_bits = 0
    bits = 0
    for k in range(1, 1 << n):
        i = _lowest_bit(k)
        e += _flip_delta(i, spins, h, jv, indptr, nbr, eidx)
        spins[i] = -spins[i]
        bits ^= 1 << i
        if e < best - tie_tol:
            best = e
            best_bits = bits
        elif e <= best + tie_tol and bits < best_bits:
            if e < best:
                best = e
            best_bits = bits
    return best_bits


@nb.njit(cache=True)
def ensemble_chunk(
    h0, j0, active, active_idx, full_bit, indptr, nbr, eidx,
    sigma_h, sigma_j, quantize, clamp, master_seed, first, count, tie_tol,
):
    """Perturb, solve and return the full-layout ground bit pattern per realization."""
    n = h0.shape[0]
    na = active_idx.shape[0]
    h_full = np.empty(n)
    jv = np.empty(j0.shape[0])
    hc = np.empty(na)
    out = np.empty(count, dtype=np.int64)
    for r in range(count):
        key = stream_key(master_seed, np.uint64(first + r))
        perturb_into(h0, j0, active, sigma_h, sigma_j, quantize, clamp, key, h_full, jv)
        for k in range(na):
            hc[k] = h_full[active_idx[k]]
        cb = _walk_argmin(hc, jv, indptr, nbr, eidx, tie_tol)
        fb = np.int64(0)
        for k in range(na):
            if (cb >> k) & 1:
                fb |= full_bit[k]
        out[r] = fb
    return out


def adjacency(n: int, edges: np.ndarray):
    """CSR neighbour lists (indptr, neighbour, edge index) for an edge array."""
    deg = np.zeros(n + 1, dtype=np.int64)
    for i, j in edges:
        deg[i + 1] += 1
        deg[j + 1] += 1
    indptr = np.cumsum(deg)
    nbr = np.empty(indptr[-1], dtype=np.int64)
    eidx = np.empty(indptr[-1], dtype=np.int64)
    fill = indptr[:-1].copy()
    for k, (i, j) in enumerate(edges):
        nbr[fill[i]] = j
        eidx[fill[i]] = k
        fill[i] += 1
        nbr[fill[j]] = i
        eidx[fill[j]] = k
        fill[j] += 1
    return indptr, nbr, eidx


@nb.njit(cache=True)
def _horner(coeffs, s):
    v = 0.0
    for c in coeffs:
        v = v * s + c
    return v


@nb.njit(cache=True)
def _apply(psi, diag, a, n, out):
    dim = psi.shape[0]
    for z in range(dim):
        acc = 0j
        for i in range(n):
            acc += psi[z ^ (1 << i)]
        out[z] = diag[z] * psi[z] + a * acc


@nb.njit(cache=True)
def _deriv(psi, s, e_fin, a_coeffs, b_coeffs, scale, n, out):
    # d psi / ds = -i * scale * (A(s) X + B(s) diag(E)) psi
    a = _horner(a_coeffs, s)
    b = _horner(b_coeffs, s)
    _apply(psi, b * e_fin, a, n, out)
    for z in range(psi.shape[0]):
        out[z] = -1j * scale * out[z]


@nb.njit(cache=True)
def rk4_propagate(psi0, e_fin, a_coeffs, b_coeffs, scale, n, steps):
    """Fixed-step RK4 over s in [0, 1] with renormalization after each step.

    Returns the final state and the largest pre-renormalization norm error.
    """
    psi = psi0.copy()
    dim = psi.shape[0]
    k1 = np.empty(dim, dtype=np.complex128)
    k2 = np.empty(dim, dtype=np.complex128)
    k3 = np.empty(dim, dtype=np.complex128)
    k4 = np.empty(dim, dtype=np.complex128)
    tmp = np.empty(dim, dtype=np.complex128)
    ds = 1.0 / steps
    drift = 0.0
    for m in range(steps):
        s = m * ds
        _deriv(psi, s, e_fin, a_coeffs, b_coeffs, scale, n, k1)
        for z in range(dim):
            tmp[z] = psi[z] + 0.5 * ds * k1[z]
        _deriv(tmp, s + 0.5 * ds, e_fin, a_coeffs, b_coeffs, scale, n, k2)
        for z in range(dim):
            tmp[z] = psi[z] + 0.5 * ds * k2[z]
        _deriv(tmp, s + 0.5 * ds, e_fin, a_coeffs, b_coeffs, scale, n, k3)
        for z in range(dim):
            tmp[z] = psi[z] + ds * k3[z]
        _deriv(tmp, s + ds, e_fin, a_coeffs, b_coeffs, scale, n, k4)
        norm2 = 0.0
        for z in range(dim):
            psi[z] += ds / 6.0 * (k1[z] + 2.0 * k2[z] + 2.0 * k3[z] + k4[z])
            norm2 += psi[z].real ** 2 + psi[z].imag ** 2
        norm = math.sqrt(norm2)
        if abs(norm - 1.0) > drift:
            drift = abs(norm - 1.0)
        for z in range(dim):
            psi[z] /= norm
    return psi, drift
