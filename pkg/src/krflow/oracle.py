"""Independent curvature verification by finite differences in C^n.

The oracle samples the metric matrix g_ij(z) on a local stencil, forms

    R_ijkl = -d_k dbar_l g_ij + g^{pq} (d_k g_iq) (dbar_l g_pj)

with fourth-order central differences in the 2n real coordinates, and
projects onto the adapted unitary frame.  It shares nothing with the
radial closed-form route except the metric samples themselves, so frame
components A, B, C can be cross-checked against curvature_components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StencilOutOfDomain
from .metric import MetricProfile, metric_at_point

STEP_SCALE = 1e-3   # stencil spacing per real direction, in units of |z|


def _real_to_z(u: np.ndarray) -> np.ndarray:
    return u[0::2] + 1j * u[1::2]


@dataclass(frozen=True)
class OracleTensor:
    """Frame curvature at one point, with the full component table."""

    z: np.ndarray
    a: float
    b: float | None
    c: float | None
    frame: np.ndarray           # R(e_a, e_b bar, e_c, e_d bar), shape (n,)*4
    off_pattern_max: float      # largest |component| outside the A/B/C pattern
    max_imag: float


def _pattern_allowed(n: int):
    allowed = set()
    for i in range(n):
        allowed.add((i, i, i, i))
        for j in range(n):
            if i != j:
                # B/C-type entries and their Kahler-symmetry images
                allowed.add((i, i, j, j))
                allowed.add((i, j, j, i))
    return allowed


def fd_curvature_oracle(m: MetricProfile, z, step_scale=STEP_SCALE) -> OracleTensor:
    z = np.asarray(z, dtype=complex)
    if z.shape != (m.n,):
        raise ValueError(f"point must have {m.n} complex coordinates")
    r = float(np.sum(np.abs(z) ** 2))
    if not (10 * m.grid.r_min <= r <= m.grid.r_max / 10):
        raise StencilOutOfDomain(
            f"|z|^2 = {r:.3g} outside [{10 * m.grid.r_min:.3g}, "
            f"{m.grid.r_max / 10:.3g}]")
    n = m.n
    dim = 2 * n
    eps = step_scale * math.sqrt(r)
    u0 = np.empty(dim)
    u0[0::2] = z.real
    u0[1::2] = z.imag

    def g_at(u):
        return metric_at_point(m, _real_to_z(u))

    # first derivatives dG/du_a, fourth order
    first = np.empty((dim, n, n), dtype=complex)
    plus1 = np.empty((dim, n, n), dtype=complex)
    minus1 = np.empty((dim, n, n), dtype=complex)
    plus2 = np.empty((dim, n, n), dtype=complex)
    minus2 = np.empty((dim, n, n), dtype=complex)
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = eps
        plus1[a] = g_at(u0 + e)
        minus1[a] = g_at(u0 - e)
        plus2[a] = g_at(u0 + 2 * e)
        minus2[a] = g_at(u0 - 2 * e)
        first[a] = (-plus2[a] + 8 * plus1[a] - 8 * minus1[a] + minus2[a]) / (12 * eps)

    # second derivatives (real Hessian of the matrix field)
    g0 = g_at(u0)
    hess = np.empty((dim, dim, n, n), dtype=complex)
    for a in range(dim):
        hess[a, a] = (-plus2[a] + 16 * plus1[a] - 30 * g0 + 16 * minus1[a]
                      - minus2[a]) / (12 * eps ** 2)
    for a in range(dim):
        ea = np.zeros(dim)
        ea[a] = eps
        for b in range(a + 1, dim):
            eb = np.zeros(dim)
            eb[b] = eps

            def d_b(u):
                return (-g_at(u + 2 * eb) + 8 * g_at(u + eb)
                        - 8 * g_at(u - eb) + g_at(u - 2 * eb)) / (12 * eps)

            hess[a, b] = (-d_b(u0 + 2 * ea) + 8 * d_b(u0 + ea)
                          - 8 * d_b(u0 - ea) + d_b(u0 - 2 * ea)) / (12 * eps)
            hess[b, a] = hess[a, b]

    # Wirtinger combinations: d_k = (d_x - i d_y)/2, dbar_l = (d_x + i d_y)/2
    dk = np.empty((n, n, n), dtype=complex)
    for k in range(n):
        dk[k] = (first[2 * k] - 1j * first[2 * k + 1]) / 2
    ddbar = np.empty((n, n, n, n), dtype=complex)
    for k in range(n):
        for el in range(n):
            xx = hess[2 * k, 2 * el]
            yy = hess[2 * k + 1, 2 * el + 1]
            xy = hess[2 * k, 2 * el + 1]
            yx = hess[2 * k + 1, 2 * el]
            ddbar[k, el] = ((xx + yy) + 1j * (xy - yx)) / 4

    # R_ijkl = -ddbar_kl g_ij + Minv[q,p] (dk g)_iq conj((dl g)_jp)
    minv = np.linalg.inv(g0)
    riem = np.empty((n, n, n, n), dtype=complex)
    for k in range(n):
        for el in range(n):
            corr = np.einsum("qp,iq,jp->ij", minv, dk[k], np.conj(dk[el]))
            riem[:, :, k, el] = -ddbar[k, el] + corr

    # adapted unitary frame: e1 along z scaled 1/sqrt(h), rest 1/sqrt(f)
    hv = float(m.eval_h(r)[0])
    fv = float(m.eval_f(r)[0])
    basis = np.zeros((n, n), dtype=complex)
    basis[0] = z / np.sqrt(r)
    # complete to a unitary basis by Gram-Schmidt over the standard vectors
    idx = 1
    for cand in np.eye(n, dtype=complex):
        if idx >= n:
            break
        v = cand - sum(np.vdot(basis[j], cand) * basis[j] for j in range(idx))
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis[idx] = v / norm
            idx += 1
    scale = np.array([1 / math.sqrt(hv)] + [1 / math.sqrt(fv)] * (n - 1))
    frame_vecs = basis * scale[:, None]

    frame = np.einsum("ijkl,ai,bj,ck,dl->abcd", riem,
                      frame_vecs, np.conj(frame_vecs),
                      frame_vecs, np.conj(frame_vecs))

    allowed = _pattern_allowed(n)
    off = 0.0
    for indices in np.ndindex(frame.shape):
        if indices not in allowed:
            off = max(off, abs(frame[indices]))
    a_val = float(frame[0, 0, 0, 0].real)
    b_val = float(frame[0, 0, 1, 1].real) if n >= 2 else None
    c_val = float(frame[1, 1, 1, 1].real) if n >= 2 else None
    return OracleTensor(z=z, a=a_val, b=b_val, c=c_val, frame=frame,
                        off_pattern_max=float(off),
                        max_imag=float(np.max(np.abs(frame.imag))))
