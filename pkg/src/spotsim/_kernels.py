"""Fused forward-Euler update kernels.

One pass per step computes the periodic 5-point Laplacian, the reaction
terms, and the Euler update for every species, clamps negative results to
zero, and reports the first non-finite cell.  The kernels are compiled
single-threaded with strict IEEE-754 semantics (no fastmath, no fused
contraction), so results are bit-reproducible and independent of worker
count.  tests/oracles.py holds numpy mirrors with the identical expression
structure; the backends are required to agree bit-for-bit.

Cell scan order is row-major (x fastest).  The returned `bad` index encodes
species_index * n_cells + flat_cell (first offender in scan order), or -1.

Positive subnormal results are flushed to exact zero: extinct regions
otherwise decay into denormal range and trap every later step in microcode
slow paths (a 10x slowdown), and 1e-308 is far below any physical scale
here.  The flush is an explicit branch, so it is deterministic and part of
the reference arithmetic.
"""

import math

from numba import njit


@njit(cache=True)
def step_gs(a, b, na, nb, hx2, hy2, d_a, d_b, r, k, dt):
    ny, nx = a.shape
    n_cells = ny * nx
    clamped = 0
    bad = -1
    for j in range(ny):
        jm = ny - 1 if j == 0 else j - 1
        jp = 0 if j == ny - 1 else j + 1
        for i in range(nx):
            im = nx - 1 if i == 0 else i - 1
            ip = 0 if i == nx - 1 else i + 1
            flat = j * nx + i
            la = (a[j, im] + a[j, ip] - 2.0 * a[j, i]) / hx2 + (
                a[jm, i] + a[jp, i] - 2.0 * a[j, i]
            ) / hy2
            lb = (b[j, im] + b[j, ip] - 2.0 * b[j, i]) / hx2 + (
                b[jm, i] + b[jp, i] - 2.0 * b[j, i]
            ) / hy2
            ab2 = a[j, i] * b[j, i] * b[j, i]
            da = d_a * la - ab2 + r * (1.0 - a[j, i])
            db = d_b * lb + ab2 - k * b[j, i]
            va = a[j, i] + dt * da
            vb = b[j, i] + dt * db
            if not math.isfinite(va):
                if bad < 0:
                    bad = flat
            elif va < 0.0:
                va = 0.0
                clamped += 1
            elif va < 2.2250738585072014e-308:
                va = 0.0
            if not math.isfinite(vb):
                if bad < 0:
                    bad = n_cells + flat
            elif vb < 0.0:
                vb = 0.0
                clamped += 1
            elif vb < 2.2250738585072014e-308:
                vb = 0.0
            na[j, i] = va
            nb[j, i] = vb
    return clamped, bad


@njit(cache=True)
def step_waste(a, b, p, na, nb, np_, hx2, hy2, d_a, d_b, r, k, w, k_p, dt):
    ny, nx = a.shape
    n_cells = ny * nx
    clamped = 0
    bad = -1
    for j in range(ny):
        jm = ny - 1 if j == 0 else j - 1
        jp = 0 if j == ny - 1 else j + 1
        for i in range(nx):
            im = nx - 1 if i == 0 else i - 1
            ip = 0 if i == nx - 1 else i + 1
            flat = j * nx + i
            la = (a[j, im] + a[j, ip] - 2.0 * a[j, i]) / hx2 + (
                a[jm, i] + a[jp, i] - 2.0 * a[j, i]
            ) / hy2
            lb = (b[j, im] + b[j, ip] - 2.0 * b[j, i]) / hx2 + (
                b[jm, i] + b[jp, i] - 2.0 * b[j, i]
            ) / hy2
            gate = math.exp(-w * p[j, i])
            gab2 = gate * (a[j, i] * b[j, i] * b[j, i])
            da = d_a * la - gab2 + r * (1.0 - a[j, i])
            db = d_b * lb + gab2 - k * b[j, i]
            dp = k * b[j, i] - k_p * p[j, i]
            va = a[j, i] + dt * da
            vb = b[j, i] + dt * db
            vp = p[j, i] + dt * dp
            if not math.isfinite(va):
                if bad < 0:
                    bad = flat
            elif va < 0.0:
                va = 0.0
                clamped += 1
            elif va < 2.2250738585072014e-308:
                va = 0.0
            if not math.isfinite(vb):
                if bad < 0:
                    bad = n_cells + flat
            elif vb < 0.0:
                vb = 0.0
                clamped += 1
            elif vb < 2.2250738585072014e-308:
                vb = 0.0
            if not math.isfinite(vp):
                if bad < 0:
                    bad = 2 * n_cells + flat
            elif vp < 0.0:
                vp = 0.0
                clamped += 1
            elif vp < 2.2250738585072014e-308:
                vp = 0.0
            na[j, i] = va
            nb[j, i] = vb
            np_[j, i] = vp
    return clamped, bad


@njit(cache=True)
def step_tail(a, b, c, na, nb, nc, hx2, hy2, d_a, d_b, d_c, r, k1, k2, k3, dt):
    ny, nx = a.shape
    n_cells = ny * nx
    clamped = 0
    bad = -1
    for j in range(ny):
        jm = ny - 1 if j == 0 else j - 1
        jp = 0 if j == ny - 1 else j + 1
        for i in range(nx):
            im = nx - 1 if i == 0 else i - 1
            ip = 0 if i == nx - 1 else i + 1
            flat = j * nx + i
            la = (a[j, im] + a[j, ip] - 2.0 * a[j, i]) / hx2 + (
                a[jm, i] + a[jp, i] - 2.0 * a[j, i]
            ) / hy2
            lb = (b[j, im] + b[j, ip] - 2.0 * b[j, i]) / hx2 + (
                b[jm, i] + b[jp, i] - 2.0 * b[j, i]
            ) / hy2
            lc = (c[j, im] + c[j, ip] - 2.0 * c[j, i]) / hx2 + (
                c[jm, i] + c[jp, i] - 2.0 * c[j, i]
            ) / hy2
            ab2 = a[j, i] * b[j, i] * b[j, i]
            bc2 = b[j, i] * c[j, i] * c[j, i]
            da = d_a * la - ab2 + r * (1.0 - a[j, i])
            db = d_b * lb + ab2 - k1 * b[j, i] - k2 * bc2
            dc = d_c * lc + k2 * bc2 - k3 * c[j, i]
            va = a[j, i] + dt * da
            vb = b[j, i] + dt * db
            vc = c[j, i] + dt * dc
            if not math.isfinite(va):
                if bad < 0:
                    bad = flat
            elif va < 0.0:
                va = 0.0
                clamped += 1
            elif va < 2.2250738585072014e-308:
                va = 0.0
            if not math.isfinite(vb):
                if bad < 0:
                    bad = n_cells + flat
            elif vb < 0.0:
                vb = 0.0
                clamped += 1
            elif vb < 2.2250738585072014e-308:
                vb = 0.0
            if not math.isfinite(vc):
                if bad < 0:
                    bad = 2 * n_cells + flat
            elif vc < 0.0:
                vc = 0.0
                clamped += 1
            elif vc < 2.2250738585072014e-308:
                vc = 0.0
            na[j, i] = va
            nb[j, i] = vb
            nc[j, i] = vc
    return clamped, bad
