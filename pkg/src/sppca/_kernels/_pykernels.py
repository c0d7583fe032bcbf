"""Pure-Python/numpy versions of the compiled kernels.

Same algorithms and the same floating-point operation order as
``_ckernels.pyx``; the RNG fills are bit-identical to the compiled path.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_TWO_PI = 6.283185307179586
_TWO_M53 = 1.0 / 9007199254740992.0


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


def _run(state, n):
    s0, s1, s2, s3 = (int(x) for x in state)
    out = [0] * n
    for i in range(n):
        out[i] = (_rotl((s0 + s3) & _MASK, 23) + s0) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3
    return out


def fill_u64(state, out):
    out[:] = np.array(_run(state, out.shape[0]), dtype=np.uint64)


def fill_uniform(state, out):
    raw = _run(state, out.shape[0])
    out[:] = [(x >> 11) * _TWO_M53 for x in raw]


def fill_normal(state, out):
    n = out.shape[0]
    raw = _run(state, 2 * ((n + 1) // 2))
    vals = []
    for i in range(0, len(raw), 2):
        u1 = 1.0 - (raw[i] >> 11) * _TWO_M53
        u2 = (raw[i + 1] >> 11) * _TWO_M53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = _TWO_PI * u2
        vals.append(r * math.cos(theta))
        vals.append(r * math.sin(theta))
    out[:] = vals[:n]


def jacobi_eigh(a_in, tol, max_sweeps):
    a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n)
    fro = math.sqrt(float(np.sum(a * a)))
    offmask = ~np.eye(n, dtype=bool)
    sweep = 0
    while True:
        off = math.sqrt(float(np.sum(a[offmask] ** 2)))
        if off <= tol * fro or sweep >= max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweep += 1
    return np.diag(a).copy(), v, sweep
