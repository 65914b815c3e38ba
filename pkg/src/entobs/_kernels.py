"""Batched cyclic Jacobi eigensolver for 4x4 complex Hermitian matrices.

Two implementations with identical contracts:

* ``_jacobi_numba`` loops matrix by matrix under ``@njit``;
* ``_jacobi_numpy`` applies each rotation to the whole batch at once.

``jacobi_eigh_batch`` is bound to one of them according to
:mod:`entobs._accel`.
"""

import numpy as np

from ._accel import HAS_NUMBA, njit

DIM = 4
PAIRS = tuple((p, q) for p in range(DIM - 1) for q in range(p + 1, DIM))


@njit(cache=True)
def _jacobi_numba(mats, rel_tol, max_sweeps):
    n = mats.shape[0]
    w = np.empty((n, DIM))
    vecs = np.empty((n, DIM, DIM), dtype=np.complex128)
    sweeps = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=np.bool_)

    for b in range(n):
        a = np.empty((DIM, DIM), dtype=np.complex128)
        for i in range(DIM):
            for j in range(DIM):
                a[i, j] = 0.5 * (mats[b, i, j] + np.conj(mats[b, j, i]))
        v = np.zeros((DIM, DIM), dtype=np.complex128)
        for i in range(DIM):
            v[i, i] = 1.0

        fro2 = 0.0
        for i in range(DIM):
            for j in range(DIM):
                fro2 += a[i, j].real ** 2 + a[i, j].imag ** 2
        thresh = rel_tol * np.sqrt(fro2)

        k = 0
        while True:
            off2 = 0.0
            for i in range(DIM):
                for j in range(DIM):
                    if i != j:
                        off2 += a[i, j].real ** 2 + a[i, j].imag ** 2
            if np.sqrt(off2) <= thresh:
                converged[b] = True
                break
            if k >= max_sweeps:
                break
            for p in range(DIM - 1):
                for q in range(p + 1, DIM):
                    r = abs(a[p, q])
                    if r == 0.0:
                        continue
                    e = a[p, q] / r
                    ec = np.conj(e)
                    app = a[p, p].real
                    aqq = a[q, q].real
                    theta = (aqq - app) / (2.0 * r)
                    if abs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    for i in range(DIM):
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * ec * aiq
                        a[i, q] = s * aip + c * ec * aiq
                        vip = v[i, p]
                        viq = v[i, q]
                        v[i, p] = c * vip - s * ec * viq
                        v[i, q] = s * vip + c * ec * viq
                    for j in range(DIM):
                        apj = a[p, j]
                        aqj = a[q, j]
                        a[p, j] = c * apj - s * e * aqj
                        a[q, j] = s * apj + c * e * aqj
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
            k += 1
        sweeps[b] = k

        # stable insertion sort, ascending
        lam = np.empty(DIM)
        order = np.empty(DIM, dtype=np.int64)
        for i in range(DIM):
            lam[i] = a[i, i].real
            order[i] = i
        for i in range(1, DIM):
            j = i
            while j > 0 and lam[order[j - 1]] > lam[order[j]]:
                tmp = order[j - 1]
                order[j - 1] = order[j]
                order[j] = tmp
                j -= 1
        for i in range(DIM):
            w[b, i] = lam[order[i]]
            for r_ in range(DIM):
                vecs[b, r_, i] = v[r_, order[i]]
    return w, vecs, sweeps, converged


def _jacobi_numpy(mats, rel_tol, max_sweeps):
    a = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
    n = a.shape[0]
    v = np.broadcast_to(np.eye(DIM, dtype=np.complex128), (n, DIM, DIM)).copy()
    thresh = rel_tol * np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    offmask = ~np.eye(DIM, dtype=bool)
    sweeps = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    rows = np.arange(n)

    k = 0
    while True:
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        converged = off <= thresh
        if converged.all() or k >= max_sweeps:
            break
        active = ~converged
        sweeps[active] += 1
        for p, q in PAIRS:
            apq = a[rows, p, q]
            r = np.abs(apq)
            live = active & (r > 0.0)
            rs = np.where(live, r, 1.0)
            e = np.where(live, apq / rs, 1.0)
            ec = np.conj(e)
            theta = np.where(live, (a[:, q, q].real - a[:, p, p].real) / (2.0 * rs), 0.0)
            with np.errstate(over="ignore"):
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(np.abs(theta) > 1e150, 0.5 / np.where(theta == 0.0, 1.0, theta), t)
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            cc = c[:, None]
            sec = (s * ec)[:, None]
            cec = (c * ec)[:, None]
            ss = s[:, None]
            for m in (a, v):
                mp = m[:, :, p].copy()
                mq = m[:, :, q].copy()
                m[:, :, p] = cc * mp - sec * mq
                m[:, :, q] = ss * mp + cec * mq
            se = (s * e)[:, None]
            ce = (c * e)[:, None]
            ap = a[:, p, :].copy()
            aq = a[:, q, :].copy()
            a[:, p, :] = cc * ap - se * aq
            a[:, q, :] = ss * ap + ce * aq

            a[live, p, q] = 0.0
            a[live, q, p] = 0.0
            a[:, p, p] = a[:, p, p].real
            a[:, q, q] = a[:, q, q].real
        k += 1

    lam = np.diagonal(a, axis1=1, axis2=2).real
    order = np.argsort(lam, axis=1, kind="stable")
    w = np.take_along_axis(lam, order, axis=1)
    vecs = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, vecs, sweeps, converged


if HAS_NUMBA:
    jacobi_eigh_batch = _jacobi_numba
else:
    jacobi_eigh_batch = _jacobi_numpy
