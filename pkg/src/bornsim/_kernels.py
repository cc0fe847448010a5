"""Numba kernels for the fixed-step 4th-order integrators.

The Lindblad right-hand side exploits the bidiagonal structure of the
annihilation operator (a[i, i+1] = s_i on the dot x photon product space),
so the dissipator costs O(D^2), and the sparsity of the Hamiltonians (at
most three nonzeros per row), so the commutator costs O(nnz * D).
"""

import numpy as np
from numba import njit


def csr_hamiltonian(h, tol=0.0):
    """CSR arrays (indptr, indices, data) of a Hermitian matrix.

    Both model Hamiltonians have at most three nonzeros per row, so the
    commutator costs O(nnz * D) instead of O(D^3).
    """
    d = h.shape[0]
    indptr = np.zeros(d + 1, dtype=np.int64)
    indices = []
    data = []
    for i in range(d):
        for j in range(d):
            if abs(h[i, j]) > tol:
                indices.append(j)
                data.append(h[i, j])
        indptr[i + 1] = len(indices)
    return indptr, np.asarray(indices, dtype=np.int64), np.asarray(data, dtype=np.complex128)


@njit(cache=True)
def _rhs_into(out, rho, hp, hi, hv, s, nd, md, gdown, gup, t1, t2):
    """out = -i[h, rho] + gdown*D[a] rho + gup*D[a+] rho.

    (hp, hi, hv) is the CSR form of the (Hermitian) Hamiltonian; t2 reuses
    it columnwise via H[k, j] = conj(H[j, k]).
    """
    d = rho.shape[0]
    for i in range(d):
        for j in range(d):
            t1[i, j] = 0.0
            t2[i, j] = 0.0
    for i in range(d):
        for p in range(hp[i], hp[i + 1]):
            k = hi[p]
            v = hv[p]
            vc = np.conj(v)
            for j in range(d):
                t1[i, j] += v * rho[k, j]  # (H rho)[i, j]
                t2[j, i] += rho[j, k] * vc  # (rho H)[j, i], column i of rho H
    for i in range(d):
        for j in range(d):
            v = -1j * (t1[i, j] - t2[i, j])
            if gdown > 0.0:
                if i < d - 1 and j < d - 1:
                    v += gdown * s[i] * s[j] * rho[i + 1, j + 1]
                v -= gdown * 0.5 * (nd[i] + nd[j]) * rho[i, j]
            if gup > 0.0:
                if i > 0 and j > 0:
                    v += gup * s[i - 1] * s[j - 1] * rho[i - 1, j - 1]
                v -= gup * 0.5 * (md[i] + md[j]) * rho[i, j]
            out[i, j] = v


@njit(cache=True)
def lindblad_rhs_matrix(rho, hp, hi, hv, s, nd, md, gdown, gup):
    d = rho.shape[0]
    out = np.empty((d, d), dtype=np.complex128)
    t1 = np.empty((d, d), dtype=np.complex128)
    t2 = np.empty((d, d), dtype=np.complex128)
    _rhs_into(out, rho, hp, hi, hv, s, nd, md, gdown, gup, t1, t2)
    return out


@njit(cache=True)
def _record_row(rec, r, rho, h, nd_tot, i0, vp, vm, int_n, int_p0):
    d = rho.shape[0]
    nphot = 0.0
    tr = 0.0
    for i in range(d):
        nphot += nd_tot[i] * rho[i, i].real
        tr += rho[i, i].real
    energy = 0.0
    for i in range(d):
        for j in range(d):
            energy += (h[i, j] * rho[j, i]).real
    # quadratic forms <v| rho |w>
    pp = 0.0
    pm = 0.0
    ppm = 0.0 + 0.0j
    for i in range(d):
        if vp[i] != 0.0 or vm[i] != 0.0:
            acc_p = 0.0 + 0.0j
            acc_m = 0.0 + 0.0j
            for j in range(d):
                acc_p += rho[i, j] * vp[j]
                acc_m += rho[i, j] * vm[j]
            pp += (np.conj(vp[i]) * acc_p).real
            pm += (np.conj(vm[i]) * acc_m).real
            ppm += np.conj(vp[i]) * acc_m
    rec[r, 0] = nphot
    rec[r, 1] = pp
    rec[r, 2] = pm
    rec[r, 3] = ppm.real
    rec[r, 4] = ppm.imag
    rec[r, 5] = rho[i0, i0].real
    rec[r, 6] = energy
    rec[r, 7] = int_n
    rec[r, 8] = int_p0
    rec[r, 9] = abs(tr - 1.0)


@njit(cache=True)
def rk4_evolve(rho0, h, hp, hi, hv, s, nd, md, gdown, gup, dt, n_steps, stride, nd_tot, i0, vp, vm, chk_rec_idx):
    """Fixed-step RK4 over n_steps; records every `stride` steps.

    Record columns: n_photon, P+, P-, Re P+-, Im P+-, P0, <H>,
    trapezoid(<a+a>), trapezoid(P0), |trace - 1|.
    Returns (records, checkpoint states, final state).
    """
    d = rho0.shape[0]
    rho = rho0.copy()
    k1 = np.empty((d, d), dtype=np.complex128)
    k2 = np.empty((d, d), dtype=np.complex128)
    k3 = np.empty((d, d), dtype=np.complex128)
    k4 = np.empty((d, d), dtype=np.complex128)
    yt = np.empty((d, d), dtype=np.complex128)
    t1 = np.empty((d, d), dtype=np.complex128)
    t2 = np.empty((d, d), dtype=np.complex128)

    n_rec = n_steps // stride + 1
    rec = np.zeros((n_rec, 10))
    n_chk = chk_rec_idx.shape[0]
    chk = np.zeros((n_chk, d, d), dtype=np.complex128)

    int_n = 0.0
    int_p0 = 0.0
    nphot_prev = 0.0
    p0_prev = 0.0
    for i in range(d):
        nphot_prev += nd_tot[i] * rho[i, i].real
    p0_prev = rho[i0, i0].real

    _record_row(rec, 0, rho, h, nd_tot, i0, vp, vm, int_n, int_p0)
    r = 0
    c = 0
    while c < n_chk and chk_rec_idx[c] == 0:
        chk[c] = rho
        c += 1

    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        _rhs_into(k1, rho, hp, hi, hv, s, nd, md, gdown, gup, t1, t2)
        for i in range(d):
            for j in range(d):
                yt[i, j] = rho[i, j] + half * k1[i, j]
        _rhs_into(k2, yt, hp, hi, hv, s, nd, md, gdown, gup, t1, t2)
        for i in range(d):
            for j in range(d):
                yt[i, j] = rho[i, j] + half * k2[i, j]
        _rhs_into(k3, yt, hp, hi, hv, s, nd, md, gdown, gup, t1, t2)
        for i in range(d):
            for j in range(d):
                yt[i, j] = rho[i, j] + dt * k3[i, j]
        _rhs_into(k4, yt, hp, hi, hv, s, nd, md, gdown, gup, t1, t2)
        for i in range(d):
            for j in range(d):
                rho[i, j] += sixth * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])

        nphot = 0.0
        for i in range(d):
            nphot += nd_tot[i] * rho[i, i].real
        p0 = rho[i0, i0].real
        int_n += half * (nphot_prev + nphot)
        int_p0 += half * (p0_prev + p0)
        nphot_prev = nphot
        p0_prev = p0

        if step % stride == 0:
            r += 1
            _record_row(rec, r, rho, h, nd_tot, i0, vp, vm, int_n, int_p0)
            while c < n_chk and chk_rec_idx[c] == r:
                chk[c] = rho
                c += 1
    return rec, chk, rho


@njit(cache=True)
def rk4_dressed_exact(pp0, pm0, ppm0, p00, kappa, gap, theta, dt, n_steps, stride):
    """RK4 for the exact three-level rate equations in the dressed basis.

    State (P+, P-, P+-, P0); same stepper and step policy as the full
    integrator so that deviations are attributable to physics, not method.
    Record columns: P+, P-, Re P+-, Im P+-, P0, <a+a>.
    """
    c2 = np.cos(theta / 2.0) ** 2
    s2 = np.sin(theta / 2.0) ** 2
    sth = np.sin(theta)

    n_rec = n_steps // stride + 1
    rec = np.zeros((n_rec, 6))

    pp = pp0
    pm = pm0
    ppm = ppm0
    p0 = p00

    rec[0, 0] = pp
    rec[0, 1] = pm
    rec[0, 2] = ppm.real
    rec[0, 3] = ppm.imag
    rec[0, 4] = p0
    rec[0, 5] = c2 * pp + s2 * pm - sth * ppm.real
    r = 0
    for step in range(1, n_steps + 1):
        # RK4 stages on the 4-component state
        dpp1, dpm1, dppm1, dp01 = _dressed_rhs(pp, pm, ppm, kappa, gap, c2, s2, sth)
        a_pp = pp + 0.5 * dt * dpp1
        a_pm = pm + 0.5 * dt * dpm1
        a_ppm = ppm + 0.5 * dt * dppm1
        dpp2, dpm2, dppm2, dp02 = _dressed_rhs(a_pp, a_pm, a_ppm, kappa, gap, c2, s2, sth)
        b_pp = pp + 0.5 * dt * dpp2
        b_pm = pm + 0.5 * dt * dpm2
        b_ppm = ppm + 0.5 * dt * dppm2
        dpp3, dpm3, dppm3, dp03 = _dressed_rhs(b_pp, b_pm, b_ppm, kappa, gap, c2, s2, sth)
        c_pp = pp + dt * dpp3
        c_pm = pm + dt * dpm3
        c_ppm = ppm + dt * dppm3
        dpp4, dpm4, dppm4, dp04 = _dressed_rhs(c_pp, c_pm, c_ppm, kappa, gap, c2, s2, sth)
        pp += dt / 6.0 * (dpp1 + 2.0 * (dpp2 + dpp3) + dpp4)
        pm += dt / 6.0 * (dpm1 + 2.0 * (dpm2 + dpm3) + dpm4)
        ppm += dt / 6.0 * (dppm1 + 2.0 * (dppm2 + dppm3) + dppm4)
        p0 += dt / 6.0 * (dp01 + 2.0 * (dp02 + dp03) + dp04)
        if step % stride == 0:
            r += 1
            rec[r, 0] = pp
            rec[r, 1] = pm
            rec[r, 2] = ppm.real
            rec[r, 3] = ppm.imag
            rec[r, 4] = p0
            rec[r, 5] = c2 * pp + s2 * pm - sth * ppm.real
    return rec


@njit(cache=True)
def _dressed_rhs(pp, pm, ppm, kappa, gap, c2, s2, sth):
    x = ppm.real
    dpp = -kappa * c2 * pp + 0.5 * kappa * sth * x
    dpm = -kappa * s2 * pm + 0.5 * kappa * sth * x
    dppm = -(1j * gap + 0.5 * kappa) * ppm + 0.25 * kappa * sth * (pp + pm)
    dp0 = kappa * (c2 * pp + s2 * pm - sth * x)
    return dpp, dpm, dppm, dp0
