"""Dense exact linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries in [0, p).  Row reduction and
bulk reduction against an echelon basis are the hot loops of every ideal
computation, so they are compiled with numba when available; a pure-numpy
fallback implements the same contract.  Backend selection:

    MIPINV_NUMBA=1   require numba (ImportError if missing)
    MIPINV_NUMBA=0   force the numpy path
    unset            prefer numba, silently fall back

Echelon form is fully reduced (pivots 1, zeros above and below) with pivot
columns chosen left to right, so results are deterministic.
"""

from __future__ import annotations

import os

import numpy as np

_NUMBA_ENV = os.environ.get("MIPINV_NUMBA", "").strip()

if _NUMBA_ENV == "0":
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover
        if _NUMBA_ENV == "1":
            raise
        _HAVE_NUMBA = False


def using_numba() -> bool:
    return _HAVE_NUMBA


def inverse_table(p: int) -> np.ndarray:
    """inv[a] = a^-1 mod p for a in [1, p); inv[0] = 0."""
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


# ---------------------------------------------------------------------------
# numba kernels


if _HAVE_NUMBA:

    @njit(cache=True)
    def _rref_nb(a, p, inv):
        m, n = a.shape
        piv = np.empty(min(m, n), dtype=np.int64)
        r = 0
        for c in range(n):
            sel = -1
            for i in range(r, m):
                if a[i, c] != 0:
                    sel = i
                    break
            if sel == -1:
                continue
            if sel != r:
                for j in range(c, n):
                    t = a[r, j]
                    a[r, j] = a[sel, j]
                    a[sel, j] = t
            s = inv[a[r, c]]
            if s != 1:
                for j in range(c, n):
                    a[r, j] = (a[r, j] * s) % p
            for i in range(m):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for j in range(c, n):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            piv[r] = c
            r += 1
            if r == m:
                break
        return piv[:r].copy()

    @njit(cache=True)
    def _reduce_nb(rows, basis, piv, p):
        k, n = rows.shape
        nb = basis.shape[0]
        for i in range(k):
            for b in range(nb):
                c = piv[b]
                f = rows[i, c]
                if f != 0:
                    for j in range(c, n):
                        rows[i, j] = (rows[i, j] - f * basis[b, j]) % p

    @njit(cache=True)
    def _mul_accum_nb(out, table, a_idx, a_val, b_idx, b_val, p):
        for i in range(a_idx.shape[0]):
            ai = a_idx[i]
            av = a_val[i]
            for j in range(b_idx.shape[0]):
                k = table[ai, b_idx[j]]
                out[k] = (out[k] + av * b_val[j]) % p


# ---------------------------------------------------------------------------
# numpy fallbacks


def _rref_np(a, p, inv):
    m, n = a.shape
    piv = []
    r = 0
    for c in range(n):
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        sel = r + nz[0]
        if sel != r:
            a[[r, sel]] = a[[sel, r]]
        s = inv[a[r, c]]
        if s != 1:
            a[r] = (a[r] * s) % p
        fac = a[:, c].copy()
        fac[r] = 0
        mask = fac != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(fac[mask], a[r])) % p
        piv.append(c)
        r += 1
        if r == m:
            break
    return np.asarray(piv, dtype=np.int64)

def _reduce_np(rows, basis, piv, p):
    for b in range(basis.shape[0]):
        c = piv[b]
        fac = rows[:, c].copy()
        mask = fac != 0
        if mask.any():
            rows[mask] = (rows[mask] - np.outer(fac[mask], basis[b])) % p

def _mul_accum_np(out, table, a_idx, a_val, b_idx, b_val, p):
    tgt = table[np.ix_(a_idx, b_idx)].ravel()
    vals = np.outer(a_val, b_val).ravel()
    np.add.at(out, tgt, vals)
    out %= p


# ---------------------------------------------------------------------------
# public API


def as_matrix(rows, n: int) -> np.ndarray:
    if len(rows) == 0:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def rref(mat: np.ndarray, p: int):
    """Reduced row echelon form in place semantics on a copy.

    Returns (basis, pivots): basis holds the nonzero rows, pivots the pivot
    column of each row in increasing order.
    """
    a = np.array(mat, dtype=np.int64, copy=True)
    a %= p
    if a.size == 0:
        return a.reshape(0, mat.shape[1] if mat.ndim == 2 else 0), np.zeros(0, dtype=np.int64)
    inv = inverse_table(p)
    if _HAVE_NUMBA:
        piv = _rref_nb(a, p, inv)
    else:
        piv = _rref_np(a, p, inv)
    return a[: len(piv)].copy(), piv


def reduce_rows(rows: np.ndarray, basis: np.ndarray, piv: np.ndarray, p: int) -> np.ndarray:
    """Residues of rows after elimination against an rref basis."""
    out = np.array(rows, dtype=np.int64, copy=True)
    out %= p
    if out.size == 0 or basis.shape[0] == 0:
        return out
    if _HAVE_NUMBA:
        _reduce_nb(out, basis, piv, p)
    else:
        _reduce_np(out, basis, piv, p)
    return out


def in_span(row: np.ndarray, basis: np.ndarray, piv: np.ndarray, p: int) -> bool:
    res = reduce_rows(row.reshape(1, -1), basis, piv, p)
    return not res.any()


def coordinates(row: np.ndarray, basis: np.ndarray, piv: np.ndarray, p: int):
    """Coefficients expressing row over an rref basis, or None if outside."""
    r = np.array(row, dtype=np.int64, copy=True) % p
    coeffs = np.zeros(basis.shape[0], dtype=np.int64)
    for b in range(basis.shape[0]):
        f = r[piv[b]]
        if f:
            coeffs[b] = f
            r = (r - f * basis[b]) % p
    if r.any():
        return None
    return coeffs


def mul_accumulate(out, table, a_idx, a_val, b_idx, b_val, p):
    """out[table[i, j]] += a_val[i] * b_val[j] over the index supports, mod p."""
    if _HAVE_NUMBA:
        _mul_accum_nb(out, table, a_idx, a_val, b_idx, b_val, p)
    else:
        _mul_accum_np(out, table, a_idx, a_val, b_idx, b_val, p)


def stack_rref(basis, piv, new_rows, p):
    """Extend an rref basis by new rows; returns (basis, piv, grew)."""
    res = reduce_rows(new_rows, basis, piv, p)
    res = res[res.any(axis=1)]
    if res.shape[0] == 0:
        return basis, piv, False
    merged = np.vstack([basis, res]) if basis.shape[0] else res
    b2, p2 = rref(merged, p)
    return b2, p2, b2.shape[0] > basis.shape[0]
