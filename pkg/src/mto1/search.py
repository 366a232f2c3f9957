"""Deterministic search for x^r h(x^s) forms hitting a target multiplicity.

The space is h = 1 + c1 x + ... + cD x^D (constant term normalized to 1:
scaling h by a nonzero constant composes f with a permutation and cannot
change any verdict, and an h with h(0) = 0 is a smaller-degree form with a
bigger r).  Candidates are enumerated lexicographically, filtered for
rootlessness on U_ell, pushed through the subgroup prediction for every
admissible r, and every hit is re-verified by brute force before it is
reported.
"""

from __future__ import annotations

import math

import numpy as np

from .cyclotomic import CycloForm, brute_verdict_star
from .galois import Poly


class BudgetError(RuntimeError):
    """The candidate space exceeds the configured budget."""


DEFAULT_BUDGET = 1 << 25


def admissible_r_values(q, s, m, r_values=None):
    """r in [1, q-1] whose (m1, m2) pass the arithmetic conjuncts of the
    subgroup reduction for the target m; the g-check remains per-h."""
    ell = (q - 1) // s
    out = []
    for r in (r_values if r_values is not None else range(1, q)):
        m1 = math.gcd(r, s)
        if m % m1:
            continue
        m2 = m // m1
        if m2 > ell:
            continue
        if not s * (ell % m2) < m:
            continue
        out.append((r, m1, m2))
    return out


def search_forms(spec, s, deg, m, r_values=None, budget=DEFAULT_BUDGET):
    """All (r, h) with h in the normalized degree-<=deg space such that
    x^r h(x^s) is m-to-1 on F_q^*; hits sorted by (h coefficients, r)."""
    q = spec.q
    if (q - 1) % s:
        raise ValueError(f"s = {s} does not divide q-1 = {q - 1}")
    space = q ** deg
    if space > budget:
        raise BudgetError(
            f"search space {q}^{deg} = {space} exceeds budget {budget}")
    rs = admissible_r_values(q, s, m, r_values)
    if not rs:
        return []
    if spec.n == 1 and deg >= 1:
        raw = _search_prime_numpy(spec, s, deg, m, rs)
    else:
        raw = _search_generic(spec, s, deg, m, rs)
    hits = []
    for coeffs, r in sorted(raw):
        h = Poly(spec, coeffs)
        form = CycloForm(spec, r, s, h)
        verified = brute_verdict_star(form, m)
        hits.append({"r": r, "h": str(h), "m": m, "m1": form.m1,
                     "verified": verified})
    return hits


def _search_generic(spec, s, deg, m, rs):
    """Plain enumeration; fine for small spaces and extension fields."""
    q = spec.q
    q1 = q - 1
    ell = q1 // s
    units = [spec.exp_at(j * s) for j in range(ell)]
    out = []
    coeffs = [1] + [0] * deg
    total = q ** deg

    def bump():
        for i in range(1, deg + 1):
            coeffs[i] += 1
            if coeffs[i] < q:
                return True
            coeffs[i] = 0
        return False

    for _ in range(total):
        h = Poly(spec, tuple(coeffs))
        vals = [h.eval_index(u) for u in units]
        if all(vals):
            hlogs = [spec.log[v] for v in vals]
            for r, m1, m2 in rs:
                r1, s1 = r // m1, s // m1
                glogs = [(r1 * (j * s) + s1 * hlogs[j]) % q1
                         for j in range(ell)]
                cover = sum(1 for t in glogs if glogs.count(t) == m2)
                if cover == ell - ell % m2:
                    out.append((tuple(coeffs), r))
        if not bump():
            break
    return out


def _search_prime_numpy(spec, s, deg, m, rs, chunk_budget=1 << 18):
    """Vectorized prime-field enumeration.

    Values of every candidate h on U_ell are built by broadcast sums; the
    m2-to-1 check counts, per candidate, how many subgroup points sit in
    fibers of size exactly m2 (an ell x ell equality tensor per chunk).
    """
    p = spec.p
    q1 = p - 1
    ell = q1 // s
    units = np.array([spec.exp_at(j * s) for j in range(ell)], dtype=np.int64)
    # point powers: P[i, j] = units[j]^i for the x^i coefficient
    P = np.ones((deg + 1, ell), dtype=np.int64)
    for i in range(1, deg + 1):
        P[i] = P[i - 1] * units % p
    log = np.array([0] + [spec.log[v] for v in range(1, p)], dtype=np.int64)
    j_base = np.arange(ell, dtype=np.int64) * s

    # split coefficient positions into an inner block (materialized per chunk)
    # and outer positions iterated one tuple at a time
    inner = 0
    size = 1
    while inner < deg and size * p <= chunk_budget:
        size *= p
        inner += 1
    outer = deg - inner

    inner_grid = np.zeros((size, ell), dtype=np.int64)
    if inner:
        reps = 1
        for i in range(1, inner + 1):
            coeff_col = np.tile(np.repeat(np.arange(p), reps), size // (p * reps))
            inner_grid += coeff_col[:, None] * P[i][None, :]
            reps *= p
        inner_grid %= p
    digits = np.zeros(max(outer, 1), dtype=np.int64)

    out = []
    while True:
        base = P[0].copy()  # constant term 1
        for oi in range(outer):
            base = base + digits[oi] * P[inner + 1 + oi]
        V = (inner_grid + base[None, :]) % p
        ok = (V != 0).all(axis=1)
        if ok.any():
            rows = np.nonzero(ok)[0]
            hlog = log[V[rows]]
            for r, m1, m2 in rs:
                r1, s1 = r // m1, s // m1
                glog = (r1 * j_base[None, :] + s1 * hlog) % q1
                eqc = (glog[:, :, None] == glog[:, None, :]).sum(axis=2)
                cover = (eqc == m2).sum(axis=1)
                good = np.nonzero(cover == ell - ell % m2)[0]
                for gi in good:
                    row = rows[gi]
                    coeffs = [1]
                    rr = int(row)
                    for _ in range(inner):
                        rr, c = divmod(rr, p)
                        coeffs.append(c)
                    coeffs.extend(int(d) for d in digits[:outer])
                    out.append((tuple(coeffs), r))
        if outer == 0:
            break
        for oi in range(outer):
            digits[oi] += 1
            if digits[oi] < p:
                break
            digits[oi] = 0
        else:
            break
    return out
