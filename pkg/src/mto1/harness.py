"""Grid verification: theorem predictions against brute-force oracles.

A VerifyJob names a theorem family and a parameter grid; running it produces
a Report whose records each carry the instance parameters, the predicted and
observed verdicts, and an agreement flag.  Hypothesis-violating instances are
recorded as skipped, never as disagreements.  Reports are deterministic for a
fixed seed: records are sorted before assembly and every random draw is
seeded from a string derived from the instance parameters (string seeds are
stable across processes, unlike hash()).
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field as dc_field
from multiprocessing import Pool, cpu_count

from .criteria import (CommutativeSquare, GroupModel, HypothesisError,
                       construction1_verdict, construction2_verdict,
                       construction3_verdict, local_criterion_check)
from .cyclotomic import (CycloForm, brute_verdict_star, decompose,
                         hd_family_predict, hd_rootless_gcd, hd_rootless_scan,
                         lift_from_permutation, monomial_predict,
                         permutes_field, predict_from, random_rootless_poly,
                         small_ell_predict, small_m_predict, star_fibers,
                         transfer_equivalence)
from .galois import (FieldElement, Poly, build_field, is_prime,
                     quadratic_base, subfield_indices)
from .multiplicity import (FiniteMapping, check_m_to_1, count_by_enumeration,
                           count_formula, verdict_from_histogram)
from .unitline import (base_trace, frob_q, g3_family, g5_family,
                       g_permutation_lemma, halfplane_split, line_pair_deg1,
                       line_poly_deg1, line_poly_rk, quartic_rootless_lemma,
                       tower_gbar_predict, tower_line_predict,
                       tower_unit_predict, transfer_families, unit_pair_deg1,
                       unit_pair_g3, unit_subgroup_points)


@dataclass
class VerifyJob:
    family: str
    options: dict = dc_field(default_factory=dict)
    seed: int = 0
    jobs: int = 0  # 0 means cpu_count()


MAIN_GRID_Q = (5, 7, 8, 9, 11, 13, 16, 25, 27, 29, 49, 64)
Q2_GRID = (3, 4, 5, 7, 8)


def _fkey(p, n=1, modulus=None):
    return (p, n, tuple(modulus) if modulus else None)


def _field(fk):
    return build_field(fk[0], fk[1], fk[2])


def _field_key_for_q(q):
    """(p, n, None) with p^n = q; q must be a prime power."""
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                break
            n, qq = 0, q
            while qq % p == 0:
                qq //= p
                n += 1
            if p ** n == q:
                return _fkey(p, n)
            break
    raise ValueError(f"{q} is not a prime power")


def _q2_field_key(q):
    # full F_{q^2} scans are capped at q^2 <= 4096
    if q * q > 4096:
        from .galois import ScaleError
        raise ScaleError(f"full F_(q^2) scans need q^2 <= 4096, got q = {q}")
    p, n, _ = _field_key_for_q(q)
    return _fkey(p, 2 * n)


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _rng(*parts):
    return random.Random("|".join(str(p) for p in parts))


# ---------------------------------------------------------------------------
# instance evaluators (top-level so the process pool can pickle them)
# ---------------------------------------------------------------------------

EVALUATORS = {}


def evaluator(name):
    def wrap(fn):
        EVALUATORS[name] = fn
        return fn
    return wrap


def _record(params, predicted, observed, skipped=None, exceptional=None):
    agree = None if skipped else predicted == observed
    return {"params": params, "predicted": predicted, "observed": observed,
            "agree": agree, "skipped": skipped, "exceptional_set": exceptional}


def _grid_record(params, checked, bad, skips=0):
    params = dict(params)
    params["checked"] = checked
    if skips:
        params["hypothesis_skips"] = skips
    return _record(params, predicted="all-agree",
                   observed="all-agree" if not bad else bad)


@evaluator("count")
def _eval_count(params):
    q = params["q"]
    census = count_by_enumeration(q)
    return [_record({"q": q, "m": m}, predicted=count_formula(q, m),
                    observed=census[m])
            for m in range(1, q + 1)]


@evaluator("main_grid")
def _eval_main_grid(params):
    """One h over one (q, s): all r in [1, rmax], all m <= min(ell*m1, mcap)."""
    spec = _field(tuple(params["field"]))
    s = params["s"]
    h = Poly(spec, params["h"])
    mcap = params.get("mcap", 16)
    rmax = params.get("rmax", 2 * s)
    q1 = spec.q - 1
    checked = 0
    bad = []
    for r in range(1, rmax + 1):
        form = CycloForm(spec, r, s, h)
        dec = decompose(form, verify=(r == 1))
        fib = star_fibers(form)
        for m in range(1, min(dec.ell * dec.m1, mcap) + 1):
            predicted = predict_from(dec, m).verdict
            observed = verdict_from_histogram(fib, q1, m)
            checked += 1
            if predicted != observed:
                bad.append({"r": r, "m": m, "predicted": predicted,
                            "observed": observed})
    return [_grid_record({"field": list(params["field"][:2]), "s": s,
                          "h": str(h), "rmax": rmax}, checked, bad)]


@evaluator("main_fixture")
def _eval_main_fixture(params):
    spec = _field(tuple(params["field"]))
    h = Poly.from_string(spec, params["h"])
    form = CycloForm(spec, params["r"], params["s"], h)
    m = params["m"]
    prediction = predict_from(decompose(form), m)
    rep = check_m_to_1(form.star_mapping(), m)
    exc = [str(e) for e in rep.exceptional_set]
    rec = _record({"field": list(params["field"][:2]), "r": params["r"],
                   "s": params["s"], "h": params["h"], "m": m},
                  predicted=prediction.verdict, observed=rep.verdict,
                  exceptional=exc)
    rec["failed_conjunct"] = prediction.failed
    return [rec]


@evaluator("small_m")
def _eval_small_m(params):
    """Case-list prediction vs main prediction vs oracle for m in {2, 3}."""
    spec = _field(tuple(params["field"]))
    s = params["s"]
    h = Poly(spec, params["h"])
    m = params["m"]
    q1 = spec.q - 1
    bad = []
    checked = 0
    for r in range(1, params.get("rmax", 2 * s) + 1):
        form = CycloForm(spec, r, s, h)
        case_verdict, _ = small_m_predict(form, m)
        dec = decompose(form, verify=False)
        main_verdict = (predict_from(dec, m).verdict
                        if m <= dec.ell * dec.m1 else False)
        observed = verdict_from_histogram(star_fibers(form), q1, m)
        checked += 1
        if not case_verdict == main_verdict == observed:
            bad.append({"r": r, "case": case_verdict, "main": main_verdict,
                        "oracle": observed})
    return [_grid_record({"field": list(params["field"][:2]), "s": s,
                          "h": str(h), "m": m}, checked, bad)]


@evaluator("small_m_corollary")
def _eval_small_m_corollary(params):
    """f = x^r (x^(2s) + x^s + a), s = (q-1)/3: the closed-form 2-to-1
    condition ((a-1)^5 (a+2))^((q-1)/6) outside {w, w^2} vs brute force."""
    spec = _field(tuple(params["field"]))
    q = spec.q
    s = (q - 1) // 3
    w = spec.exp_at((q - 1) // 3)
    wsq = spec.mul(w, w)
    bad = []
    checked = 0
    for a_idx in range(q):
        a = FieldElement(spec, a_idx)
        if a == spec.one or a == -spec.element(2):
            continue
        h = Poly.from_elements(spec, (a, spec.one, spec.one))
        val = spec.pow(
            spec.mul(spec.pow(spec.sub(a_idx, 1), 5), spec.add(a_idx, 2)),
            (q - 1) // 6)
        for r in range(1, 2 * s + 1):
            form = CycloForm(spec, r, s, h)
            cond = (math.gcd(r, s) == 2 and r % 6 in (2, 4)
                    and val not in (w, wsq))
            observed = verdict_from_histogram(star_fibers(form), q - 1, 2)
            checked += 1
            if cond != observed:
                bad.append({"a": str(a), "r": r, "cond": cond,
                            "oracle": observed})
    return [_grid_record({"field": list(params["field"][:2])}, checked, bad)]


@evaluator("small_ell")
def _eval_small_ell(params):
    """ell in {2, 3}: case-list vs main vs oracle over all r and all m."""
    spec = _field(tuple(params["field"]))
    s = params["s"]
    h = Poly(spec, params["h"])
    q1 = spec.q - 1
    ell = q1 // s
    bad = []
    checked = 0
    for r in range(1, params.get("rmax", 2 * s) + 1):
        form = CycloForm(spec, r, s, h)
        dec = decompose(form, verify=False)
        fib = star_fibers(form)
        for m in range(1, ell * dec.m1 + 1):
            case_verdict, _ = small_ell_predict(form, m)
            main_verdict = predict_from(dec, m).verdict
            observed = verdict_from_histogram(fib, q1, m)
            checked += 1
            if not case_verdict == main_verdict == observed:
                bad.append({"r": r, "m": m, "case": case_verdict,
                            "main": main_verdict, "oracle": observed})
    return [_grid_record({"field": list(params["field"][:2]), "s": s,
                          "h": str(h)}, checked, bad)]


@evaluator("ell2_corollary")
def _eval_ell2_corollary(params):
    """f = x^r (x^((q-1)/2) + a): (a^2-1)^((q-1)/2) = (-1)^r and the m1 = 2
    companion condition, both against brute force."""
    spec = _field(tuple(params["field"]))
    q = spec.q
    s = (q - 1) // 2
    minus_one = spec.neg(1)
    bad = []
    checked = 0
    for a_idx in range(q):
        if a_idx == 1 or a_idx == minus_one:
            continue
        a = FieldElement(spec, a_idx)
        h = Poly.from_elements(spec, (a, spec.one))
        val = spec.pow(spec.sub(spec.mul(a_idx, a_idx), 1), s)
        for r in range(1, 2 * s + 1):
            form = CycloForm(spec, r, s, h)
            m1 = math.gcd(r, s)
            sign = minus_one if r % 2 else 1
            cond = m1 == 1 and val == sign
            if m1 == 2:
                frac = spec.mul(spec.add(a_idx, 1),
                                spec.inv(spec.sub(a_idx, 1)))
                v2 = spec.pow(frac, (q - 1) // 4)
                sign2 = minus_one if (r // 2) % 2 else 1
                cond = v2 != sign2
            observed = verdict_from_histogram(star_fibers(form), q - 1, 2)
            checked += 1
            if cond != observed:
                bad.append({"a": str(a), "r": r, "cond": cond,
                            "oracle": observed})
    return [_grid_record({"field": list(params["field"][:2])}, checked, bad)]


@evaluator("monomial_grid")
def _eval_monomial_grid(params):
    """F_{q^2} family x^r (x^(d(q-1)) - a)^(k m1) with a^(q+1) = 1, a^t != 1:
    the monomial predicate, the main reduction, the closed-form gcd condition
    and the oracle must all agree."""
    spec = _field(tuple(params["field"]))
    q = params["q"]
    d, k, r = params["d"], params["k"], params["r"]
    mcap = params.get("mcap", 24)
    t = (q + 1) // math.gcd(d, q + 1)
    m1 = math.gcd(r, q - 1)
    q2_1 = spec.q - 1
    bad = []
    checked = 0
    tried = 0
    for a_i in unit_subgroup_points(spec):
        if spec.pow(a_i, t) == 1:
            continue
        tried += 1
        a = FieldElement(spec, a_i)
        h = Poly.from_elements(spec, (-a, spec.one)).of_power(d) ** (k * m1)
        form = CycloForm(spec, r, q - 1, h)
        dec = decompose(form, verify=False)
        fib = star_fibers(form)
        beta = (-a) ** (-k)
        for m in range(1, min(m1 * (q + 1), mcap) + 1):
            mono = monomial_predict(form, beta, -k * d, m)["verdict"]
            main_v = predict_from(dec, m).verdict
            observed = verdict_from_histogram(fib, q2_1, m)
            closed = (m % m1 == 0
                      and math.gcd(r // m1 - k * d, q + 1) == m // m1)
            checked += 1
            if not mono == main_v == observed == closed:
                bad.append({"a": str(a), "m": m, "mono": mono,
                            "main": main_v, "oracle": observed,
                            "closed_form": closed})
    if tried == 0:
        return [_record({"q": q, "d": d, "k": k, "r": r}, None, None,
                        skipped="hypothesis: no a with a^(q+1)=1 and a^t != 1")]
    return [_grid_record({"q": q, "d": d, "k": k, "r": r}, checked, bad)]


@evaluator("hd_root_lemma")
def _eval_hd_root_lemma(params):
    """gcd criterion vs exhaustive scan for roots of h_d(x^e) in U_ell."""
    spec = _field(tuple(params["field"]))
    base_q = params["base_q"]
    dmax, emax = params.get("dmax", 12), params.get("emax", 12)
    q1 = spec.q - 1
    bad = []
    checked = 0
    for ell in _divisors(q1):
        for d in range(1, dmax + 1):
            for e in range(1, emax + 1):
                g = hd_rootless_gcd(d, e, ell, base_q)
                sc = hd_rootless_scan(spec, d, e, ell)
                checked += 1
                if g != sc:
                    bad.append({"ell": ell, "d": d, "e": e, "gcd": g,
                                "scan": sc})
    return [_grid_record({"field": list(params["field"][:2]),
                          "base_q": base_q}, checked, bad)]


@evaluator("hd_family")
def _eval_hd_family(params):
    """The h_d towers over F_(q0^n0): gcd-formula verdicts vs brute force."""
    spec = _field(tuple(params["field"]))
    base_degree = params["base_degree"]
    q1 = spec.q - 1
    bad = []
    checked = 0
    skipped = 0
    for s in _divisors(q1):
        ell = q1 // s
        for d in range(1, params.get("dmax", 6) + 1):
            for e in (1, 2, 3):
                for t in (1, 2):
                    for r in range(1, params.get("rmax", 6) + 1):
                        m1 = math.gcd(r, s)
                        for m in range(1, min(ell * m1,
                                              params.get("mcap", 12)) + 1):
                            try:
                                rec = hd_family_predict(
                                    spec, base_degree, r, s, d, e, t, m)
                            except HypothesisError:
                                skipped += 1
                                continue
                            observed = brute_verdict_star(rec["form"], m)
                            checked += 1
                            if (rec["predicted"] != observed
                                    or rec["hd_rootless_gcd"]
                                    != rec["hd_rootless_scan"]):
                                bad.append({"s": s, "d": d, "e": e, "t": t,
                                            "r": r, "m": m,
                                            "case": rec["case"],
                                            "predicted": rec["predicted"],
                                            "oracle": observed})
    return [_grid_record({"field": list(params["field"][:2]),
                          "base_degree": base_degree}, checked, bad, skipped)]


def _conforming_twist(spec, s, m1, rng):
    """(M, t) with eps = 1 and x^(t/m1) M(x)^(s/m1) = 1 on U_ell: take
    M = x^a W(x)^(ell*m1) for rootless W, so M^(s/m1) = x^(a*s/m1) there,
    and pick t/m1 = -a*(s/m1) mod ell."""
    q1 = spec.q - 1
    ell = q1 // s
    s1 = s // m1
    W = random_rootless_poly(spec, s, rng.randrange(0, 3), rng)
    a = rng.randrange(0, 3)
    t1 = ell * rng.randrange(1, 4) - (a * s1) % ell
    if t1 < 1:
        t1 += ell
    M = W ** (ell * m1)
    if a:
        M = M * Poly.monomial(spec, a)
    return M, m1 * t1


@evaluator("lift")
def _eval_lift(params):
    """Permutation lifts and the transfer equivalence at one small field."""
    spec = _field(tuple(params["field"]))
    rng = _rng(params["seed"])
    q1 = spec.q - 1
    bad = []
    checked = 0
    skipped = 0
    for _ in range(params.get("draws", 30)):
        s = rng.choice(_divisors(q1))
        ell = q1 // s
        form = None
        for _ in range(200):
            r = rng.randrange(1, 2 * s + 1)
            if math.gcd(r, s) != 1:
                continue
            h = random_rootless_poly(spec, s, rng.randrange(0, 4), rng)
            cand = CycloForm(spec, r, s, h)
            if permutes_field(cand):
                form = cand
                break
        if form is None:
            skipped += 1
            continue
        eps = spec.one
        M, t = _conforming_twist(spec, s, 1, rng)  # (r, s) = 1 for permutations
        try:
            lifted = lift_from_permutation(form, M, eps, t,
                                           rng.randrange(1, 4))
        except HypothesisError as err:
            bad.append({"stage": "lift", "error": str(err)})
            continue
        checked += 1
        if not lifted["verified"]:
            bad.append({"stage": "lift", "r": form.r, "s": s,
                        "m": lifted["m"]})
        # transfer equivalence on an arbitrary base form, any m1 = (r2, s)
        r2 = rng.randrange(1, 2 * s + 1)
        h2 = random_rootless_poly(spec, s, rng.randrange(0, 4), rng)
        base = CycloForm(spec, r2, s, h2)
        M2, t2 = _conforming_twist(spec, s, base.m1, rng)
        k = rng.randrange(1, 4)
        if math.gcd(base.r + k * t2, s) != base.m1:
            skipped += 1
            continue
        for m in range(1, min(ell * base.m1, 10) + 1):
            rec = transfer_equivalence(base, M2, eps, t2, k, m)
            checked += 1
            if not rec["agree"]:
                bad.append({"stage": "transfer", "r": base.r, "s": s, "m": m})
    return [_grid_record({"field": list(params["field"][:2])},
                         checked, bad, skipped)]


@evaluator("g3")
def _eval_g3(params):
    spec = _field(tuple(params["field"]))
    trinomials = params.get("trinomials", True)
    _, half = quadratic_base(spec)
    bad = []
    checked = 0
    for ci in subfield_indices(spec, half):
        if ci == 0:
            continue
        rec = g3_family(spec, FieldElement(spec, ci), trinomials=trinomials)
        checked += 1
        ok = rec["g_verdict"] and rec.get("g1_verdict", True)
        if trinomials:
            ok = ok and all(
                rec[f"{nm}_{w}_predicted"] == rec[f"{nm}_{w}_observed"]
                for nm in ("f_a", "f_b") for w in ("1to1", "3to1"))
        if not ok:
            bad.append({"c": str(FieldElement(spec, ci))})
    return [_grid_record({"field": list(params["field"][:2]),
                          "trinomials": trinomials}, checked, bad)]


@evaluator("g5")
def _eval_g5(params):
    spec = _field(tuple(params["field"]))
    rec = g5_family(spec)
    ok = all(rec[k] for k in rec if k.endswith("_verdict"))
    for w in ("1to1", "3to1"):
        if f"f3_{w}_predicted" in rec:
            ok = ok and rec[f"f3_{w}_predicted"] == rec[f"f3_{w}_observed"]
    return [_record({"field": list(params["field"][:2]), "n": rec["n"],
                     "g_m": rec["g_predicted_m"]},
                    predicted="all-agree",
                    observed="all-agree" if ok else "family mismatch")]


@evaluator("split")
def _eval_split(params):
    spec = _field(tuple(params["field"]))
    rec = halfplane_split(spec)
    n = spec.n // 2
    ok = (len(rec["A0"]) == 2 ** (n - 1) - 1
          and len(rec["A1"]) == 2 ** (n - 1) and rec["two_to_one"])
    return [_record({"field": list(params["field"][:2]), "n": n},
                    predicted="sizes+pairings",
                    observed="sizes+pairings" if ok else "mismatch")]


@evaluator("lemmas")
def _eval_lemmas(params):
    spec = _field(tuple(params["field"]))
    rootless = quartic_rootless_lemma(spec)
    pred, obs = g_permutation_lemma(spec)
    return [_record({"field": list(params["field"][:2]), "n": spec.n // 2},
                    predicted={"rootless": True, "G_permutes": pred},
                    observed={"rootless": rootless, "G_permutes": obs})]


@evaluator("transfer_q2")
def _eval_transfer_q2(params):
    spec = _field(tuple(params["field"]))
    base = params["base"]
    _, half = quadratic_base(spec)
    bad = []
    checked = 0
    skipped = 0
    cs = ([FieldElement(spec, i) for i in subfield_indices(spec, half) if i]
          if base == "f3" else [None])
    for c in cs:
        for d in params.get("ds", (1, 3, 5, 7)):
            for k in params.get("ks", (1, 2, 3)):
                try:
                    rec = transfer_families(spec, base, c=c, d=d, k=k)
                except HypothesisError:
                    skipped += 1
                    continue
                checked += 1
                if base == "f3":
                    if not (rec["predicted"] == rec["observed"]
                            == rec["base_observed"]):
                        bad.append({"c": str(c), "d": d, "k": k})
                elif not rec["agree"]:
                    bad.append({"d": d, "k": k})
    return [_grid_record({"field": list(params["field"][:2]), "base": base},
                         checked, bad, skipped)]


# -- tower draws ----------------------------------------------------------------

def _rand_elt(spec, rng, nonzero=False):
    return FieldElement(spec, rng.randrange(1 if nonzero else 0, spec.q))


def _norm_neq(spec, x, y):
    """x^(q+1) != y^(q+1) (relative norms differ)."""
    return x * frob_q(spec, x) != y * frob_q(spec, y)


def _ratio_neq(spec, x, y, q):
    """x^(q-1) != y^(q-1), for nonzero x, y."""
    return spec.pow(x.index, q - 1) != spec.pow(y.index, q - 1)


def _pick_r(rng, q, m1, target, tries=64):
    """r with gcd(r, q-1) = m1 and r/m1 = target (mod q+1), or None."""
    co = (q - 1) // m1
    for j in range(tries):
        rho = target % (q + 1) + j * (q + 1)
        if rho >= 1 and math.gcd(rho, co) == 1 \
                and math.gcd(m1 * rho, q - 1) == m1:
            return m1 * rho
    return None


@evaluator("tower_batch")
def _eval_tower_batch(params):
    """Randomized draws of one tower family over one F_{q^2}.

    Each draw checks two things: that the hypothesis scans pass exactly when
    the lemma's closed-form conditions hold, and that for passing draws the
    predicted verdict matches the full F_{q^2}^* scan.
    """
    spec = _field(tuple(params["field"]))
    fam = params["family"]
    rng = _rng(params["seed"])
    q, half = quadratic_base(spec)
    bad = []
    cond_mismatch = []
    checked = 0
    hyp_skips = 0
    for _ in range(params["draws"]):
        n = rng.randrange(1, q + 3)
        m1 = rng.choice(_divisors(q - 1))
        if fam in ("r1l1", "r3"):
            gamma, delta = _rand_elt(spec, rng), _rand_elt(spec, rng)
            if gamma.is_zero and delta.is_zero:
                continue
            inner = unit_pair_deg1(spec, gamma, delta)
            inner_cond = _norm_neq(spec, gamma, delta)
            if fam == "r1l1":
                alpha, beta = _rand_elt(spec, rng), _rand_elt(spec, rng)
                outer = unit_pair_deg1(spec, alpha, beta)
                outer_cond = _norm_neq(spec, alpha, beta)
                target = n
            else:
                ci = rng.choice(subfield_indices(spec, half)[1:])
                c = FieldElement(spec, ci)
                outer = unit_pair_g3(spec, c)
                outer_cond = base_trace(spec, spec.one + spec.one / c).is_zero
                target = 3 * n
            r = _pick_r(rng, q, m1, target)
            if r is None:
                hyp_skips += 1
                continue
            m = (m1 * math.gcd(n, q + 1) if rng.random() < 0.5
                 else rng.randrange(1, m1 * (q + 1) + 1))
            rec = tower_unit_predict(spec, inner, outer, n, r, m)
            cond = inner_cond and outer_cond
        elif fam in ("fq_r1l1", "rk"):
            gamma = _rand_elt(spec, rng, nonzero=True)
            delta = _rand_elt(spec, rng, nonzero=True)
            pair = line_pair_deg1(spec, gamma, delta)
            pair_cond = _ratio_neq(spec, gamma, delta, q)
            alpha = _rand_elt(spec, rng, nonzero=True)
            beta = _rand_elt(spec, rng, nonzero=True)
            n_cond = _ratio_neq(spec, alpha, beta, q)
            if fam == "fq_r1l1":
                N = line_poly_deg1(spec, alpha, beta)
                target = n
                cond = pair_cond and n_cond
            else:
                k = rng.randrange(1, q + 2)
                if math.gcd(k, q + 1) != 1:
                    hyp_skips += 1
                    continue
                g2, d2 = _rand_elt(spec, rng), _rand_elt(spec, rng)
                N = line_poly_rk(spec, alpha, beta, g2, d2, k)
                if N.is_zero or N.degree != k:
                    hyp_skips += 1
                    continue
                target = n * k
                cond = pair_cond and n_cond and _norm_neq(spec, g2, d2)
            r = _pick_r(rng, q, m1, target)
            if r is None:
                hyp_skips += 1
                continue
            m = (m1 if rng.random() < 0.5
                 else rng.randrange(1, m1 * (q + 1) + 1))
            rec = tower_line_predict(spec, pair, N, n, r, m)
            if fam == "rk" and cond and rec["failed"] == "H has roots in U":
                # H rootlessness is itself a hypothesis of the Rk corollary
                hyp_skips += 1
                continue
        else:  # gbar
            gamma = _rand_elt(spec, rng, nonzero=True)
            delta = _rand_elt(spec, rng, nonzero=True)
            pair = line_pair_deg1(spec, gamma, delta)
            pair_cond = _ratio_neq(spec, gamma, delta, q)
            a2 = _rand_elt(spec, rng, nonzero=True)
            b2 = _rand_elt(spec, rng, nonzero=True)
            N = line_poly_deg1(spec, a2, b2)
            n_cond = _ratio_neq(spec, a2, b2, q)
            alpha = _rand_elt(spec, rng)
            alpha_cond = frob_q(spec, alpha) != alpha
            r = _pick_r(rng, q, m1, 3)
            if r is None:
                hyp_skips += 1
                continue
            rec = tower_gbar_predict(spec, pair, N, alpha, r)
            cond = pair_cond and n_cond and alpha_cond
            if cond and rec["failed"] == "H has roots in U":
                hyp_skips += 1
                continue
        checked += 1
        if rec["hypotheses_ok"] != cond:
            cond_mismatch.append({"family": fam, "failed": rec["failed"],
                                  "cond": cond, "params": rec["params"]})
        elif rec["hypotheses_ok"] and not rec["agree"]:
            bad.append({"family": fam, "params": rec["params"],
                        "predicted": rec["predicted"],
                        "observed": rec["observed"]})
    issues = ([] if not bad and not cond_mismatch else
              {"disagreements": bad, "condition_mismatches": cond_mismatch})
    return [_grid_record({"field": list(params["field"][:2]), "family": fam,
                          "draws": params["draws"]},
                         checked, issues, hyp_skips)]


# -- randomized abstract-criteria models ------------------------------------------

def random_mapping(rng, domain, codomain):
    return {a: rng.choice(codomain) for a in domain}


def random_local_instance(rng, max_size=12):
    na = rng.randrange(1, max_size + 1)
    A = [f"a{i}" for i in range(na)]
    B = [f"b{i}" for i in range(rng.randrange(1, max_size + 1))]
    C = [f"c{i}" for i in range(rng.randrange(1, max_size + 1))]
    f = FiniteMapping.from_table(random_mapping(rng, A, B))
    psi = random_mapping(rng, B, C)
    return f, psi, rng.randrange(1, na + 1)


def random_construction1_square(rng, max_size=12):
    ns = rng.randrange(1, 5)
    nsbar = ns + rng.randrange(0, 3)
    S = [f"s{i}" for i in range(ns)]
    Sbar = [f"t{i}" for i in range(nsbar)]
    fbar = dict(zip(S, rng.sample(Sbar, ns)))
    na = rng.randrange(1, max_size + 1)
    A = [f"a{i}" for i in range(na)]
    lam = random_mapping(rng, A, S)
    nabar = rng.randrange(nsbar, max_size + nsbar)
    Abar = [f"b{i}" for i in range(nabar)]
    lambar = {b: (Sbar[i] if i < nsbar else rng.choice(Sbar))
              for i, b in enumerate(Abar)}
    fibers = {}
    for b, sb in lambar.items():
        fibers.setdefault(sb, []).append(b)
    f = {a: rng.choice(fibers[fbar[lam[a]]]) for a in A}
    sq = CommutativeSquare(A, Abar, S, Sbar, f, fbar, lam, lambar)
    return sq, rng.randrange(1, na + 1)


def random_construction2_square(rng):
    m1 = rng.choice((1, 1, 2, 3))
    ns = rng.randrange(1, 4)
    nsbar = rng.randrange(1, 4)
    S = [f"s{i}" for i in range(ns)]
    Sbar = [f"t{i}" for i in range(nsbar)]
    fbar = random_mapping(rng, S, Sbar)
    sizes = {sb: rng.randrange(1, 3) for sb in Sbar}
    Abar, lambar = [], {}
    for sb in Sbar:
        for i in range(sizes[sb]):
            b = f"b{sb}_{i}"
            Abar.append(b)
            lambar[b] = sb
    A, lam, f = [], {}, {}
    for s in S:
        targets = [b for b in Abar if lambar[b] == fbar[s]]
        for b in targets:
            for j in range(m1):
                a = f"a{s}_{b}_{j}"
                A.append(a)
                lam[a] = s
                f[a] = b
    if not A:
        return None
    sq = CommutativeSquare(A, Abar, S, Sbar, f, fbar, lam, lambar)
    return sq, m1, rng.randrange(1, m1 * ns + 1)


def random_construction3_model(rng, variant, max_n=12):
    nn = rng.randrange(2, max_n + 1)
    group = GroupModel.cyclic(nn)
    A = list(group.elements)
    dd = rng.choice(_divisors(nn))
    lambar = {a: (a * dd) % nn for a in A}
    Sbar = sorted(set(lambar.values()))
    fibers = {}
    for a in A:
        fibers.setdefault(lambar[a], []).append(a)
    if variant == 1:
        ns = rng.randrange(1, min(6, nn + 1))
        if ns > len(Sbar):
            return None
        S = rng.sample(A, ns)
        fbar = dict(zip(S, rng.sample(Sbar, ns)))
        lam = random_mapping(rng, A, S)
        f = {a: rng.choice(fibers[fbar[lam[a]]]) for a in A}
        c = rng.choice(Sbar)
        vmap = {s: rng.choice(fibers[c]) for s in S}
        u = {a: vmap[lam[a]] for a in A}
        sq = CommutativeSquare(A, A, S, Sbar, f, fbar, lam, lambar)
        return group, sq, u, rng.randrange(1, nn + 1), None
    kernel = nn // len(Sbar)
    m1 = rng.choice((1, 2))
    if nn % (m1 * kernel):
        return None
    ns = nn // (m1 * kernel)
    if ns > nn:
        return None
    S = rng.sample(A, ns)
    fbar = random_mapping(rng, S, Sbar)
    shuffled = A[:]
    rng.shuffle(shuffled)
    lam, blocks = {}, {}
    for i, s in enumerate(S):
        block = shuffled[i * m1 * kernel:(i + 1) * m1 * kernel]
        blocks[s] = block
        for a in block:
            lam[a] = s
    f = {}
    for s in S:
        targets = fibers[fbar[s]][:]
        rng.shuffle(targets)
        for i, a in enumerate(blocks[s]):
            f[a] = targets[i // m1]
    c = rng.choice(Sbar)
    u = {a: rng.choice(fibers[c]) for a in A}
    fu = {a: group.op(f[a], u[a]) for a in A}
    for s in S:
        block = blocks[s]
        if not check_m_to_1(FiniteMapping(block, [fu[a] for a in block]),
                            m1).verdict:
            return None  # this u breaks the per-fiber hypothesis; resample
    sq = CommutativeSquare(A, A, S, Sbar, f, fbar, lam, lambar)
    return group, sq, u, rng.randrange(1, m1 * ns + 1), m1


@evaluator("criteria_batch")
def _eval_criteria_batch(params):
    kind = params["kind"]
    rng = _rng(params["seed"])
    count = params["count"]
    bad = []
    done = 0
    attempts = 0
    while done < count and attempts < 80 * count:
        attempts += 1
        try:
            if kind == "local":
                f, psi, m = random_local_instance(rng)
                rep = local_criterion_check(f, psi, m)
            elif kind == "c1":
                sq, m = random_construction1_square(rng)
                rep = construction1_verdict(sq, m)
            elif kind == "c2":
                inst = random_construction2_square(rng)
                if inst is None:
                    continue
                rep = construction2_verdict(inst[0], inst[1], inst[2])
            elif kind == "c3v1":
                inst = random_construction3_model(rng, 1)
                if inst is None:
                    continue
                group, sq, u, m, _ = inst
                rep = construction3_verdict(group, sq, u, 1, m)
            elif kind == "c3v2":
                inst = random_construction3_model(rng, 2)
                if inst is None:
                    continue
                group, sq, u, m, m1 = inst
                rep = construction3_verdict(group, sq, u, 2, m, m1)
            else:
                raise ValueError(f"unknown criteria kind {kind!r}")
        except HypothesisError:
            continue
        done += 1
        if not rep.agree:
            bad.append({"kind": kind, "instance": done, "lhs": rep.lhs,
                        "rhs": rep.rhs})
    return [_grid_record({"kind": kind, "seed": params["seed"]}, done, bad)]


# ---------------------------------------------------------------------------
# the paper-derived commutative square (shared fixture)
# ---------------------------------------------------------------------------

def paper_square_f29():
    """The F_29 instance as an explicit construction-2 square:
    A = Abar = F_29^*, S = U_7, Sbar = U_14, lam = x^4, lambar = x^2,
    f = x^2 h(x^4), fbar = g = x h(x)^2 with h = x^5 + x^4 + 15x^3 + 1."""
    spec = build_field(29)
    h = Poly.from_string(spec, "1,0,0,15,1,1")
    form = CycloForm(spec, 2, 4, h)
    dec = decompose(form)
    star = [spec.exp_at(i) for i in range(28)]
    u7 = [spec.exp_at(4 * j) for j in range(7)]
    u14 = [spec.exp_at(2 * j) for j in range(14)]
    f = {x: form.f_image_index(x) for x in star}
    lam = {x: spec.pow(x, 4) for x in star}
    lambar = {x: spec.pow(x, 2) for x in star}
    g = {spec.exp_at(4 * j): spec.exp_at(dec.g_logs[j]) for j in range(7)}
    return CommutativeSquare(star, star, u7, u14, f, g, lam, lambar)


# ---------------------------------------------------------------------------
# family -> instance list, and the runner
# ---------------------------------------------------------------------------

def build_instances(job):
    """Expand a VerifyJob into (evaluator, params) work items."""
    fam = job.family
    o = job.options
    seed = job.seed
    out = []
    if fam == "count":
        for q in o.get("qs", (2, 3, 4, 5)):
            out.append(("count", {"q": q}))
    elif fam == "main":
        hcount = o.get("hcount", 25)
        degmax = o.get("degmax", 5)
        for q in o.get("qs", MAIN_GRID_Q):
            fk = _field_key_for_q(q)
            spec = _field(fk)
            for s in _divisors(q - 1):
                rng = _rng(seed, "main", q, s)
                seen = set()
                while len(seen) < hcount:
                    h = random_rootless_poly(spec, s, degmax, rng)
                    if h.coeffs in seen:
                        continue
                    seen.add(h.coeffs)
                    out.append(("main_grid",
                                {"field": fk, "s": s, "h": list(h.coeffs),
                                 "mcap": o.get("mcap", 16)}))
        if o.get("fixtures", True):
            out.append(("main_fixture",
                        {"field": _fkey(29), "r": 2, "s": 4,
                         "h": "1,0,0,15,1,1", "m": 12}))
            out.append(("main_fixture",
                        {"field": _fkey(2, 6, (1, 1, 0, 1, 1, 0, 1)),
                         "r": 2, "s": 21, "h": "g^9,1", "m": 3}))
    elif fam == "small":
        hcount = o.get("hcount", 12)
        for q in o.get("qs", MAIN_GRID_Q):
            fk = _field_key_for_q(q)
            spec = _field(fk)
            for m in (2, 3):
                for s in _divisors(q - 1):
                    if s < 2 or (q - 1) // s < m:
                        continue
                    rng = _rng(seed, "small", q, s, m)
                    for _ in range(hcount):
                        h = random_rootless_poly(spec, s,
                                                 o.get("degmax", 4), rng)
                        out.append(("small_m",
                                    {"field": fk, "s": s,
                                     "h": list(h.coeffs), "m": m}))
        for q in o.get("corollary_qs", (13, 19, 31)):
            out.append(("small_m_corollary", {"field": _field_key_for_q(q)}))
    elif fam == "ell":
        hcount = o.get("hcount", 12)
        for q in o.get("qs", MAIN_GRID_Q):
            fk = _field_key_for_q(q)
            spec = _field(fk)
            for ell in (2, 3):
                if (q - 1) % ell or (q - 1) // ell < 1:
                    continue
                s = (q - 1) // ell
                rng = _rng(seed, "ell", q, ell)
                for _ in range(hcount):
                    h = random_rootless_poly(spec, s, o.get("degmax", 4), rng)
                    out.append(("small_ell",
                                {"field": fk, "s": s, "h": list(h.coeffs)}))
        for q in o.get("corollary_qs", (13, 17, 25)):
            out.append(("ell2_corollary", {"field": _field_key_for_q(q)}))
    elif fam == "monomial":
        for q in o.get("qs", Q2_GRID):
            fk = _q2_field_key(q)
            for d in range(1, o.get("dmax", q + 1) + 1):
                for k in range(1, o.get("kmax", 4) + 1):
                    for r in range(1, o.get("rmax", 12) + 1):
                        out.append(("monomial_grid",
                                    {"field": fk, "q": q, "d": d,
                                     "k": k, "r": r}))
    elif fam == "hd":
        for q in o.get("scan_qs", (4, 8, 9, 16, 25, 27, 32, 49, 64)):
            p, n, _ = _field_key_for_q(q)
            out.append(("hd_root_lemma",
                        {"field": _fkey(p, n), "base_q": p,
                         "dmax": o.get("dmax", 12),
                         "emax": o.get("emax", 12)}))
        for base_q, n0 in o.get("towers", ((3, 2), (2, 4), (5, 2), (7, 2),
                                           (2, 6), (3, 4))):
            p, bd, _ = _field_key_for_q(base_q)
            out.append(("hd_family",
                        {"field": _fkey(p, bd * n0), "base_degree": bd}))
    elif fam == "lift":
        for q in o.get("qs", (9, 13, 16, 25)):
            out.append(("lift", {"field": _field_key_for_q(q),
                                 "seed": f"{seed}|lift|{q}",
                                 "draws": o.get("draws", 30)}))
    elif fam == "g3":
        for n in o.get("ns", range(1, 9)):
            out.append(("g3", {"field": _fkey(2, 2 * n),
                               "trinomials": n <= o.get("trinomial_nmax", 5)}))
    elif fam == "g5":
        for n in o.get("ns", range(1, 9)):
            out.append(("g5", {"field": _fkey(2, 2 * n)}))
    elif fam == "split":
        for n in o.get("ns", range(1, 9)):
            out.append(("split", {"field": _fkey(2, 2 * n)}))
    elif fam == "lemmas":
        for n in o.get("ns", range(1, 9)):
            out.append(("lemmas", {"field": _fkey(2, 2 * n)}))
    elif fam == "transfer":
        out.append(("transfer_q2", {"field": _fkey(2, 6), "base": "f3"}))
        out.append(("transfer_q2", {"field": _fkey(2, 4), "base": "f5"}))
    elif fam == "towers":
        fams = o.get("families", ("r1l1", "r3", "rk", "fq_r1l1", "gbar"))
        per = o.get("draws", 500)
        chunk = o.get("chunk", 50)
        for q in o.get("qs", Q2_GRID):
            fk = _q2_field_key(q)
            for tf in fams:
                if tf in ("r3", "gbar") and q % 2:
                    continue  # even-characteristic families
                for i in range((per + chunk - 1) // chunk):
                    out.append(("tower_batch",
                                {"field": fk, "family": tf,
                                 "draws": min(chunk, per - i * chunk),
                                 "seed": f"{seed}|tower|{q}|{tf}|{i}"}))
    elif fam == "criteria":
        per = o.get("count", 2000)
        chunk = o.get("chunk", 250)
        for kind in o.get("kinds", ("local", "c1", "c2", "c3v1", "c3v2")):
            for i in range((per + chunk - 1) // chunk):
                out.append(("criteria_batch",
                            {"kind": kind,
                             "count": min(chunk, per - i * chunk),
                             "seed": f"{seed}|criteria|{kind}|{i}"}))
    else:
        raise ValueError(f"unknown family {job.family!r}")
    return out


def _run_item(item):
    name, params = item
    t0 = time.perf_counter()
    try:
        records = EVALUATORS[name](params)
    except HypothesisError as err:
        records = [_record(dict(params), None, None,
                           skipped=f"hypothesis: {err}")]
    elapsed = time.perf_counter() - t0
    for rec in records:
        rec["evaluator"] = name
        rec["elapsed"] = round(elapsed / max(len(records), 1), 6)
    return records


def run_job(job):
    """Execute a VerifyJob and assemble the deterministic report dict."""
    items = build_instances(job)
    jobs = job.jobs if job.jobs else cpu_count()
    t0 = time.perf_counter()
    if jobs > 1 and len(items) > 1:
        with Pool(processes=jobs) as pool:
            chunks = pool.map(_run_item, items, chunksize=1)
    else:
        chunks = [_run_item(it) for it in items]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r["evaluator"],
                                json.dumps(r["params"], sort_keys=True,
                                           default=str)))
    agreements = sum(1 for r in records if r["agree"] is True)
    disagreements = sum(1 for r in records if r["agree"] is False)
    skipped = sum(1 for r in records if r["skipped"])
    return {
        "family": job.family,
        "options": {k: (list(v) if isinstance(v, (tuple, range)) else v)
                    for k, v in sorted(job.options.items())},
        "seed": job.seed,
        "summary": {"total": len(records), "agreements": agreements,
                    "disagreements": disagreements, "skipped": skipped},
        "records": records,
        "elapsed": round(time.perf_counter() - t0, 6),
    }
