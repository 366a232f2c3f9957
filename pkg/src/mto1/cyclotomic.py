"""The x^r * h(x^s) theory on F_q^*: reduction to the s-th power subgroup,
multiplicity predictions, monomial-like specializations, and lifts.

A CycloForm bundles (field, r, s, h) with s | q-1 and h rootless on the
subgroup U_ell, ell = (q-1)/s; that rootlessness is assumed by every
prediction, so it is checked eagerly at construction.  The companion map
g(x) = x^r1 * h(x)^s1 on U_ell (r1 = r/(r,s), s1 = s/(r,s)) drives all
verdicts; brute-force scans of f itself act as the independent oracle.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .criteria import HypothesisError
from .galois import FieldElement, Poly
from .multiplicity import FiniteMapping, check_m_to_1, verdict_from_histogram


class CycloForm:
    """f(x) = x^r * h(x^s) over one field, with its derived subgroup data."""

    __slots__ = ("spec", "r", "s", "h", "ell", "m1", "r1", "s1", "hlogs")

    def __init__(self, spec, r, s, h):
        q1 = spec.q - 1
        if not isinstance(r, int) or r < 1:
            raise ValueError(f"exponent r must be a positive integer, got {r}")
        if not isinstance(s, int) or s < 1 or q1 % s:
            raise HypothesisError(f"s = {s} must divide q-1 = {q1}")
        if h.spec != spec:
            raise HypothesisError("h must live over the form's field")
        if h.is_zero:
            raise HypothesisError("h must be nonzero")
        ell = q1 // s
        hlogs = []
        for j in range(ell):
            v = h.eval_index(spec.exp_at(j * s))
            if v == 0:
                witness = FieldElement(spec, spec.exp_at(j * s))
                raise HypothesisError(f"h has the root {witness} in U_{ell}")
            hlogs.append(spec.log[v])
        self.spec = spec
        self.r = r
        self.s = s
        self.h = h
        self.ell = ell
        self.m1 = math.gcd(r, s)
        self.r1 = r // self.m1
        self.s1 = s // self.m1
        self.hlogs = tuple(hlogs)

    def __repr__(self):
        return (f"CycloForm({self.spec!r}, r={self.r}, s={self.s}, "
                f"h=[{self.h}])")

    # f on F_q^*, by discrete logs: x = g^i maps to g^(r*i + log h(g^(i*s)))
    def f_logs(self):
        q1 = self.spec.q - 1
        r, ell, hl = self.r, self.ell, self.hlogs
        return [(r * i + hl[i % ell]) % q1 for i in range(q1)]

    def f_image_index(self, xi):
        """f at one element index (0 maps to 0 since r >= 1)."""
        spec = self.spec
        if xi == 0:
            return 0
        i = spec.log[xi]
        q1 = spec.q - 1
        return spec.exp_at((self.r * i + self.hlogs[i % self.ell]) % q1)

    def star_mapping(self):
        """f as an explicit mapping on F_q^* (element points, dlog order)."""
        spec = self.spec
        logs = self.f_logs()
        domain = tuple(FieldElement(spec, spec.exp_at(i)) for i in range(len(logs)))
        images = tuple(FieldElement(spec, spec.exp_at(t)) for t in logs)
        return FiniteMapping(domain, images)

    def field_mapping(self):
        """f on all of F_q (zero included)."""
        star = self.star_mapping()
        zero = self.spec.zero
        return FiniteMapping((zero,) + star.domain, (zero,) + star.images)


@dataclass(frozen=True)
class CycloDecomposition:
    """Data of the reduction: g on U_ell, with the commuting square verified."""

    form: CycloForm
    m1: int
    r1: int
    s1: int
    ell: int
    g_logs: tuple  # dlog of g at g^(j*s), j = 0..ell-1

    def g_mapping(self):
        spec = self.form.spec
        s = self.form.s
        dom = tuple(FieldElement(spec, spec.exp_at(j * s)) for j in range(self.ell))
        img = tuple(FieldElement(spec, spec.exp_at(t)) for t in self.g_logs)
        return FiniteMapping(dom, img)

    def g_fibers(self):
        return Counter(self.g_logs)

    def g_report(self, m2):
        return check_m_to_1(self.g_mapping(), m2)

    def g_verdict(self, m2):
        if not 1 <= m2 <= self.ell:
            return False
        return verdict_from_histogram(self.g_fibers(), self.ell, m2)


def decompose(form, verify=True):
    """Build g on U_ell; by default verify the commuting square exhaustively.

    Verification failures raise RuntimeError: they would mean an arithmetic
    bug, not a property of the input.  Grid sweeps may pass verify=False to
    skip the O(q) re-check per form.
    """
    spec = form.spec
    q1 = spec.q - 1
    s, s1, r1, m1, ell = form.s, form.s1, form.r1, form.m1, form.ell
    g_logs = tuple((r1 * (j * s) + s1 * form.hlogs[j]) % q1 for j in range(ell))
    if verify:
        sub = q1 // (ell * m1)
        for t in g_logs:
            if t % sub:
                raise RuntimeError("g escaped U_(ell*m1); arithmetic bug")
        flogs = form.f_logs()
        for i in range(q1):
            if (s1 * flogs[i]) % q1 != g_logs[i % ell]:
                raise RuntimeError("commuting square failed; arithmetic bug")
    return CycloDecomposition(form, m1, r1, s1, ell, g_logs)


# -- brute-force oracle --------------------------------------------------------

def star_fibers(form):
    """Fiber Counter of f on F_q^* by direct evaluation (the oracle side)."""
    return Counter(form.f_logs())


def brute_verdict_star(form, m):
    q1 = form.spec.q - 1
    if not 1 <= m <= q1:
        raise ValueError(f"m out of range [1, {q1}]: {m}")
    return verdict_from_histogram(star_fibers(form), q1, m)


def brute_report_star(form, m):
    return check_m_to_1(form.star_mapping(), m)


def brute_admissible_star(form):
    fib = star_fibers(form)
    q1 = form.spec.q - 1
    return frozenset(m for m in range(1, q1 + 1)
                     if verdict_from_histogram(fib, q1, m))


# -- the main reduction --------------------------------------------------------

@dataclass(frozen=True)
class MainPrediction:
    m: int
    verdict: bool
    failed: str | None  # first failed conjunct, None when verdict holds
    decomposition: CycloDecomposition

    def to_json(self):
        return {"m": self.m, "verdict": self.verdict, "failed": self.failed}


def predict_from(decomp, m):
    """Prediction at multiplicity m from an existing decomposition."""
    form = decomp.form
    if not 1 <= m <= decomp.ell * decomp.m1:
        raise ValueError(
            f"m must be in [1, ell*m1] = [1, {decomp.ell * decomp.m1}], got {m}")
    if m % decomp.m1:
        return MainPrediction(m, False, "m1 divides m", decomp)
    m2 = m // decomp.m1
    if not decomp.g_verdict(m2):
        return MainPrediction(m, False, f"g is {m2}-to-1 on U_{decomp.ell}", decomp)
    if not form.s * (decomp.ell % m2) < m:
        return MainPrediction(m, False, "s*(ell mod m2) < m", decomp)
    return MainPrediction(m, True, None, decomp)


def main_predict(form, m):
    """Predicted m-to-1 verdict for f on F_q^* via the subgroup reduction:
    m1 | m, g is (m/m1)-to-1 on U_ell, and s*(ell mod (m/m1)) < m."""
    return predict_from(decompose(form), m)


def fq_bridge(form, m):
    """Transfer the F_q^* verdict to all of F_q for f with only the root 0.

    m = 1: the verdicts coincide.  m >= 2: f is m-to-1 on F_q iff m does not
    divide q and f is m-to-1 on F_q^*.
    """
    spec = form.spec
    q = spec.q
    if not 1 <= m <= q:
        raise ValueError(f"m out of range [1, {q}]: {m}")
    # only-root-0 re-check; the form invariant already guarantees it
    for j in range(form.ell):
        if form.h.eval_index(spec.exp_at(j * form.s)) == 0:
            raise HypothesisError("f has a nonzero root")
    star = brute_verdict_star(form, m) if m <= q - 1 else False
    if m == 1:
        verdict = star
    else:
        verdict = (q % m != 0) and star
    return {"m": m, "verdict_fq": verdict, "verdict_star": star,
            "m_divides_q": q % m == 0}


# -- small multiplicities m = 2, 3 ----------------------------------------------

def small_m_predict(form, m):
    """Case-list verdicts for m in {2, 3} (s >= 2 required, ell >= m)."""
    if m not in (2, 3):
        raise ValueError(f"small_m_predict handles m in {{2, 3}}, got {m}")
    if form.s < 2:
        raise HypothesisError(f"case list needs s >= 2, got s = {form.s}")
    if form.ell < m:
        raise HypothesisError(f"case list needs ell >= m, got ell = {form.ell}")
    d = decompose(form)
    if m == 2:
        if d.m1 == 1 and form.ell % 2 == 0 and d.g_verdict(2):
            return True, "m1=1, ell even, g 2-to-1"
        if d.m1 == 2 and d.g_verdict(1):
            return True, "m1=2, g 1-to-1"
        return False, None
    if d.m1 == 1 and form.ell % 3 == 0 and d.g_verdict(3):
        return True, "m1=1, ell=0 mod 3, g 3-to-1"
    if d.m1 == 1 and form.ell % 3 == 1 and form.s == 2 and d.g_verdict(3):
        return True, "m1=1, ell=1 mod 3, s=2, g 3-to-1"
    if d.m1 == 3 and d.g_verdict(1):
        return True, "m1=3, g 1-to-1"
    return False, None


# -- small subgroups ell = 2, 3 --------------------------------------------------

def small_ell_predict(form, m):
    """Finite case analysis on g's values when U_ell has 2 or 3 points."""
    ell = form.ell
    if ell not in (2, 3):
        raise HypothesisError(f"small_ell_predict needs ell in {{2, 3}}, got {ell}")
    d = decompose(form)
    if not 1 <= m <= ell * d.m1:
        raise ValueError(f"m out of range [1, {ell * d.m1}]: {m}")
    if ell == 2:
        g1, gm1 = d.g_logs  # values at 1 and -1
        if m == d.m1 and g1 != gm1:
            return True, "m=m1, g(1) != g(-1)"
        if m == 2 * d.m1 and g1 == gm1:
            return True, "m=2*m1, g(1) = g(-1)"
        return False, None
    if m == d.m1 and d.g_verdict(1):
        return True, "m=m1, g 1-to-1 on U_3"
    if m == 2 * d.m1 and d.g_verdict(2) and form.r % form.s == 0:
        return True, "m=2*m1, g 2-to-1 on U_3, s | r"
    if m == 3 * d.m1 and d.g_verdict(3):
        return True, "m=3*m1, g 3-to-1 on U_3"
    return False, None


# -- monomial-like forms ---------------------------------------------------------

def monomial_predict(form, beta, t, m):
    """Verdict when h(a)^s1 = beta * a^t on all of U_ell: m-to-1 iff m1 | m and
    gcd(r1 + t, ell) = m/m1.  The hypothesis is scanned exhaustively; a failure
    raises with the witness point."""
    spec = form.spec
    q1 = spec.q - 1
    if not isinstance(beta, FieldElement) or beta.spec != spec:
        raise HypothesisError("beta must be an element of the form's field")
    if beta.is_zero:
        raise HypothesisError("beta must be nonzero")
    blog = spec.log[beta.index]
    for j in range(form.ell):
        if (form.s1 * form.hlogs[j]) % q1 != (blog + t * (j * form.s)) % q1:
            witness = FieldElement(spec, spec.exp_at(j * form.s))
            raise HypothesisError(
                f"h(a)^s1 != beta*a^t at a = {witness}")
    if not 1 <= m <= form.ell * form.m1:
        raise ValueError(f"m out of range [1, {form.ell * form.m1}]: {m}")
    verdict = m % form.m1 == 0 and math.gcd(form.r1 + t, form.ell) == m // form.m1
    return {"m": m, "verdict": verdict, "beta": beta, "t": t,
            "gcd": math.gcd(form.r1 + t, form.ell)}


def infer_monomial_params(form):
    """Try to recover (beta, t) with h(a)^s1 = beta*a^t on U_ell; None when h
    is not monomial-like.  Inference failure is not an error of the predicate."""
    spec = form.spec
    q1 = spec.q - 1
    ell, s, s1 = form.ell, form.s, form.s1
    beta_log = (s1 * form.hlogs[0]) % q1
    if ell == 1:
        t = 0
    else:
        # solve at the subgroup generator g^s: beta * (g^s)^t = h(g^s)^s1
        diff = ((s1 * form.hlogs[1]) - beta_log) % q1
        if diff % s:
            return None
        t = diff // s
    beta = FieldElement(spec, spec.exp_at(beta_log))
    try:
        monomial_predict(form, beta, t, 1 if form.m1 == 1 else form.m1)
    except HypothesisError:
        return None
    return beta, t


# -- the h_d = 1 + x + ... + x^(d-1) families over extension towers ---------------

def hd_poly(spec, d):
    if d < 1:
        raise ValueError("h_d needs d >= 1")
    return Poly(spec, (1,) * d)


def hd_rootless_gcd(d, e, ell, base_q):
    """gcd criterion for h_d(x^e) having no roots in U_ell over an extension
    of F_base_q: gcd(d, base_q * ell / gcd(e, ell)) = 1."""
    return math.gcd(d, base_q * ell // math.gcd(e, ell)) == 1


def hd_rootless_scan(field, d, e, ell):
    """Exhaustive cross-check of the gcd criterion inside a concrete field."""
    q1 = field.q - 1
    if q1 % ell:
        raise HypothesisError(f"ell = {ell} does not divide q-1 = {q1}")
    step = q1 // ell
    hd = hd_poly(field, d)
    for j in range(ell):
        point = field.pow(field.exp_at(j * step), e)
        if hd.eval_index(point) == 0:
            return False
    return True


def hd_family_predict(field, base_degree, r, s, d, e, t, m, H=None, k=None):
    """Multiplicity prediction for f = x^r * h(x^s) over F_(q0^n0), where
    q0 = p^base_degree, h = h_d(x^e)^t (optionally times H(h_k(x^e)^ell0)).

    Two regimes: ell*m1 | gcd(q0-1, n0) predicts m-to-1 exactly at m = m1;
    n0 even with ell*m1 | q0+1 predicts via gcd(ell*m1, r + (1-d)*e*s*t/(q0-1)).
    Divisibility hypotheses outside both regimes raise HypothesisError.
    """
    if field.n % base_degree:
        raise HypothesisError(
            f"base degree {base_degree} does not divide {field.n}")
    q0 = field.p ** base_degree
    n0 = field.n // base_degree
    big_q1 = field.q - 1
    if big_q1 % s:
        raise HypothesisError(f"s = {s} does not divide q^n-1 = {big_q1}")
    ell = big_q1 // s
    m1 = math.gcd(r, s)

    h = hd_poly(field, d).of_power(e) ** t
    if H is not None:
        if k is None:
            raise HypothesisError("the H-twisted family needs k")
        for c in H.coeffs:
            if field.frob(c, base_degree) != c:
                raise HypothesisError("H must have coefficients in the base field")
        ell0 = ell // math.gcd(ell, k - 1) if k > 1 else ell
        h = h * _compose(H, hd_poly(field, k).of_power(e) ** ell0)

    form = CycloForm(field, r, s, h)  # scans h rootless on U_ell

    gcd_ok = hd_rootless_gcd(d, e, ell, q0)
    scan_ok = hd_rootless_scan(field, d, e, ell)

    if math.gcd(q0 - 1, n0) % (ell * m1) == 0:
        case = "q-1"
        predicted = m == m1
    elif n0 % 2 == 0 and (q0 + 1) % (ell * m1) == 0:
        case = "q+1"
        shift_num = (1 - d) * e * s * t
        if shift_num % (q0 - 1):
            raise HypothesisError("(1-d)est/(q0-1) is not integral")
        predicted = (m % m1 == 0
                     and math.gcd(ell * m1, r + shift_num // (q0 - 1)) == m)
    else:
        raise HypothesisError(
            f"neither ell*m1 | (q0-1, n0) nor (n0 even and ell*m1 | q0+1) holds")
    return {"case": case, "m": m, "predicted": predicted, "form": form,
            "hd_rootless_gcd": gcd_ok, "hd_rootless_scan": scan_ok,
            "q0": q0, "n0": n0, "ell": ell, "m1": m1}


def _compose(outer, inner):
    """outer(inner(x)) by Horner over polynomials."""
    acc = Poly(outer.spec, ())
    for c in reversed(outer.coeffs):
        acc = acc * inner + Poly(outer.spec, (c,))
    return acc


# -- lifting permutations and the transfer equivalence ----------------------------

def permutes_field(form):
    """Does f = x^r h(x^s) permute all of F_q?  Decided by direct scan."""
    logs = form.f_logs()
    return len(set(logs)) == len(logs)  # 0 -> 0 is automatic


def lift_from_permutation(form, M, eps, t, k):
    """From f permuting F_q and eps * x^t * M(x)^s = 1 on U_ell, build
    F = x^(kt) M(x^s)^k f(x) and record its predicted multiplicity
    (r + kt, s), verified by brute force."""
    spec = form.spec
    q1 = spec.q - 1
    if not permutes_field(form):
        raise HypothesisError("f does not permute F_q")
    if eps.spec != spec or eps.is_zero:
        raise HypothesisError("eps must be a nonzero field element")
    elog = spec.log[eps.index]
    for j in range(form.ell):
        a = spec.exp_at(j * form.s)
        mv = M.eval_index(a)
        if mv == 0 or (elog + t * (j * form.s) + form.s * spec.log[mv]) % q1:
            witness = FieldElement(spec, a)
            raise HypothesisError(f"eps*x^t*M(x)^s != 1 at x = {witness}")
    if k < 1:
        raise HypothesisError(f"k must be a positive integer, got {k}")
    lifted = CycloForm(spec, form.r + k * t, form.s, M ** k * form.h)
    m_pred = math.gcd(form.r + k * t, form.s)
    verified = brute_verdict_star(lifted, m_pred)
    return {"form": lifted, "m": m_pred, "verified": verified}


def transfer_equivalence(form, M, eps, t, k, m):
    """The F = x^(kt) M(x^s)^k f(x) equivalence: F is m-to-1 on F_q^* iff f is,
    under (r,s) | t, (r+kt, s) = (r,s), and eps * x^(t/m1) * M(x)^(s/m1) = 1
    on U_ell with eps in U_(ell*m1).  Both sides are computed by brute force."""
    spec = form.spec
    q1 = spec.q - 1
    m1 = form.m1
    if t % m1:
        raise HypothesisError(f"(r, s) = {m1} must divide t = {t}")
    if math.gcd(form.r + k * t, form.s) != m1:
        raise HypothesisError("(r + kt, s) must equal (r, s)")
    if eps.spec != spec or eps.is_zero:
        raise HypothesisError("eps must be a nonzero field element")
    if spec.pow(eps.index, form.ell * m1) != 1:
        raise HypothesisError("eps must lie in U_(ell*m1)")
    elog = spec.log[eps.index]
    t1, s1 = t // m1, form.s1
    for j in range(form.ell):
        a = spec.exp_at(j * form.s)
        mv = M.eval_index(a)
        if mv == 0 or (elog + t1 * (j * form.s) + s1 * spec.log[mv]) % q1:
            witness = FieldElement(spec, a)
            raise HypothesisError(
                f"eps*x^(t/m1)*M(x)^(s/m1) != 1 at x = {witness}")
    if not 1 <= m <= form.ell * m1:
        raise ValueError(f"m out of range [1, {form.ell * m1}]: {m}")
    lifted = CycloForm(spec, form.r + k * t, form.s, M ** k * form.h)
    lhs = brute_verdict_star(lifted, m)
    rhs = brute_verdict_star(form, m)
    return {"m": m, "lifted": lhs, "base": rhs, "agree": lhs == rhs,
            "form_F": lifted}


# -- randomized rootless h for verification grids ---------------------------------

def random_rootless_poly(spec, s, max_degree, rng):
    """Random h of degree <= max_degree with no roots in U_((q-1)/s)."""
    q1 = spec.q - 1
    ell = q1 // s
    while True:
        coeffs = [rng.randrange(spec.q) for _ in range(max_degree + 1)]
        h = Poly(spec, coeffs)
        if h.is_zero:
            continue
        if all(h.eval_index(spec.exp_at(j * s)) for j in range(ell)):
            return h
