"""Executable commutative-square machinery: the local criterion and the three
construction-style equivalences for m-to-1 mappings.

Each verdict function computes both sides of its equivalence independently
(never deriving one from the other) and reports whether they agree.  Violated
hypotheses raise HypothesisError rather than returning a false verdict: the
equivalences are conditional, and a silent False would conflate "hypothesis
fails" with "conclusion fails".
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .multiplicity import FiniteMapping, check_m_to_1


class HypothesisError(ValueError):
    """A stated precondition of a criterion or theorem does not hold."""


@dataclass(frozen=True)
class CriterionReport:
    lhs: bool
    rhs: bool
    detail: dict = field(default_factory=dict)

    @property
    def agree(self):
        return self.lhs == self.rhs

    def to_json(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "agree": self.agree,
                "detail": {k: str(v) for k, v in self.detail.items()}}


def _as_table(mapping):
    if isinstance(mapping, FiniteMapping):
        return mapping.as_table()
    return dict(mapping)


def _fibers_of(table, domain):
    fibers = defaultdict(list)
    for a in domain:
        fibers[table[a]].append(a)
    return fibers


class CommutativeSquare:
    """Explicit model (A, Abar, S, Sbar, f, fbar, lam, lambar) with
    lambar o f = fbar o lam checked pointwise on construction."""

    __slots__ = ("a_points", "abar_points", "s_points", "sbar_points",
                 "f", "fbar", "lam", "lambar")

    def __init__(self, a_points, abar_points, s_points, sbar_points,
                 f, fbar, lam, lambar):
        self.a_points = tuple(a_points)
        self.abar_points = tuple(abar_points)
        self.s_points = tuple(s_points)
        self.sbar_points = tuple(sbar_points)
        self.f = dict(f)
        self.fbar = dict(fbar)
        self.lam = dict(lam)
        self.lambar = dict(lambar)
        self._validate()

    def _validate(self):
        if not self.a_points:
            raise HypothesisError("A must be nonempty")
        for name, m, dom, cod in (
                ("f", self.f, self.a_points, self.abar_points),
                ("fbar", self.fbar, self.s_points, self.sbar_points),
                ("lam", self.lam, self.a_points, self.s_points),
                ("lambar", self.lambar, self.abar_points, self.sbar_points)):
            dom_set, cod_set = set(dom), set(cod)
            if set(m.keys()) != dom_set:
                raise HypothesisError(f"{name} is not total on its domain")
            if not set(m.values()) <= cod_set:
                raise HypothesisError(f"{name} maps outside its codomain")
        for a in self.a_points:
            if self.lambar[self.f[a]] != self.fbar[self.lam[a]]:
                raise HypothesisError(
                    f"square does not commute at point {a!r}")

    def f_mapping(self):
        return FiniteMapping(self.a_points, tuple(self.f[a] for a in self.a_points))

    def fbar_mapping(self):
        return FiniteMapping(self.s_points, tuple(self.fbar[s] for s in self.s_points))

    @classmethod
    def from_json(cls, obj):
        """Fixture schema: point sets as string lists, maps as objects."""
        if isinstance(obj, str):
            with open(obj) as fh:
                obj = json.load(fh)
        return cls(obj["A"], obj["Abar"], obj["S"], obj["Sbar"],
                   obj["f"], obj["fbar"], obj["lambda"], obj["lambdabar"])


class GroupModel:
    """Finite group given by element list, operation, identity, and inverses.

    op may be a dict keyed by (a, b) pairs (explicit table) or a callable;
    callables suit multiplicative groups too large for a q^2 table.  Axioms
    are checked exhaustively up to 64 elements; larger models need trusted=True.
    """

    __slots__ = ("elements", "_op", "identity", "inverse")

    MAX_ELEMENTS = 4096

    def __init__(self, elements, op, identity, inverse, trusted=False):
        self.elements = tuple(elements)
        if len(self.elements) > self.MAX_ELEMENTS:
            raise HypothesisError(
                f"group model limited to {self.MAX_ELEMENTS} elements")
        self._op = op
        self.identity = identity
        self.inverse = dict(inverse)
        if not trusted:
            self._check_axioms()

    def op(self, a, b):
        if callable(self._op):
            return self._op(a, b)
        return self._op[(a, b)]

    def _check_axioms(self):
        elts = self.elements
        eset = set(elts)
        if self.identity not in eset:
            raise HypothesisError("identity not in element list")
        for a in elts:
            if self.op(a, self.identity) != a or self.op(self.identity, a) != a:
                raise HypothesisError(f"identity law fails at {a!r}")
            ia = self.inverse.get(a)
            if ia not in eset or self.op(a, ia) != self.identity:
                raise HypothesisError(f"inverse law fails at {a!r}")
        for a in elts:
            for b in elts:
                if self.op(a, b) not in eset:
                    raise HypothesisError("operation not closed")
        if len(elts) <= 64:
            for a in elts:
                for b in elts:
                    ab = self.op(a, b)
                    for c in elts:
                        if self.op(ab, c) != self.op(a, self.op(b, c)):
                            raise HypothesisError("operation not associative")

    @classmethod
    def cyclic(cls, n):
        elts = tuple(range(n))
        return cls(elts, lambda a, b: (a + b) % n, 0,
                   {a: (-a) % n for a in elts}, trusted=n > 64)

    @classmethod
    def unit_group(cls, spec):
        """F_q^* under multiplication, elements as encoding indices."""
        elts = tuple(spec.exp_at(k) for k in range(spec.q - 1))
        return cls(elts, spec.mul, 1, {a: spec.inv(a) for a in elts},
                   trusted=len(elts) > 64)

    @classmethod
    def from_json(cls, obj, trusted=False):
        """Fixture schema: elements as a string list, op as nested objects."""
        if isinstance(obj, str):
            with open(obj) as fh:
                obj = json.load(fh)
        table = {(a, b): obj["op"][a][b] for a in obj["op"] for b in obj["op"][a]}
        return cls(obj["elements"], table, obj["identity"], obj["inverse"],
                   trusted=trusted)


# -- the generalized local criterion ------------------------------------------

def local_criterion_check(f, psi, m):
    """Both sides of the local criterion for phi = psi o f.

    lhs: f is m-to-1 on A.  rhs: f is m-to-1 on every class phi^-1(c) of
    size >= m, and the exceptional/small-class point count equals #A mod m.
    When no class reaches size m the first conjunct is vacuously true and
    the sum identity alone decides.
    """
    if not isinstance(f, FiniteMapping):
        f = FiniteMapping.from_table(_as_table(f))
    size = len(f)
    if not 1 <= m <= size:
        raise ValueError(f"m must be in [1, {size}], got {m}")
    psi_t = _as_table(psi)
    phi = {a: psi_t[b] for a, b in zip(f.domain, f.images)}
    classes = _fibers_of(phi, f.domain)

    lhs = check_m_to_1(f, m).verdict

    tally = 0
    per_class_ok = True
    for pts in classes.values():
        if len(pts) >= m:
            rep = check_m_to_1(f.restrict(pts), m)
            if not rep.verdict:
                per_class_ok = False
                break
            tally += len(rep.exceptional_set)
        else:
            tally += len(pts)
    rhs = per_class_ok and tally == size % m
    return CriterionReport(lhs, rhs, {"m": m, "classes": len(classes)})


# -- construction 1: injective bottom map --------------------------------------

def construction1_verdict(sq, m):
    """Requires fbar 1-to-1 on S.  rhs: per-fiber m-to-1 over lam(A) plus the
    exceptional-set sum identity; lhs: direct check of f."""
    fbar_map = sq.fbar_mapping()
    if not check_m_to_1(fbar_map, 1).verdict:
        raise HypothesisError("fbar is not 1-to-1 on S")
    f = sq.f_mapping()
    size = len(f)
    if not 1 <= m <= size:
        raise ValueError(f"m must be in [1, {size}], got {m}")

    lhs = check_m_to_1(f, m).verdict

    fibers = _fibers_of(sq.lam, sq.a_points)
    tally = 0
    per_fiber_ok = True
    for pts in fibers.values():
        if len(pts) >= m:
            rep = check_m_to_1(f.restrict(pts), m)
            if not rep.verdict:
                per_fiber_ok = False
                break
            tally += len(rep.exceptional_set)
        else:
            tally += len(pts)
    rhs = per_fiber_ok and tally == size % m
    return CriterionReport(lhs, rhs, {"m": m})


# -- construction 2: equifibered lambda ----------------------------------------

def construction2_verdict(sq, m1, m):
    """Requires lam surjective, #lam^-1(s) = m1 * #lambar^-1(fbar(s)), and f
    m1-to-1 on every lam fiber.  rhs: m1 | m, fbar (m/m1)-to-1 on S, and the
    lam-fiber sum over E_fbar(S) equals #A mod m."""
    lam_fibers = _fibers_of(sq.lam, sq.a_points)
    if set(lam_fibers.keys()) != set(sq.s_points):
        raise HypothesisError("lam is not surjective onto S")
    lambar_fibers = _fibers_of(sq.lambar, sq.abar_points)
    f = sq.f_mapping()
    size = len(f)
    for s in sq.s_points:
        down = len(lambar_fibers.get(sq.fbar[s], ()))
        pts = lam_fibers[s]
        if len(pts) != m1 * down:
            raise HypothesisError(
                f"fiber size mismatch at s={s!r}: {len(pts)} != {m1}*{down}")
        if not check_m_to_1(f.restrict(pts), m1).verdict:
            raise HypothesisError(f"f is not {m1}-to-1 on lam^-1({s!r})")
    if not 1 <= m <= m1 * len(sq.s_points):
        raise HypothesisError(
            f"m must be in [1, m1*#S] = [1, {m1 * len(sq.s_points)}], got {m}")

    lhs = check_m_to_1(f, m).verdict

    if m % m1:
        rhs = False
        detail = {"m1_divides_m": False}
    else:
        rep = check_m_to_1(sq.fbar_mapping(), m // m1)
        ident = (sum(len(lam_fibers[s]) for s in rep.exceptional_set)
                 == size % m) if rep.verdict else False
        rhs = rep.verdict and ident
        detail = {"fbar_verdict": rep.verdict, "sum_identity": ident}
    detail["m"] = m
    detail["m1"] = m1
    return CriterionReport(lhs, rhs, detail)


# -- construction 3: twisting by u inside a group -------------------------------

def construction3_verdict(group, sq, u, variant, m, m1=None):
    """Compares f*u against f, where (f*u)(a) = f(a) * u(a) in the group.

    Requires lambar to be a homomorphism of the group onto Sbar and
    lambar(u(a)) constant.  Variant 1 needs fbar injective and u factoring
    through lam; variant 2 needs construction-2 fiber hypotheses for both
    f and f*u.  Under the hypotheses the two verdicts must agree.
    """
    elts = set(group.elements)
    if set(sq.a_points) != elts or set(sq.abar_points) != elts:
        raise HypothesisError("square must live on the group's element set")
    u_t = _as_table(u)
    if set(u_t.keys()) != elts or not set(u_t.values()) <= elts:
        raise HypothesisError("u must map the group to itself")
    sbar = set(sq.sbar_points)
    if set(sq.lambar.values()) != sbar:
        raise HypothesisError("lambar is not onto Sbar")
    for a in group.elements:
        for b in group.elements:
            if sq.lambar[group.op(a, b)] != group.op(sq.lambar[a], sq.lambar[b]):
                raise HypothesisError("lambar is not a homomorphism")
    consts = {sq.lambar[u_t[a]] for a in group.elements}
    if len(consts) != 1:
        raise HypothesisError("lambar o u is not constant")

    f_map = sq.f_mapping()
    fu = FiniteMapping(sq.a_points,
                       tuple(group.op(sq.f[a], u_t[a]) for a in sq.a_points))

    if variant == 1:
        if not check_m_to_1(sq.fbar_mapping(), 1).verdict:
            raise HypothesisError("variant 1 needs fbar 1-to-1 on S")
        seen = {}
        for a in sq.a_points:
            s = sq.lam[a]
            if s in seen and seen[s] != u_t[a]:
                raise HypothesisError("variant 1 needs u to factor through lam")
            seen[s] = u_t[a]
        if not 1 <= m <= len(f_map):
            raise ValueError(f"m out of range: {m}")
    elif variant == 2:
        if m1 is None:
            raise HypothesisError("variant 2 needs m1")
        lam_fibers = _fibers_of(sq.lam, sq.a_points)
        if set(lam_fibers.keys()) != set(sq.s_points):
            raise HypothesisError("lam is not surjective onto S")
        lambar_fibers = _fibers_of(sq.lambar, sq.abar_points)
        for s in sq.s_points:
            pts = lam_fibers[s]
            down = len(lambar_fibers.get(sq.fbar[s], ()))
            if len(pts) != m1 * down:
                raise HypothesisError(f"fiber size mismatch at s={s!r}")
            if not check_m_to_1(f_map.restrict(pts), m1).verdict:
                raise HypothesisError(f"f is not {m1}-to-1 on lam^-1({s!r})")
            if not check_m_to_1(fu.restrict(pts), m1).verdict:
                raise HypothesisError(f"f*u is not {m1}-to-1 on lam^-1({s!r})")
        if not 1 <= m <= m1 * len(sq.s_points):
            raise HypothesisError(f"m out of range: {m}")
    else:
        raise ValueError(f"variant must be 1 or 2, got {variant}")

    lhs = check_m_to_1(fu, m).verdict
    rhs = check_m_to_1(f_map, m).verdict
    return CriterionReport(lhs, rhs, {"variant": variant, "m": m})
