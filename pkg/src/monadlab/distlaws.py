"""Distributive laws between container monads, and their Beck conditions.

A law here is a family of maps taking an outer structure of inner structures
to an inner structure of outer ones, written on values as
`apply: S(T(X)) -> T(S(X))`. `check_beck` tests naturality, both unit
conditions, and both multiplication conditions over graded pools, recording
every counterexample it finds.
"""

from __future__ import annotations

import difflib
import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from monadlab.monads import FinMonad, NoMonadError, monad_for
from monadlab.values import Value, format_value, mk_grp, mk_list, mk_mset, mk_set

__all__ = [
    "DistLaw",
    "NoLawError",
    "law_for",
    "law_ids",
    "BeckReport",
    "check_beck",
    "check_times_over_plus_form",
    "composite_monad",
]


class NoLawError(Exception):
    pass


@dataclass(frozen=True)
class DistLaw:
    """A candidate distributive law of the inner monad over the outer one."""

    law_id: str
    s_monad: FinMonad
    t_monad: FinMonad
    apply: Callable[[Value], Value]
    description: str = ""

    def __call__(self, v: Value) -> Value:
        return self.apply(v)


# ---------------------------------------------------------------------------
# concrete laws


def _ring_apply(v: Value) -> Value:
    """Expand a product of integer sums: list of abgroup values to an
    abgroup of lists, multiplying coefficients along each choice."""
    out: dict = {}
    for choice in itertools.product(*(g[1] for g in v[1:])):
        coeff = 1
        elems = []
        for x, c in choice:
            coeff *= c
            elems.append(x)
        key = ("list",) + tuple(elems)
        out[key] = out.get(key, 0) + coeff
    return mk_grp(out.items())


def _occurrence_payloads(s: FinMonad, v: Value):
    """The inner values sitting in `v` as an ordered tuple, plus a rebuild
    function that replaces them in place from an iterator."""
    sid = s.monad_id
    if sid in ("list", "nonempty-list"):
        return v[1:], lambda it: ("list",) + tuple(it)
    if sid == "multiset":
        payloads = tuple(x for x, n in v[1] for _ in range(n))
        return payloads, lambda it: mk_mset(items=tuple(it))
    if sid == "powerset":
        return v[1:], lambda it: mk_set(tuple(it))
    if sid == "bintree" or sid.startswith("narytree:"):
        payloads = s.members(v)

        def rebuild(it, shape=v):
            vals = iter(it)

            def go(t):
                if t[0] in ("bleaf", "nleaf"):
                    return (t[0], next(vals))
                if t[0] == "nunit":
                    return t
                return (t[0],) + tuple(go(c) for c in t[1:])

            return go(shape)

        return payloads, rebuild
    raise NoLawError(f"no choice expansion over {sid!r}")


def _choice_apply(s: FinMonad, t: FinMonad) -> Callable[[Value], Value]:
    """Cartesian choice: pick one element from the inner collection at each
    position of the outer shape; multiset choices multiply multiplicities."""

    def apply(v: Value) -> Value:
        payloads, rebuild = _occurrence_payloads(s, v)
        if t.monad_id == "powerset":
            picks = [p[1:] for p in payloads]
            return mk_set(
                rebuild(chosen) for chosen in itertools.product(*picks)
            )
        out: dict = {}
        for chosen in itertools.product(*(p[1] for p in payloads)):
            count = 1
            elems = []
            for x, n in chosen:
                count *= n
                elems.append(x)
            key = rebuild(elems)
            out[key] = out.get(key, 0) + count
        return mk_mset(entries=out.items())

    return apply


def _mm1_apply(v: Value) -> Value:
    """Glue the head of every later inner list onto the group before it;
    every other adjacency starts a new group."""
    groups: list = []
    current: list = []
    for idx, inner in enumerate(v[1:]):
        for j, x in enumerate(inner[1:]):
            if idx > 0 and j == 0:
                current.append(x)
            else:
                if current:
                    groups.append(current)
                current = [x]
    groups.append(current)
    return mk_list(mk_list(g) for g in groups)


def _mm_project(pick: Callable) -> Callable[[Value], Value]:
    """One block of projections when there are two or more inner lists; a
    single inner list explodes into singletons."""

    def apply(v: Value) -> Value:
        inners = v[1:]
        if len(inners) == 1:
            return mk_list(mk_list((x,)) for x in inners[0][1:])
        return mk_list([mk_list(pick(inner) for inner in inners)])

    return apply


def _exception_over_apply(t: FinMonad) -> Callable[[Value], Value]:
    """Push an exceptional structure inside: a bare error becomes a unit
    structure carrying that error, a payload gets ok wrapped on its elements."""

    def apply(v: Value) -> Value:
        if v[0] == "err":
            return t.unit(v)
        return t.fmap(lambda x: ("ok", x), v[1])

    return apply


def _faulty_apply(v: Value) -> Value:
    """Deliberately broken: a lone error passes through, but any error in a
    longer list collapses to err(a) regardless of which error occurred."""
    elems = v[1:]
    if len(elems) == 1 and elems[0][0] == "err":
        return elems[0]
    if all(e[0] == "ok" for e in elems):
        return ("ok", ("list",) + tuple(e[1] for e in elems))
    return ("err", "a")


# ---------------------------------------------------------------------------
# registry

_CHOICE_S = {"tree": "narytree:2", "list": "list", "multiset": "multiset", "mset": "multiset"}
_CHOICE_T = {"multiset": "multiset", "mset": "multiset", "powerset": "powerset", "set": "powerset"}


def _fixed_laws() -> dict:
    nel = monad_for("nonempty-list")
    exc = monad_for("exception:{a,b}")
    laws = {
        "ring": DistLaw(
            "ring",
            monad_for("list"),
            monad_for("abgroup"),
            _ring_apply,
            "expand products of sums into sums of products (polynomial ring)",
        ),
        "mset-cartesian": DistLaw(
            "mset-cartesian",
            monad_for("multiset"),
            monad_for("multiset"),
            _choice_apply(monad_for("multiset"), monad_for("multiset")),
            "multiply out a multiset of multisets multinomially",
        ),
        "mm-nel-1": DistLaw(
            "mm-nel-1",
            nel,
            nel,
            _mm1_apply,
            "regroup: later heads glue left, other adjacencies split",
        ),
        "mm-nel-2": DistLaw(
            "mm-nel-2",
            nel,
            nel,
            _mm_project(lambda inner: inner[1]),
            "heads of each inner list (singletons when only one inner list)",
        ),
        "mm-nel-3": DistLaw(
            "mm-nel-3",
            nel,
            nel,
            _mm_project(lambda inner: inner[-1]),
            "lasts of each inner list (singletons when only one inner list)",
        ),
        "faulty-list-exception": DistLaw(
            "faulty-list-exception",
            monad_for("list"),
            exc,
            _faulty_apply,
            "looks plausible pointwise but forgets which error occurred",
        ),
    }
    return laws


_LAWS = _fixed_laws()


def law_ids() -> tuple:
    fixed = [
        "ring",
        "mset-cartesian",
        "mm-nel-1",
        "mm-nel-2",
        "mm-nel-3",
        "faulty-list-exception",
    ]
    choices = [
        f"choice:{s}:{t}"
        for s in ("tree", "list", "multiset")
        for t in ("multiset", "powerset")
    ]
    from monadlab.monads import ALL_MONAD_IDS

    excs = [f"exception-over:{t}" for t in ALL_MONAD_IDS]
    return tuple(fixed + choices + excs)


def law_for(law_id: str) -> DistLaw:
    if law_id in _LAWS:
        return _LAWS[law_id]
    parts = law_id.split(":")
    if parts[0] == "choice" and len(parts) == 3:
        s_name, t_name = parts[1], parts[2]
        if s_name in _CHOICE_S and t_name in _CHOICE_T:
            s = monad_for(_CHOICE_S[s_name])
            t = monad_for(_CHOICE_T[t_name])
            law = DistLaw(
                law_id,
                s,
                t,
                _choice_apply(s, t),
                f"choose one element per {s_name} position from each {t_name}",
            )
            return _LAWS.setdefault(law_id, law)
    if parts[0] == "exception-over" and len(parts) >= 2:
        t_id = law_id.split(":", 1)[1]
        try:
            t = monad_for(t_id)
        except NoMonadError:
            t = None
        if t is not None:
            law = DistLaw(
                law_id,
                monad_for("exception:{a,b}"),
                t,
                _exception_over_apply(t),
                "push exceptional values inside the structure",
            )
            return _LAWS.setdefault(law_id, law)
    near = difflib.get_close_matches(law_id, law_ids(), n=3)
    hint = f"; did you mean {', '.join(near)}?" if near else ""
    raise NoLawError(f"unknown law {law_id!r}{hint}")


# ---------------------------------------------------------------------------
# Beck conditions


@dataclass
class BeckReport:
    law_id: str
    carrier: tuple
    bound: int
    nested_caps: tuple
    checked: dict = field(default_factory=dict)
    pool_sizes: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def violated(self, component: str) -> list:
        return [v for v in self.violations if v[0] == component]

    def describe(self) -> str:
        head = (
            f"{self.law_id}: carrier={len(self.carrier)} bound={self.bound}"
        )
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.checked.items()))
        if self.ok:
            return f"{head} OK ({counts}) in {self.elapsed:.2f}s"
        comp, w, lhs, rhs = self.violations[0]
        return (
            f"{head} VIOLATION of {comp} at {format_value(w)}: "
            f"{format_value(lhs)} != {format_value(rhs)}"
        )


def _letters(n: int) -> tuple:
    return tuple("abcdefghij"[:n])


def check_beck(
    law: DistLaw,
    carrier_size: int = 2,
    bound: int = 3,
    nested_caps: tuple = (32, 12),
    max_violations: int = 1000,
) -> BeckReport:
    """Test the four Beck conditions plus naturality over graded pools.

    Single-level pools are complete up to the bound; the doubly nested pools
    for the multiplication conditions use deterministic enumeration prefixes
    (`nested_caps`) as carriers, and the report records the pool sizes so a
    pass is an explicit bounded claim.
    """
    start = time.perf_counter()
    s, t, lam = law.s_monad, law.t_monad, law.apply
    X = _letters(carrier_size)
    report = BeckReport(law.law_id, X, bound, tuple(nested_caps))
    cap2, cap3 = nested_caps

    def note(component, w, lhs, rhs):
        if len(report.violations) < max_violations:
            report.violations.append((component, w, lhs, rhs))

    pool_t = t.enumerate(X, bound)
    pool_s = s.enumerate(X, bound)
    carrier_t = pool_t[:cap2]
    pool_st = s.enumerate(carrier_t, bound)
    report.pool_sizes["T"] = len(pool_t)
    report.pool_sizes["S"] = len(pool_s)
    report.pool_sizes["ST"] = len(pool_st)

    # eta-S then lambda is the same as pushing eta-S inside T
    for tv in pool_t:
        lhs = lam(s.unit(tv))
        rhs = t.fmap(s.unit, tv)
        if lhs != rhs:
            note("unit-s", tv, lhs, rhs)
    report.checked["unit-s"] = len(pool_t)

    # eta-T inside S then lambda is the same as eta-T outside
    for sv in pool_s:
        lhs = lam(s.fmap(t.unit, sv))
        rhs = t.unit(sv)
        if lhs != rhs:
            note("unit-t", sv, lhs, rhs)
    report.checked["unit-t"] = len(pool_s)

    # naturality in the carrier
    renames = [{"a": "a", "b": "a"}, {"a": "b", "b": "a"}]
    if carrier_size == 1:
        renames = [{"a": "a"}]
    for f in renames:
        inner = lambda tv: t.fmap(f.get, tv)  # noqa: E731
        for w in pool_st:
            lhs = lam(s.fmap(inner, w))
            rhs = t.fmap(lambda sv: s.fmap(f.get, sv), lam(w))
            if lhs != rhs:
                note("natural", w, lhs, rhs)
    report.checked["natural"] = len(pool_st) * len(renames)

    # mu-S then lambda versus lambda twice then mu-S inside T
    carrier_st = pool_st[:cap3]
    pool_sst = s.enumerate(carrier_st, bound)
    report.pool_sizes["SST"] = len(pool_sst)
    for w in pool_sst:
        lhs = lam(s.join(w))
        rhs = t.fmap(s.join, lam(s.fmap(lam, w)))
        if lhs != rhs:
            note("mult-s", w, lhs, rhs)
    report.checked["mult-s"] = len(pool_sst)

    # mu-T inside S then lambda versus lambda twice then mu-T outside
    pool_tt = t.enumerate(carrier_t, bound)
    carrier_tt = pool_tt[:cap3]
    pool_stt = s.enumerate(carrier_tt, bound)
    report.pool_sizes["TT"] = len(pool_tt)
    report.pool_sizes["STT"] = len(pool_stt)
    for w in pool_stt:
        lhs = lam(s.fmap(t.join, w))
        rhs = t.join(t.fmap(lam, lam(w)))
        if lhs != rhs:
            note("mult-t", w, lhs, rhs)
    report.checked["mult-t"] = len(pool_stt)

    report.elapsed = time.perf_counter() - start
    return report


def check_times_over_plus_form(law: DistLaw) -> bool:
    """Does the law distribute the outer binary over the inner binary on
    generators, the way a product distributes over a sum?

    Needs a canonical two-element container on both sides; raises
    PairUnsupportedError (encoding unsupported) otherwise.
    """
    s, t, lam = law.s_monad, law.t_monad, law.apply
    y1, y2, x0 = "a", "b", "c"
    lhs1 = lam(s.pair(t.pair(y1, y2), t.unit(x0)))
    rhs1 = t.pair(s.pair(y1, x0), s.pair(y2, x0))
    lhs2 = lam(s.pair(t.unit(x0), t.pair(y1, y2)))
    rhs2 = t.pair(s.pair(x0, y1), s.pair(x0, y2))
    return lhs1 == rhs1 and lhs2 == rhs2


# ---------------------------------------------------------------------------
# composite monad


class _CompositeMonad(FinMonad):
    """The monad T-after-S induced by a distributive law, on T(S(X)) values."""

    def __init__(self, law: DistLaw, s_cap: int = 16):
        self.law = law
        self.s_cap = s_cap
        self.monad_id = f"composite:{law.law_id}"
        self.family = "composite"

    def unit(self, x):
        return self.law.t_monad.unit(self.law.s_monad.unit(x))

    def fmap(self, f, v):
        t, s = self.law.t_monad, self.law.s_monad
        return t.fmap(lambda sv: s.fmap(f, sv), v)

    def join(self, v):
        # T S T S -> T T S S (law inside T) -> T S S (outer mu) -> T S
        t, s, lam = self.law.t_monad, self.law.s_monad, self.law.apply
        return t.fmap(s.join, t.join(t.fmap(lam, v)))

    def size(self, v):
        t, s = self.law.t_monad, self.law.s_monad
        return sum(s.size(sv) for sv in t.members(v))

    def members(self, v):
        return self.law.t_monad.members(v)

    def iter_values(self, carrier, bound) -> Iterator:
        t, s = self.law.t_monad, self.law.s_monad
        inner = list(
            itertools.islice(s.iter_values(carrier, bound), self.s_cap)
        )
        return t.iter_values(inner, bound)


def composite_monad(law: DistLaw, s_cap: int = 16) -> FinMonad:
    return _CompositeMonad(law, s_cap)
