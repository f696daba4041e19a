"""Finite set monads: enumerable containers with unit and join.

Every monad here works on canonical values from `values` and is exhaustively
enumerable over a finite carrier up to a structural size bound. Enumeration
is deterministic, duplicate-free, and graded by size, so the sequence for a
smaller bound is a prefix of the sequence for a larger one; law checking and
the free-model comparisons rely on that.
"""

from __future__ import annotations

import difflib
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from monadlab import terms, theories
from monadlab.values import (
    Value,
    canon_key,
    format_value,
    mk_bnode,
    mk_dist,
    mk_grp,
    mk_mset,
    mk_nnode,
    mk_nunit,
    mk_set,
)

__all__ = [
    "FinMonad",
    "PairUnsupportedError",
    "NoMonadError",
    "ListMonad",
    "MultisetMonad",
    "PowersetMonad",
    "BinTreeMonad",
    "NaryTreeMonad",
    "ExceptionMonad",
    "LiftMonad",
    "ReaderMonad",
    "DistMonad",
    "AbGroupMonad",
    "monad_for",
    "monad_ids",
    "ALL_MONAD_IDS",
    "MONAD_FAMILIES",
    "MonadLawReport",
    "check_monad_laws",
    "FreeModelReport",
    "free_model_iso_check",
]


class PairUnsupportedError(Exception):
    """The monad has no two-element container to encode a binary operation."""


class NoMonadError(Exception):
    pass


class FinMonad:
    """A finitary monad on canonical values.

    Subclasses define `monad_id`, `family`, `theory_id` (the presentation
    whose free models this monad gives, if registered), `unit`, `fmap`,
    `join`, `size`, and the graded generator `iter_values`.
    """

    monad_id: str = ""
    family: str = ""
    theory_id: Optional[str] = None

    def unit(self, x: Value) -> Value:
        raise NotImplementedError

    def fmap(self, f: Callable[[Value], Value], v: Value) -> Value:
        raise NotImplementedError

    def join(self, v: Value) -> Value:
        raise NotImplementedError

    def size(self, v: Value) -> int:
        raise NotImplementedError

    def members(self, v: Value) -> tuple:
        """The element occurrences of a value (support only, for abgroup)."""
        raise NotImplementedError

    def iter_values(self, carrier: Sequence[Value], bound: int) -> Iterator[Value]:
        raise NotImplementedError

    def enumerate(self, carrier: Sequence[Value], bound: int) -> list:
        return list(self.iter_values(carrier, bound))

    def pair(self, a: Value, b: Value) -> Value:
        """The two-element container over a then b, when one exists."""
        raise PairUnsupportedError(
            f"monad {self.monad_id!r} has no canonical two-element container"
        )

    def __repr__(self) -> str:
        return f"<FinMonad {self.monad_id}>"


class ListMonad(FinMonad):
    family = "list"

    def __init__(self, nonempty: bool = False):
        self.nonempty = nonempty
        self.monad_id = "nonempty-list" if nonempty else "list"
        self.family = self.monad_id
        self.theory_id = "boom:-A--" if nonempty else "boom:UA--"

    def unit(self, x):
        return ("list", x)

    def fmap(self, f, v):
        return ("list",) + tuple(f(x) for x in v[1:])

    def join(self, v):
        out = []
        for inner in v[1:]:
            out.extend(inner[1:])
        return ("list",) + tuple(out)

    def size(self, v):
        return len(v) - 1

    def members(self, v):
        return v[1:]

    def iter_values(self, carrier, bound):
        lo = 1 if self.nonempty else 0
        for s in range(lo, bound + 1):
            for combo in itertools.product(carrier, repeat=s):
                yield ("list",) + combo

    def pair(self, a, b):
        return ("list", a, b)


class MultisetMonad(FinMonad):
    monad_id = "multiset"
    family = "multiset"
    theory_id = "boom:UAC-"

    def unit(self, x):
        return ("mset", ((x, 1),))

    def fmap(self, f, v):
        return mk_mset(entries=((f(x), n) for x, n in v[1]))

    def join(self, v):
        out = []
        for inner, n in v[1]:
            out.extend((x, n * m) for x, m in inner[1])
        return mk_mset(entries=out)

    def size(self, v):
        return sum(n for _, n in v[1])

    def members(self, v):
        return tuple(x for x, n in v[1] for _ in range(n))

    def iter_values(self, carrier, bound):
        for s in range(bound + 1):
            for combo in itertools.combinations_with_replacement(carrier, s):
                yield mk_mset(items=combo)

    def pair(self, a, b):
        return mk_mset(items=(a, b))


class PowersetMonad(FinMonad):
    monad_id = "powerset"
    family = "powerset"
    theory_id = "boom:UACI"

    def unit(self, x):
        return ("set", x)

    def fmap(self, f, v):
        return mk_set(f(x) for x in v[1:])

    def join(self, v):
        out = []
        for inner in v[1:]:
            out.extend(inner[1:])
        return mk_set(out)

    def size(self, v):
        return len(v) - 1

    def members(self, v):
        return v[1:]

    def iter_values(self, carrier, bound):
        for s in range(bound + 1):
            for combo in itertools.combinations(carrier, s):
                yield mk_set(combo)

    def pair(self, a, b):
        return mk_set((a, b))


class BinTreeMonad(FinMonad):
    """Leaf-labelled binary trees; there is no empty tree."""

    monad_id = "bintree"
    family = "bintree"
    theory_id = "boom:----"

    def unit(self, x):
        return ("bleaf", x)

    def fmap(self, f, v):
        if v[0] == "bleaf":
            return ("bleaf", f(v[1]))
        return ("bnode", self.fmap(f, v[1]), self.fmap(f, v[2]))

    def join(self, v):
        if v[0] == "bleaf":
            return v[1]
        return ("bnode", self.join(v[1]), self.join(v[2]))

    def size(self, v):
        if v[0] == "bleaf":
            return 1
        return self.size(v[1]) + self.size(v[2])

    def members(self, v):
        if v[0] == "bleaf":
            return (v[1],)
        return self.members(v[1]) + self.members(v[2])

    def iter_values(self, carrier, bound):
        layers: list[list] = [[]]
        for s in range(1, bound + 1):
            if s == 1:
                layer = [("bleaf", x) for x in carrier]
            else:
                layer = [
                    ("bnode", l, r)
                    for sl in range(1, s)
                    for l in layers[sl]
                    for r in layers[s - sl]
                ]
            layers.append(layer)
            yield from layer

    def pair(self, a, b):
        return ("bnode", ("bleaf", a), ("bleaf", b))


class NaryTreeMonad(FinMonad):
    """n-ary leaf-labelled trees with a unit leaf; nodes with fewer than two
    proper children are pruned away, so values are normal forms."""

    family = "narytree"

    def __init__(self, width: int):
        if width < 2:
            raise ValueError("tree width must be at least 2")
        self.width = width
        self.monad_id = f"narytree:{width}"
        self.theory_id = "boom:U---" if width == 2 else f"narytree-theory:{width}"

    def unit(self, x):
        return ("nleaf", x)

    def fmap(self, f, v):
        if v[0] == "nunit":
            return v
        if v[0] == "nleaf":
            return ("nleaf", f(v[1]))
        return ("nnode",) + tuple(self.fmap(f, c) for c in v[1:])

    def join(self, v):
        if v[0] == "nunit":
            return v
        if v[0] == "nleaf":
            return v[1]
        # grafting can surface unit leaves, so rebuild through the pruning
        # constructor
        return mk_nnode([self.join(c) for c in v[1:]])

    def size(self, v):
        if v[0] == "nunit":
            return 0
        if v[0] == "nleaf":
            return 1
        return sum(self.size(c) for c in v[1:])

    def members(self, v):
        if v[0] == "nunit":
            return ()
        if v[0] == "nleaf":
            return (v[1],)
        out: tuple = ()
        for c in v[1:]:
            out += self.members(c)
        return out

    def iter_values(self, carrier, bound):
        n = self.width
        layers: list[list] = []
        for s in range(bound + 1):
            if s == 0:
                layer = [("nunit",)]
            elif s == 1:
                layer = [("nleaf", x) for x in carrier]
            else:
                layer = []
                for split in itertools.product(range(s + 1), repeat=n):
                    if sum(split) != s:
                        continue
                    if sum(1 for part in split if part > 0) < 2:
                        continue
                    for kids in itertools.product(*(layers[part] for part in split)):
                        layer.append(("nnode",) + kids)
            layers.append(layer)
            yield from layer

    def pair(self, a, b):
        kids = [("nleaf", a), ("nleaf", b)] + [("nunit",)] * (self.width - 2)
        return mk_nnode(kids)


class ExceptionMonad(FinMonad):
    family = "exception"

    def __init__(self, labels: Sequence[str]):
        self.labels = tuple(sorted(set(labels)))
        if not self.labels:
            raise ValueError("exception monad needs at least one label")
        inner = ",".join(self.labels)
        self.monad_id = "exception:{" + inner + "}"
        self.theory_id = self.monad_id

    def unit(self, x):
        return ("ok", x)

    def fmap(self, f, v):
        if v[0] == "err":
            return v
        return ("ok", f(v[1]))

    def join(self, v):
        if v[0] == "err":
            return v
        return v[1]

    def size(self, v):
        return 0 if v[0] == "err" else 1

    def members(self, v):
        return () if v[0] == "err" else (v[1],)

    def iter_values(self, carrier, bound):
        for label in self.labels:
            yield ("err", label)
        if bound >= 1:
            for x in carrier:
                yield ("ok", x)


class LiftMonad(FinMonad):
    monad_id = "lift"
    family = "lift"
    theory_id = "pointed"

    def unit(self, x):
        return ("ok", x)

    def fmap(self, f, v):
        if v[0] == "bot":
            return v
        return ("ok", f(v[1]))

    def join(self, v):
        if v[0] == "bot":
            return v
        return v[1]

    def size(self, v):
        return 0 if v[0] == "bot" else 1

    def members(self, v):
        return () if v[0] == "bot" else (v[1],)

    def iter_values(self, carrier, bound):
        yield ("bot",)
        if bound >= 1:
            for x in carrier:
                yield ("ok", x)


class ReaderMonad(FinMonad):
    """Functions out of a fixed two-point environment, kept as output tables."""

    monad_id = "reader:2"
    family = "reader"
    theory_id = "reader:2"

    def unit(self, x):
        return ("fun", x, x)

    def fmap(self, f, v):
        return ("fun", f(v[1]), f(v[2]))

    def join(self, v):
        # evaluate the outer table pointwise: position i reads position i of
        # the inner table found there
        return ("fun", v[1][1], v[2][2])

    def size(self, v):
        return 1

    def members(self, v):
        return (v[1], v[2])

    def iter_values(self, carrier, bound):
        if bound >= 1:
            for a, b in itertools.product(carrier, repeat=2):
                yield ("fun", a, b)

    def pair(self, a, b):
        return ("fun", a, b)


def _weight_tuples(slots: int, max_denominator: int) -> list[tuple]:
    """All tuples of `slots` positive weights with small denominators summing
    to one, in lexicographic order over the ascending weight alphabet."""
    alphabet = sorted(
        {
            Fraction(p, q)
            for q in range(1, max_denominator + 1)
            for p in range(1, q + 1)
        }
    )
    allowed = set(alphabet)
    out: list[tuple] = []

    def go(prefix: list, remaining: Fraction, left: int):
        if left == 1:
            if remaining in allowed:
                out.append(tuple(prefix + [remaining]))
            return
        for w in alphabet:
            if w >= remaining:
                break
            go(prefix + [w], remaining - w, left - 1)

    go([], Fraction(1), slots)
    return out


class DistMonad(FinMonad):
    """Finitely supported probability distributions with exact weights.

    The denominator bound only limits enumeration; values built by join keep
    exact arbitrary-denominator weights.
    """

    family = "dist"
    theory_id = "convex"

    def __init__(self, max_denominator: int = 4):
        self.max_denominator = max_denominator
        self.monad_id = "dist"

    def unit(self, x):
        return ("dist", ((x, Fraction(1)),))

    def fmap(self, f, v):
        return mk_dist((f(x), w) for x, w in v[1])

    def join(self, v):
        out = []
        for inner, w in v[1]:
            out.extend((x, w * u) for x, u in inner[1])
        return mk_dist(out)

    def size(self, v):
        return len(v[1])

    def members(self, v):
        return tuple(x for x, _ in v[1])

    def iter_values(self, carrier, bound):
        for s in range(1, bound + 1):
            tuples = _weight_tuples(s, self.max_denominator)
            for support in itertools.combinations(carrier, s):
                for weights in tuples:
                    yield mk_dist(zip(support, weights))

    def pair(self, a, b):
        return mk_dist(((a, Fraction(1, 2)), (b, Fraction(1, 2))))


class AbGroupMonad(FinMonad):
    """Free abelian groups: finite formal integer combinations."""

    monad_id = "abgroup"
    family = "abgroup"
    theory_id = "abgroup"

    def unit(self, x):
        return ("grp", ((x, 1),))

    def fmap(self, f, v):
        return mk_grp((f(x), c) for x, c in v[1])

    def join(self, v):
        out = []
        for inner, c in v[1]:
            out.extend((x, c * m) for x, m in inner[1])
        return mk_grp(out)

    def size(self, v):
        return sum(abs(c) for _, c in v[1])

    def members(self, v):
        return tuple(x for x, _ in v[1])

    def iter_values(self, carrier, bound):
        for s in range(bound + 1):
            if s == 0:
                yield ("grp", ())
                continue
            for k in range(1, min(s, len(carrier)) + 1):
                mags = [
                    split
                    for split in itertools.product(range(1, s + 1), repeat=k)
                    if sum(split) == s
                ]
                for support in itertools.combinations(carrier, k):
                    for mag in mags:
                        for signs in itertools.product((1, -1), repeat=k):
                            yield mk_grp(
                                (x, m * sg)
                                for x, m, sg in zip(support, mag, signs)
                            )

    def pair(self, a, b):
        return mk_grp(((a, 1), (b, 1)))


# ---------------------------------------------------------------------------
# registry

MONAD_FAMILIES = (
    "list",
    "nonempty-list",
    "multiset",
    "powerset",
    "bintree",
    "narytree",
    "exception",
    "lift",
    "reader",
    "dist",
    "abgroup",
)

_MONADS: dict = {}


def _register(m: FinMonad) -> FinMonad:
    _MONADS[m.monad_id] = m
    return m


_register(ListMonad())
_register(ListMonad(nonempty=True))
_register(MultisetMonad())
_register(PowersetMonad())
_register(BinTreeMonad())
_register(NaryTreeMonad(2))
_register(NaryTreeMonad(3))
_register(ExceptionMonad(("a",)))
_register(ExceptionMonad(("a", "b")))
_register(LiftMonad())
_register(ReaderMonad())
_register(DistMonad())
_register(AbGroupMonad())

ALL_MONAD_IDS = tuple(_MONADS)

_MONAD_ALIASES = {
    "reader": "reader:2",
    "mset": "multiset",
    "set": "powerset",
    "tree": "narytree:2",
    "maybe": "lift",
}


def monad_ids() -> tuple:
    return ALL_MONAD_IDS


def monad_for(monad_id: str) -> FinMonad:
    key = _MONAD_ALIASES.get(monad_id, monad_id)
    if key in _MONADS:
        return _MONADS[key]
    if key.startswith("exception:{") and key.endswith("}"):
        labels = tuple(p for p in key[len("exception:{"):-1].split(",") if p)
        m = ExceptionMonad(labels)
        return _MONADS.setdefault(m.monad_id, m)
    if key.startswith("narytree:"):
        try:
            width = int(key.split(":", 1)[1])
        except ValueError:
            width = 0
        if width >= 2:
            return _MONADS.setdefault(key, NaryTreeMonad(width))
    near = difflib.get_close_matches(key, list(_MONADS) + list(_MONAD_ALIASES), n=3)
    hint = f"; did you mean {', '.join(near)}?" if near else ""
    raise NoMonadError(f"unknown monad {monad_id!r}{hint}")


# ---------------------------------------------------------------------------
# law checking


@dataclass
class MonadLawReport:
    monad_id: str
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

    def describe(self) -> str:
        head = f"{self.monad_id}: carrier={len(self.carrier)} bound={self.bound}"
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.checked.items()))
        if self.ok:
            return f"{head} OK ({counts}) in {self.elapsed:.2f}s"
        law, v, lhs, rhs = self.violations[0]
        return (
            f"{head} VIOLATION of {law} at {format_value(v)}: "
            f"{format_value(lhs)} != {format_value(rhs)}"
        )


def _letters(n: int) -> tuple:
    return tuple("abcdefghij"[:n])


def check_monad_laws(
    monad: FinMonad,
    carrier_size: int = 2,
    bound: int = 3,
    nested_caps: tuple = (32, 12),
) -> MonadLawReport:
    """Exhaustively test unit and associativity laws over graded pools.

    The single-level pool is complete up to the bound. For associativity the
    carriers of the two deeper levels are deterministic prefixes of the
    canonical enumeration (sizes in `nested_caps`), so a pass is a bounded
    claim; the report records how many values each law saw.
    """
    start = time.perf_counter()
    carrier = _letters(carrier_size)
    report = MonadLawReport(monad.monad_id, carrier, bound, tuple(nested_caps))

    pool1 = monad.enumerate(carrier, bound)
    report.pool_sizes["T"] = len(pool1)

    for v in pool1:
        lhs = monad.join(monad.fmap(monad.unit, v))
        if lhs != v:
            report.violations.append(("unit-left", v, lhs, v))
        rhs = monad.join(monad.unit(v))
        if rhs != v:
            report.violations.append(("unit-right", v, rhs, v))
    report.checked["unit-left"] = len(pool1)
    report.checked["unit-right"] = len(pool1)

    cap2, cap3 = nested_caps
    carrier2 = pool1[:cap2]
    carrier3 = list(itertools.islice(monad.iter_values(carrier2, bound), cap3))
    pool3 = monad.enumerate(carrier3, bound)
    report.pool_sizes["TT-carrier"] = len(carrier2)
    report.pool_sizes["TTT-carrier"] = len(carrier3)
    report.pool_sizes["TTT"] = len(pool3)

    for w in pool3:
        lhs = monad.join(monad.fmap(monad.join, w))
        rhs = monad.join(monad.join(w))
        if lhs != rhs:
            report.violations.append(("assoc", w, lhs, rhs))
    report.checked["assoc"] = len(pool3)

    report.elapsed = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# free-model comparison


def _v_concat(a, b):
    return ("list",) + a[1:] + b[1:]


def _v_mset_add(a, b):
    return mk_mset(entries=a[1] + b[1])


def _v_union(a, b):
    return mk_set(a[1:] + b[1:])


def _v_mix(a, b):
    half = Fraction(1, 2)
    return mk_dist(
        [(x, w * half) for x, w in a[1]] + [(x, w * half) for x, w in b[1]]
    )


def _v_grp_add(a, b):
    return mk_grp(a[1] + b[1])


def _v_grp_neg(a):
    return mk_grp((x, -c) for x, c in a[1])


def free_model_ops(theory_id: str, monad_id: str) -> dict:
    """Operation interpretations on the monad's values for the pairs where
    the monad is the theory's free-model construction."""
    key = (theory_id, monad_id)
    tables: dict = {
        ("boom:UA--", "list"): {"mul": _v_concat, "e": lambda: ("list",)},
        ("boom:-A--", "nonempty-list"): {"mul": _v_concat},
        ("boom:UAC-", "multiset"): {
            "mul": _v_mset_add,
            "e": lambda: ("mset", ()),
        },
        ("boom:UACI", "powerset"): {"mul": _v_union, "e": lambda: ("set",)},
        ("boom:----", "bintree"): {"mul": mk_bnode},
        ("boom:U---", "narytree:2"): {
            "mul": lambda a, b: mk_nnode([a, b]),
            "e": mk_nunit,
        },
        ("narytree-theory:3", "narytree:3"): {
            "node": lambda a, b, c: mk_nnode([a, b, c]),
            "e": mk_nunit,
        },
        ("pointed", "lift"): {"bot": lambda: ("bot",)},
        ("abgroup", "abgroup"): {
            "mul": _v_grp_add,
            "e": lambda: ("grp", ()),
            "inv": _v_grp_neg,
        },
        ("reader:2", "reader:2"): {
            "mul": lambda a, b: ("fun", a[1], b[2])
        },
        ("convex", "dist"): {"mix": _v_mix},
    }
    if key in tables:
        return tables[key]
    if (
        theory_id == monad_id
        and theory_id.startswith("exception:{")
        and theory_id.endswith("}")
    ):
        labels = tuple(p for p in theory_id[len("exception:{"):-1].split(",") if p)
        return {lbl: (lambda lbl=lbl: ("err", lbl)) for lbl in labels}
    raise NoMonadError(
        f"no free-model interpretation registered for {theory_id!r} over {monad_id!r}"
    )


@dataclass
class FreeModelReport:
    theory_id: str
    monad_id: str
    labels: tuple
    bound: int
    depth: int
    term_count: int = 0
    class_count: int = 0
    value_count: int = 0
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


def free_model_iso_check(
    theory_id: str,
    monad_id: str,
    labels: tuple = ("a", "b", "c"),
    bound: int = 3,
    depth: int = 3,
    subst_depth: int = 2,
) -> FreeModelReport:
    """Compare the theory's free model on `labels` with the monad.

    Three checks over the full term universe up to `depth`:
    term classes (by the theory's decision procedure) map one-to-one onto
    values; for every b <= bound the values of size <= b are exactly the
    enumeration at bound b; and substitution followed by evaluation agrees
    with evaluating into nested values and joining.
    """
    entry = theories.lookup_theory(theory_id)
    monad = monad_for(monad_id)
    ops = free_model_ops(entry.theory_id, monad.monad_id)
    report = FreeModelReport(entry.theory_id, monad.monad_id, tuple(labels), bound, depth)

    sig = entry.presentation.signature
    atoms = [terms.Var(x) for x in labels] + [
        terms.App(c, ()) for c in sig.constants
    ]
    universe = list(terms.enumerate_terms(sig, atoms, depth))
    report.term_count = len(universe)

    def evaluator(env: dict) -> Callable:
        memo: dict = {}

        def value_of(t):
            got = memo.get(t)
            if got is None:
                if isinstance(t, terms.Var):
                    got = env[t.name]
                else:
                    got = ops[t.op.name](*(value_of(s) for s in t.args))
                memo[t] = got
            return got

        return value_of

    base_value = evaluator({x: monad.unit(x) for x in labels})

    proc = terms.procedure_for(entry.theory_id)
    by_class: dict = {}
    for t in universe:
        by_class.setdefault(proc.term_key(t), []).append(t)
    report.class_count = len(by_class)

    class_values: dict = {}
    for key, members in by_class.items():
        vals = {base_value(t) for t in members}
        if len(vals) > 1:
            report.problems.append(
                f"class of {terms.render(members[0])} maps to {len(vals)} values"
            )
        class_values[key] = vals.pop()

    seen: dict = {}
    for key, val in class_values.items():
        if val in seen:
            report.problems.append(
                f"distinct classes share value {format_value(val)}"
            )
        seen[val] = key
    report.value_count = len(seen)

    term_values = set(class_values.values())
    for b in range(bound + 1):
        enumerated = set(monad.enumerate(tuple(labels), b))
        reached = {v for v in term_values if monad.size(v) <= b}
        missing = enumerated - reached
        extra = reached - enumerated
        if missing:
            report.problems.append(
                f"bound {b}: {len(missing)} enumerated values unreachable from "
                f"terms, e.g. {format_value(sorted(missing, key=canon_key)[0])}"
            )
        if extra:
            report.problems.append(
                f"bound {b}: {len(extra)} term values missing from enumeration, "
                f"e.g. {format_value(sorted(extra, key=canon_key)[0])}"
            )

    # substitution vs join: evaluating t[sigma] directly must agree with
    # evaluating t over unit-wrapped evaluated images and then joining
    small = [t for t in universe if terms.term_depth(t) <= subst_depth]
    subst_images = small[: 3 * len(labels)]
    sigmas = []
    if subst_images:
        for shift in range(min(3, len(subst_images))):
            sigma = {
                x: subst_images[(i + shift) % len(subst_images)]
                for i, x in enumerate(labels)
            }
            sigmas.append(sigma)
    checked = 0
    for sigma in sigmas:
        outer_value = evaluator(
            {x: monad.unit(base_value(sigma[x])) for x in labels}
        )
        for t in small:
            direct = base_value(terms.substitute(t, sigma))
            if monad.join(outer_value(t)) != direct:
                report.problems.append(
                    f"substitution mismatch at {terms.render(t)}"
                )
            checked += 1
    if checked == 0:
        report.problems.append("no substitution cases checked")
    return report
