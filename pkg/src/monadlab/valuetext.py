"""Parsing for the value syntax format_value prints.

The same surface text means different things under different monads
({a:1} is a multiset, a distribution, or an integer combination), so
parsing is directed by a monad per layer: parse_layered reads nested
container layers outside-in and bare labels at the bottom. Within a tree
layer `<` always opens this layer's node, and `e` / `bot` / `err` / `ok`
are reserved by the layer that uses them.
"""

import re
from fractions import Fraction
from typing import Sequence, Union

from .monads import FinMonad, monad_for
from .values import (
    Value,
    mk_bleaf,
    mk_bnode,
    mk_bot,
    mk_dist,
    mk_err,
    mk_fun,
    mk_grp,
    mk_list,
    mk_mset,
    mk_nleaf,
    mk_nnode,
    mk_nunit,
    mk_ok,
    mk_set,
)

__all__ = ["ValueSyntaxError", "parse_value", "parse_layered"]


class ValueSyntaxError(ValueError):
    pass


_PUNCT = set("[]{}<>(),:")
_TOKEN_RE = re.compile(r"[\[\]{}<>(),:]|[^\[\]{}<>(),:\s]+")
_LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items = _TOKEN_RE.findall(text)
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, context: str) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueSyntaxError(f"unexpected end of input, expected {context}")
        self.pos += 1
        return tok

    def expect(self, want: str):
        tok = self.next(repr(want))
        if tok != want:
            raise ValueSyntaxError(f"expected {want!r}, found {tok!r}")

    def done(self) -> bool:
        return self.pos >= len(self.items)


def _label(tokens: _Tokens) -> str:
    tok = tokens.next("a label")
    if tok in _PUNCT or not _LABEL_RE.match(tok):
        raise ValueSyntaxError(f"expected a label, found {tok!r}")
    return tok


def _comma_list(tokens: _Tokens, close: str, item) -> list:
    out = []
    if tokens.peek() == close:
        tokens.expect(close)
        return out
    out.append(item())
    while tokens.peek() == ",":
        tokens.expect(",")
        out.append(item())
    tokens.expect(close)
    return out


def _number(tokens: _Tokens, kind: str):
    tok = tokens.next(kind)
    try:
        if kind == "an integer":
            return int(tok)
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ValueSyntaxError(f"expected {kind}, found {tok!r}") from None


def _weighted(tokens: _Tokens, inner, kind: str) -> list:
    def entry():
        x = inner()
        tokens.expect(":")
        return (x, _number(tokens, kind))

    tokens.expect("{")
    return _comma_list(tokens, "}", entry)


def _layer(tokens: _Tokens, monads: tuple, i: int) -> Value:
    if i == len(monads):
        return _label(tokens)
    m = monads[i]

    def inner():
        return _layer(tokens, monads, i + 1)

    fam = m.family
    if fam in ("list", "nonempty-list"):
        tokens.expect("[")
        items = _comma_list(tokens, "]", inner)
        if not items and m.monad_id == "nonempty-list":
            raise ValueSyntaxError("a nonempty list needs at least one element")
        return mk_list(items)
    if fam == "powerset":
        tokens.expect("{")
        return mk_set(_comma_list(tokens, "}", inner))
    if fam == "multiset":
        entries = _weighted(tokens, inner, "an integer")
        if any(n < 0 for _, n in entries):
            raise ValueSyntaxError("multiset counts cannot be negative")
        return mk_mset(entries=entries)
    if fam == "abgroup":
        return mk_grp(_weighted(tokens, inner, "an integer"))
    if fam == "dist":
        entries = _weighted(tokens, inner, "a weight")
        try:
            return mk_dist(entries)
        except ValueError as exc:
            raise ValueSyntaxError(str(exc)) from None
    if fam == "bintree":
        if tokens.peek() == "<":
            tokens.expect("<")
            left = _layer(tokens, monads, i)
            tokens.expect(",")
            right = _layer(tokens, monads, i)
            tokens.expect(">")
            return mk_bnode(left, right)
        return mk_bleaf(inner())
    if fam == "narytree":
        if tokens.peek() == "e":
            tokens.expect("e")
            return mk_nunit()
        if tokens.peek() == "<":
            tokens.expect("<")
            children = _comma_list(tokens, ">", lambda: _layer(tokens, monads, i))
            if len(children) != m.width:
                raise ValueSyntaxError(
                    f"node of width {len(children)} in a width-{m.width} tree"
                )
            return mk_nnode(children)
        return mk_nleaf(inner())
    if fam == "exception":
        if tokens.peek() == "err":
            tokens.expect("err")
            tokens.expect("(")
            label = _label(tokens)
            tokens.expect(")")
            if label not in m.labels:
                raise ValueSyntaxError(
                    f"unknown error label {label!r}; this monad raises "
                    f"{', '.join(m.labels)}"
                )
            return mk_err(label)
        return mk_ok(_maybe_ok(tokens, inner))
    if fam == "lift":
        if tokens.peek() == "bot":
            tokens.expect("bot")
            return mk_bot()
        return mk_ok(_maybe_ok(tokens, inner))
    if fam == "reader":
        tokens.expect("(")
        at0 = inner()
        tokens.expect(",")
        at1 = inner()
        tokens.expect(")")
        return mk_fun(at0, at1)
    raise ValueSyntaxError(f"no text form for monad {m.monad_id}")  # pragma: no cover


def _maybe_ok(tokens: _Tokens, inner):
    # an explicit ok(...) wrapper is accepted and means the same thing
    if tokens.peek() == "ok":
        tokens.expect("ok")
        tokens.expect("(")
        v = inner()
        tokens.expect(")")
        return v
    return inner()


def _resolve(monads) -> tuple:
    out = []
    for m in monads:
        out.append(m if isinstance(m, FinMonad) else monad_for(m))
    return tuple(out)


def parse_layered(text: str, monads: Sequence[Union[str, FinMonad]]) -> Value:
    """Parse nested container layers, outermost first, labels at the bottom."""
    try:
        tokens = _Tokens(text)
    except ValueError as exc:
        raise ValueSyntaxError(str(exc)) from None
    v = _layer(tokens, _resolve(monads), 0)
    if not tokens.done():
        raise ValueSyntaxError(f"trailing input {' '.join(tokens.items[tokens.pos:])!r}")
    return v


def parse_value(text: str, monad: Union[str, FinMonad]) -> Value:
    """Parse a single container layer over bare labels."""
    return parse_layered(text, (monad,))
