"""Lambda-term core: syntax, substitution, redexes and sub-calculi.

Terms are immutable trees over three constructors (Var, Abs, App) with
named binders.  Alpha-classes are the working objects: state identity
goes through canonicalize(), which rewrites bound variables to binding
depths and keeps free variables by name, so two terms get the same
canonical form exactly when they are alpha-equivalent.

Concrete syntax (UTF-8):

    term   ::= lambda | app
    lambda ::= ('\\' | 'λ') var '.' term
    app    ::= atom atom*            (left-associative)
    atom   ::= var | '(' term ')'
    var    ::= [A-Za-z][A-Za-z0-9_']*

render() emits '\\' with minimal parentheses and single spaces between
application operands; parse(render(t)) == t for every term t.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union


# ---------------------------------------------------------------------------
# term data


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


Term = Union[Var, Abs, App]

# A redex path addresses a node root-to-node; resolving it must land on an
# application whose function part is an abstraction.
INTO_BODY = "body"
INTO_FN = "fn"
INTO_ARG = "arg"
RedexPath = tuple  # tuple of INTO_* steps

# Nested-tuple encoding of an alpha-class: bound variables by binding depth,
# free variables by name.  Hashable, orderable within one chain, deterministic.
CanonicalTerm = tuple


class ParseError(ValueError):
    """Malformed concrete syntax; carries the offending character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InvalidPath(ValueError):
    """A redex path that does not address a redex of the given term."""


class InvalidArity(ValueError):
    """Family builders require n >= 1."""


class GenerationExhausted(RuntimeError):
    """random_term could not satisfy its filter within the retry budget."""


def ensure_recursion_headroom(limit: int = 20_000) -> None:
    """Raise (never lower) the interpreter recursion limit.

    Term traversals recurse on term depth; left application spines produced
    by duplicating reductions can reach depths in the thousands.
    """
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)


# ---------------------------------------------------------------------------
# parsing / printing


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "\\" or c == "λ":
            tokens.append(("lambda", c, i))
            i += 1
        elif c == ".":
            tokens.append(("dot", c, i))
            i += 1
        elif c == "(":
            tokens.append(("lparen", c, i))
            i += 1
        elif c == ")":
            tokens.append(("rparen", c, i))
            i += 1
        elif c.isascii() and c.isalpha():
            j = i + 1
            while j < n and (text[j].isascii() and (text[j].isalnum() or text[j] in "_'")):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    return tokens


def parse(text: str) -> Term:
    """Parse the concrete syntax into a Term.

    Application is left-associative and an abstraction body extends as far
    right as possible.  Raises ParseError with a position on bad input.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek() -> Optional[tuple[str, str, int]]:
        return tokens[pos] if pos < len(tokens) else None

    def expect(kind: str) -> tuple[str, str, int]:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError(f"expected {kind}, found end of input", len(text))
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        pos += 1
        return tok

    def parse_term() -> Term:
        tok = peek()
        if tok is None:
            raise ParseError("expected a term, found end of input", len(text))
        if tok[0] == "lambda":
            expect("lambda")
            _, name, _ = expect("ident")
            expect("dot")
            return Abs(name, parse_term())
        return parse_app()

    def parse_app() -> Term:
        t = parse_atom()
        while True:
            tok = peek()
            if tok is None or tok[0] not in ("ident", "lparen"):
                return t
            t = App(t, parse_atom())

    def parse_atom() -> Term:
        tok = peek()
        if tok is None:
            raise ParseError("expected a term, found end of input", len(text))
        if tok[0] == "ident":
            expect("ident")
            return Var(tok[1])
        if tok[0] == "lparen":
            expect("lparen")
            t = parse_term()
            expect("rparen")
            return t
        raise ParseError(f"expected a variable or '(', found {tok[1]!r}", tok[2])

    t = parse_term()
    tok = peek()
    if tok is not None:
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
    return t


def render(t: Term) -> str:
    """Minimal-parentheses rendering; inverse of parse up to whitespace."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        return f"\\{t.binder}.{render(t.body)}"
    fn = f"({render(t.fn)})" if isinstance(t.fn, Abs) else render(t.fn)
    arg = render(t.arg) if isinstance(t.arg, Var) else f"({render(t.arg)})"
    return f"{fn} {arg}"


def term_size(t: Term) -> int:
    """Node count."""
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    return 1 + term_size(t.fn) + term_size(t.arg)


# ---------------------------------------------------------------------------
# variables, alpha-equivalence, canonical forms


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.binder}
    return free_vars(t.fn) | free_vars(t.arg)


def _all_names(t: Term) -> set[str]:
    """Every variable name occurring in t, free or bound (binders included)."""
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Abs):
        return {t.binder} | _all_names(t.body)
    return _all_names(t.fn) | _all_names(t.arg)


def alpha_eq(t: Term, u: Term) -> bool:
    """True iff t and u differ only in the names of bound variables."""

    def go(a: Term, b: Term, env_a: dict, env_b: dict, depth: int) -> bool:
        if isinstance(a, Var) and isinstance(b, Var):
            da, db = env_a.get(a.name), env_b.get(b.name)
            if da is None and db is None:
                return a.name == b.name
            return da == db
        if isinstance(a, Abs) and isinstance(b, Abs):
            ea = dict(env_a)
            eb = dict(env_b)
            ea[a.binder] = depth
            eb[b.binder] = depth
            return go(a.body, b.body, ea, eb, depth + 1)
        if isinstance(a, App) and isinstance(b, App):
            return go(a.fn, b.fn, env_a, env_b, depth) and go(
                a.arg, b.arg, env_a, env_b, depth
            )
        return False

    return go(t, u, {}, {}, 0)


def canonicalize(t: Term) -> CanonicalTerm:
    """Binder-name-independent encoding; equal exactly on alpha-classes."""

    def go(node: Term, binders: tuple) -> CanonicalTerm:
        if isinstance(node, Var):
            try:
                return ("b", binders.index(node.name))
            except ValueError:
                return ("f", node.name)
        if isinstance(node, Abs):
            return ("l", go(node.body, (node.binder,) + binders))
        return ("a", go(node.fn, binders), go(node.arg, binders))

    return go(t, ())


# ---------------------------------------------------------------------------
# substitution


def _fresh_name(base: str, taken: set[str]) -> str:
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def _rename_free(t: Term, old: str, new: str) -> Term:
    # precondition: new does not occur anywhere in t
    if isinstance(t, Var):
        return Var(new) if t.name == old else t
    if isinstance(t, Abs):
        if t.binder == old:
            return t
        return Abs(t.binder, _rename_free(t.body, old, new))
    return App(_rename_free(t.fn, old, new), _rename_free(t.arg, old, new))


def substitute(body: Term, var: str, replacement: Term) -> Term:
    """Capture-avoiding substitution body{replacement/var}.

    Binders that would capture a free variable of the replacement are
    renamed with a deterministic counter, so repeated calls on equal inputs
    give identical results.
    """
    fv_rep = free_vars(replacement)
    taken = _all_names(body) | fv_rep | {var}

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return replacement if t.name == var else t
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if t.binder == var:
            return t
        if var not in free_vars(t.body):
            return t
        if t.binder in fv_rep:
            fresh = _fresh_name(t.binder, taken)
            taken.add(fresh)
            return Abs(fresh, go(_rename_free(t.body, t.binder, fresh)))
        return Abs(t.binder, go(t.body))

    return go(body)


# ---------------------------------------------------------------------------
# redexes


def redexes(t: Term) -> list[RedexPath]:
    """All beta-redex paths of t in pre-order (node, function, argument).

    Pre-order coincides with the left-to-right order of redex beginnings in
    render(t), because a redex begins no later than any redex properly
    inside it.  The first element is therefore the LO-redex and the last
    the RI-redex; the list is empty exactly when t is in normal form.
    """
    out: list[RedexPath] = []

    def walk(node: Term, path: RedexPath) -> None:
        if isinstance(node, App):
            if isinstance(node.fn, Abs):
                out.append(path)
            walk(node.fn, path + (INTO_FN,))
            walk(node.arg, path + (INTO_ARG,))
        elif isinstance(node, Abs):
            walk(node.body, path + (INTO_BODY,))

    walk(t, ())
    return out


def subterm_at(t: Term, path: RedexPath) -> Term:
    node = t
    for step in path:
        if step == INTO_FN and isinstance(node, App):
            node = node.fn
        elif step == INTO_ARG and isinstance(node, App):
            node = node.arg
        elif step == INTO_BODY and isinstance(node, Abs):
            node = node.body
        else:
            raise InvalidPath(f"path step {step!r} does not match term shape")
    return node


def _redex_at(t: Term, path: RedexPath) -> App:
    node = subterm_at(t, path)
    if isinstance(node, App) and isinstance(node.fn, Abs):
        return node
    raise InvalidPath("path does not address a beta-redex")


def reduce_at(t: Term, path: RedexPath) -> Term:
    """Contract the redex addressed by path; everything else is untouched."""

    def go(node: Term, i: int) -> Term:
        if i == len(path):
            if isinstance(node, App) and isinstance(node.fn, Abs):
                return substitute(node.fn.body, node.fn.binder, node.arg)
            raise InvalidPath("path does not address a beta-redex")
        step = path[i]
        if step == INTO_FN and isinstance(node, App):
            return App(go(node.fn, i + 1), node.arg)
        if step == INTO_ARG and isinstance(node, App):
            return App(node.fn, go(node.arg, i + 1))
        if step == INTO_BODY and isinstance(node, Abs):
            return Abs(node.binder, go(node.body, i + 1))
        raise InvalidPath(f"path step {step!r} does not match term shape")

    return go(t, 0)


def is_normal_form(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Abs):
        return is_normal_form(t.body)
    return (
        not isinstance(t.fn, Abs)
        and is_normal_form(t.fn)
        and is_normal_form(t.arg)
    )


def is_anf_redex(t: Term, path: RedexPath) -> bool:
    """True iff the addressed redex has an argument already in normal form."""
    return is_normal_form(_redex_at(t, path).arg)


def _free_occurrences(t: Term, name: str) -> int:
    if isinstance(t, Var):
        return 1 if t.name == name else 0
    if isinstance(t, Abs):
        return 0 if t.binder == name else _free_occurrences(t.body, name)
    return _free_occurrences(t.fn, name) + _free_occurrences(t.arg, name)


def multiplicity(t: Term, path: RedexPath) -> int:
    """Number of free occurrences of the redex binder in the redex body."""
    redex = _redex_at(t, path)
    assert isinstance(redex.fn, Abs)
    return _free_occurrences(redex.fn.body, redex.fn.binder)


# ---------------------------------------------------------------------------
# sub-calculi


class SubCalculus(Enum):
    """Filter / classification tags for the binder-occurrence sub-calculi."""

    FULL = "full"
    LAMBDA_I = "lambda-I"  # no cancellation: every binder occurs in its body
    LAMBDA_A = "lambda-A"  # no copy: every binder occurs at most once
    BOTH = "both"  # linear: every binder occurs exactly once


def is_lambda_I(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Abs):
        return _free_occurrences(t.body, t.binder) >= 1 and is_lambda_I(t.body)
    return is_lambda_I(t.fn) and is_lambda_I(t.arg)


def is_lambda_A(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Abs):
        return _free_occurrences(t.body, t.binder) <= 1 and is_lambda_A(t.body)
    return is_lambda_A(t.fn) and is_lambda_A(t.arg)


def classify(t: Term) -> SubCalculus:
    """Most specific tag; consistent with is_lambda_I / is_lambda_A."""
    i, a = is_lambda_I(t), is_lambda_A(t)
    if i and a:
        return SubCalculus.BOTH
    if i:
        return SubCalculus.LAMBDA_I
    if a:
        return SubCalculus.LAMBDA_A
    return SubCalculus.FULL


def _satisfies(t: Term, tag: SubCalculus) -> bool:
    if tag is SubCalculus.FULL:
        return True
    if tag is SubCalculus.LAMBDA_I:
        return is_lambda_I(t)
    if tag is SubCalculus.LAMBDA_A:
        return is_lambda_A(t)
    return is_lambda_I(t) and is_lambda_A(t)


# ---------------------------------------------------------------------------
# named terms


def mk_I() -> Term:
    return Abs("x", Var("x"))


def mk_omega() -> Term:
    return Abs("x", App(Var("x"), Var("x")))


def mk_Omega() -> Term:
    return App(mk_omega(), mk_omega())


def mk_example1() -> Term:
    """The cancelling application of a constant function to a looping argument."""
    return App(Abs("x", Var("y")), mk_Omega())


def mk_example2() -> Term:
    """The duplicating application: a self-application binder fed a redex."""
    return App(Abs("x", App(Var("x"), Var("x"))), App(mk_I(), mk_I()))


def mk_Cn(n: int) -> Term:
    """n-fold self-application under one binder: \\x.x x ... x (n vars)."""
    if n < 1:
        raise InvalidArity("mk_Cn requires n >= 1")
    body: Term = Var("x")
    for _ in range(n - 1):
        body = App(body, Var("x"))
    return Abs("x", body)


def mk_Mn(n: int) -> Term:
    """Family whose randomized-strategy cost beats both deterministic ends.

    The function side erases a looping redex, the argument side duplicates
    a cheap one: \\x.((\\y.z) Omega) x applied to Cn ((\\x.x) y).
    """
    if n < 1:
        raise InvalidArity("mk_Mn requires n >= 1")
    b = Abs("x", App(App(Abs("y", Var("z")), mk_Omega()), Var("x")))
    t_n = App(mk_Cn(n), App(mk_I(), Var("y")))
    return App(b, t_n)


NAMED_TERMS = {
    "I": mk_I,
    "omega": mk_omega,
    "Omega": mk_Omega,
    "example1": mk_example1,
    "example2": mk_example2,
}


# ---------------------------------------------------------------------------
# random generation

_FREE_POOL = ("a", "b", "c")
_GEN_RETRIES = 400


def _gen(
    rng: random.Random,
    budget: int,
    must: frozenset,
    avail: frozenset,
    tag: SubCalculus,
    counter: list[int],
    shape: str = "any",
) -> Optional[Term]:
    # must: binders that still need at least one occurrence below here
    # avail: binders usable here (single-use sets are routed, not shared)
    if len(must) > (budget + 1) // 2:
        return None  # a tree with `budget` nodes has at most (budget+1)//2 leaves

    choices = []
    if budget >= 1 and len(must) <= 1 and shape != "abs":
        choices.append("var")
    if budget >= 2:
        choices.extend(["abs", "abs"])
    if budget >= 3 and shape != "abs":
        choices.extend(["app", "app", "app"])
    if not choices:
        return None
    kind = rng.choice(choices)

    if kind == "var":
        if must:
            return Var(next(iter(must)))
        pool = tuple(sorted(avail)) + _FREE_POOL
        return Var(rng.choice(pool))

    if kind == "abs":
        name = f"v{counter[0]}"
        counter[0] += 1
        if tag in (SubCalculus.LAMBDA_I, SubCalculus.BOTH):
            must2 = must | {name}
            avail2 = avail | {name} if tag is SubCalculus.LAMBDA_I else avail
        elif tag is SubCalculus.LAMBDA_A:
            must2, avail2 = must, avail | {name}
        else:
            must2, avail2 = must, avail | {name}
        body = _gen(rng, budget - 1, frozenset(must2), frozenset(avail2), tag, counter)
        return None if body is None else Abs(name, body)

    left_budget = rng.randint(1, budget - 2)
    right_budget = budget - 1 - left_budget
    left_must, right_must = set(), set()
    for name in sorted(must):
        (left_must if rng.random() < 0.5 else right_must).add(name)
    if tag in (SubCalculus.LAMBDA_A, SubCalculus.BOTH):
        left_avail, right_avail = set(), set()
        for name in sorted(avail):
            (left_avail if rng.random() < 0.5 else right_avail).add(name)
    else:
        left_avail = right_avail = set(avail)
    # bias function positions toward abstractions so that corpora are
    # redex-rich rather than mostly vacuous for the reduction laws
    fn_shape = "abs" if left_budget >= 2 and rng.random() < 0.55 else "any"
    fn = _gen(rng, left_budget, frozenset(left_must), frozenset(left_avail), tag, counter, fn_shape)
    if fn is None and fn_shape == "abs":
        fn = _gen(rng, left_budget, frozenset(left_must), frozenset(left_avail), tag, counter)
    if fn is None:
        return None
    arg = _gen(rng, right_budget, frozenset(right_must), frozenset(right_avail), tag, counter)
    if arg is None:
        return None
    return App(fn, arg)


def random_term(seed: int, max_size: int, tag: SubCalculus = SubCalculus.FULL) -> Term:
    """Seed-deterministic random term with at most max_size nodes.

    Sub-calculus filters are enforced by construction: binder occurrences
    are routed while building rather than rejection-sampled, which keeps
    lambda-I feasible at sizes where rejection would almost always fail.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    rng = random.Random(seed)
    for _ in range(_GEN_RETRIES):
        # two upward-biased draws: tiny terms exercise laws only vacuously
        budget = max(rng.randint(1, max_size), rng.randint(1, max_size))
        t = _gen(rng, budget, frozenset(), frozenset(), tag, [0])
        if t is not None and term_size(t) <= max_size and _satisfies(t, tag):
            return t
    raise GenerationExhausted(
        f"no {tag.value} term of size <= {max_size} found for seed {seed}"
    )
