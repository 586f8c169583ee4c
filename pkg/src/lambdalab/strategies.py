"""Reduction strategies: deterministic LO/RI, argument-normal steps, and
the randomized mixture that picks the LO-redex with probability eps and
the RI-redex with probability 1 - eps.

All probabilities are exact rationals end to end; no floating point enters
strategy or solver code.  A strategy's output distribution always has total
mass exactly 1, with support contained in the one-step beta-reducts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .terms import (
    CanonicalTerm,
    Term,
    canonicalize,
    is_normal_form,
    redexes,
    reduce_at,
    subterm_at,
)


class InvalidEpsilon(ValueError):
    """eps = 0 where a strictly positive mixing weight is required."""


DEFAULT_FUEL = 10_000


def parse_probability(text: str) -> Fraction:
    """Exact rational in [0,1] from 'num/den', '0' or '1'; decimals rejected."""
    m = re.fullmatch(r"(\d+)(?:/(\d+))?", text.strip())
    if not m:
        raise ValueError(f"probability must be 'num/den' or an integer, got {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError("probability denominator must be nonzero")
    p = Fraction(num, den)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {text!r} outside [0,1]")
    return p


@dataclass(frozen=True)
class StepCount:
    """Finite(n): normal form reached in n steps; otherwise fuel ran out."""

    steps: int
    finite: bool

    @classmethod
    def reached(cls, n: int) -> "StepCount":
        return cls(n, True)

    @classmethod
    def exhausted(cls, fuel: int) -> "StepCount":
        return cls(fuel, False)

    def __str__(self) -> str:
        return str(self.steps) if self.finite else f"fuel-exhausted({self.steps})"


class Distribution:
    """Exact-rational distribution over alpha-classes of terms.

    Keys are canonical terms; one concrete representative per class is kept
    so downstream code can keep reducing without re-parsing.  All masses are
    positive and sum to at most 1 (strategy outputs sum to exactly 1).
    """

    __slots__ = ("masses", "reps")

    def __init__(self, entries: list[tuple[Term, Fraction]]):
        masses: dict[CanonicalTerm, Fraction] = {}
        reps: dict[CanonicalTerm, Term] = {}
        for term, p in entries:
            if p < 0:
                raise ValueError("negative probability mass")
            if p == 0:
                continue
            c = canonicalize(term)
            masses[c] = masses.get(c, Fraction(0)) + p
            reps.setdefault(c, term)
        if sum(masses.values(), Fraction(0)) > 1:
            raise ValueError("total mass exceeds 1")
        self.masses = masses
        self.reps = reps

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    def support(self) -> list[CanonicalTerm]:
        return list(self.masses)

    def items(self):
        return self.masses.items()

    def rep(self, c: CanonicalTerm) -> Term:
        return self.reps[c]

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and self.masses == other.masses

    def __repr__(self) -> str:
        from .terms import render

        inner = ", ".join(f"{render(self.reps[c])}: {p}" for c, p in self.masses.items())
        return f"Distribution({{{inner}}})"


# ---------------------------------------------------------------------------
# deterministic strategies


def step_lo(t: Term) -> Optional[Term]:
    """One leftmost-outermost step; None iff t is in normal form."""
    paths = redexes(t)
    if not paths:
        return None
    return reduce_at(t, paths[0])


def step_ri(t: Term) -> Optional[Term]:
    """One rightmost-innermost step; None iff t is in normal form.

    The contracted redex is the pre-order-last one, so its argument can
    contain no redex: every RI step is an argument-normal step.
    """
    paths = redexes(t)
    if not paths:
        return None
    return reduce_at(t, paths[-1])


def beta_successors(t: Term) -> list[Term]:
    """All one-step beta-reducts, deduplicated up to alpha, redex order."""
    seen: set[CanonicalTerm] = set()
    out: list[Term] = []
    for p in redexes(t):
        u = reduce_at(t, p)
        c = canonicalize(u)
        if c not in seen:
            seen.add(c)
            out.append(u)
    return out


def anf_successors(t: Term) -> list[Term]:
    """One-step reducts through redexes whose argument is in normal form."""
    seen: set[CanonicalTerm] = set()
    out: list[Term] = []
    for p in redexes(t):
        if not is_normal_form(subterm_at(t, p).arg):
            continue
        u = reduce_at(t, p)
        c = canonicalize(u)
        if c not in seen:
            seen.add(c)
            out.append(u)
    return out


# ---------------------------------------------------------------------------
# the randomized strategy


def p_eps(t: Term, eps) -> Optional[Distribution]:
    """Distribution of the eps-mixture of LO and RI on t; None iff t normal.

    With a single redex the two choices coincide and the output is Dirac.
    When the LO- and RI-reducts are alpha-equal the two masses merge onto
    one class, keeping the total mass exactly 1.
    """
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must lie in [0,1], got {eps}")
    paths = redexes(t)
    if not paths:
        return None
    lo_reduct = reduce_at(t, paths[0])
    if len(paths) == 1:
        return Distribution([(lo_reduct, Fraction(1))])
    ri_reduct = reduce_at(t, paths[-1])
    return Distribution([(lo_reduct, eps), (ri_reduct, 1 - eps)])


@dataclass(frozen=True)
class Strategy:
    """A named rule mapping each reducible term to a reduct distribution.

    kind is one of "lo", "ri", "peps"; eps is only meaningful for "peps".
    """

    kind: str
    eps: Optional[Fraction] = None

    @staticmethod
    def lo() -> "Strategy":
        return Strategy("lo")

    @staticmethod
    def ri() -> "Strategy":
        return Strategy("ri")

    @staticmethod
    def peps(eps) -> "Strategy":
        eps = Fraction(eps)
        if not 0 <= eps <= 1:
            raise ValueError(f"eps must lie in [0,1], got {eps}")
        return Strategy("peps", eps)

    @staticmethod
    def parse(text: str) -> "Strategy":
        text = text.strip()
        if text == "lo":
            return Strategy.lo()
        if text == "ri":
            return Strategy.ri()
        if text.startswith("peps:"):
            return Strategy.peps(parse_probability(text[len("peps:"):]))
        raise ValueError(f"unknown strategy {text!r} (want lo, ri or peps:<num>/<den>)")

    @property
    def name(self) -> str:
        if self.kind == "peps":
            assert self.eps is not None
            return f"peps:{self.eps.numerator}/{self.eps.denominator}"
        return self.kind

    def distribution(self, t: Term) -> Optional[Distribution]:
        if self.kind == "lo":
            u = step_lo(t)
            return None if u is None else Distribution([(u, Fraction(1))])
        if self.kind == "ri":
            u = step_ri(t)
            return None if u is None else Distribution([(u, Fraction(1))])
        assert self.eps is not None
        return p_eps(t, self.eps)


# ---------------------------------------------------------------------------
# derivation-length counters


_STEPPERS: dict[str, Callable[[Term], Optional[Term]]] = {"lo": step_lo, "ri": step_ri}


def n_steps(t: Term, strategy: str, fuel: int = DEFAULT_FUEL) -> StepCount:
    """Steps to normal form under a deterministic strategy, fuel-bounded."""
    stepper = _STEPPERS[strategy]
    current = t
    for n in range(fuel + 1):
        nxt = stepper(current)
        if nxt is None:
            return StepCount.reached(n)
        current = nxt
    return StepCount.exhausted(fuel)


def foster_bound(t: Term, eps, fuel: int = DEFAULT_FUEL) -> Optional[Fraction]:
    """Upper bound N_LO(t)/eps on the expected derivation length.

    Valid because one LO-branch of every mixture step decreases N_LO by at
    least one while the other branch never increases it, so N_LO drops by
    at least eps in expectation per step.  None when LO does not reach a
    normal form within fuel (bound undefined at this fuel).
    """
    eps = Fraction(eps)
    if eps == 0:
        raise InvalidEpsilon("the bound requires eps > 0")
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0,1], got {eps}")
    count = n_steps(t, "lo", fuel)
    if not count.finite:
        return None
    return Fraction(count.steps) / eps
