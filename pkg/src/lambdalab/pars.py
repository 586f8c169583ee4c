"""Probabilistic reduction semantics over exact rationals.

Two complementary views of a term under a probabilistic strategy:

* configuration evolution — a partial distribution over alpha-classes is
  pushed one step at a time; normal forms absorb, so their mass leaves the
  configuration and |rho_k| is the probability that a run takes k steps or
  more;
* the reachable-state chain — breadth-first closure of the start term under
  the strategy's supports, with every normal form collapsed into a single
  absorbing class ``trm``, solved exactly for the absorption probability
  and the expected absorption time.

Everything is computed in exact rational arithmetic; the linear systems are
solved by Gaussian elimination over Fractions, which is exact, so results
can be compared with closed formulas for equality rather than tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import lcm
from typing import Optional

from .strategies import Strategy, n_steps
from .terms import CanonicalTerm, Term, canonicalize, is_normal_form, render

TRM = "trm"  # the single absorbing class all normal forms collapse into


class StateCapExceeded(RuntimeError):
    """Reachable-state exploration found more states than the cap allows."""

    def __init__(self, discovered: int, state_cap: int):
        super().__init__(f"more than {state_cap} states reachable (saw {discovered})")
        self.discovered = discovered
        self.state_cap = state_cap


class SingularSystem(RuntimeError):
    """The hitting-time system was singular; signals a chain-construction bug."""


DEFAULT_STATE_CAP = 100_000


# ---------------------------------------------------------------------------
# configurations and evolution


@dataclass(frozen=True)
class Configuration:
    """Partial distribution over alpha-classes at a given step index."""

    masses: dict  # CanonicalTerm -> Fraction, all > 0
    reps: dict  # CanonicalTerm -> Term
    step: int = 0

    @classmethod
    def dirac(cls, t: Term) -> "Configuration":
        return cls({canonicalize(t): Fraction(1)}, {canonicalize(t): t}, 0)

    @property
    def mass(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))


def evolve(config: Configuration, strategy: Strategy) -> Configuration:
    """Push every unit of mass one step along the strategy.

    Normal-form states have no outgoing transitions, so their mass simply
    disappears; total mass is therefore non-increasing.
    """
    masses: dict[CanonicalTerm, Fraction] = {}
    reps: dict[CanonicalTerm, Term] = {}
    for c, m in config.masses.items():
        dist = strategy.distribution(config.reps[c])
        if dist is None:
            continue
        for c2, p in dist.items():
            masses[c2] = masses.get(c2, Fraction(0)) + m * p
            reps.setdefault(c2, dist.rep(c2))
    return Configuration(masses, reps, config.step + 1)


@dataclass(frozen=True)
class EvolutionTrace:
    """The mass sequence |rho_0|, ..., |rho_H| of an iterated evolution."""

    masses: tuple  # Fractions, length horizon + 1, masses[0] == 1

    @property
    def horizon(self) -> int:
        return len(self.masses) - 1

    @property
    def trailing_mass(self) -> Fraction:
        return self.masses[-1]


class _TransitionCache:
    """Lazily memoized successor rows of a strategy, keyed by alpha-class.

    row(c) is None when the class is a normal form, otherwise a tuple of
    (successor class, probability) pairs.  Successor classes are recorded
    with a representative term so rows for them can be built later.
    """

    def __init__(self, strategy: Strategy):
        self.strategy = strategy
        self.reps: dict[CanonicalTerm, Term] = {}
        self._rows: dict[CanonicalTerm, Optional[tuple]] = {}

    def add_root(self, t: Term) -> CanonicalTerm:
        c = canonicalize(t)
        self.reps.setdefault(c, t)
        return c

    def row(self, c: CanonicalTerm) -> Optional[tuple]:
        if c in self._rows:
            return self._rows[c]
        dist = self.strategy.distribution(self.reps[c])
        if dist is None:
            row = None
        else:
            entries = []
            for c2, p in dist.items():
                self.reps.setdefault(c2, dist.rep(c2))
                entries.append((c2, p))
            row = tuple(entries)
        self._rows[c] = row
        return row


def evolve_trace(t: Term, strategy: Strategy, horizon: int) -> EvolutionTrace:
    """Masses of the Dirac-started evolution, recorded up to the horizon.

    Equivalent to iterating evolve(); internally the masses are carried as
    integer numerators over one common denominator per step, which avoids
    rational normalization in the inner loop at large horizons.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    cache = _TransitionCache(strategy)
    origin = cache.add_root(t)
    current: dict[CanonicalTerm, int] = {origin: 1}
    denominator = 1
    masses = [Fraction(1)]
    for _ in range(horizon):
        rows = {c: cache.row(c) for c in current}
        step_den = 1
        for row in rows.values():
            if row:
                step_den = lcm(step_den, *(p.denominator for _, p in row))
        nxt: dict[CanonicalTerm, int] = {}
        for c, m in current.items():
            row = rows[c]
            if row is None:
                continue
            for c2, p in row:
                weight = p.numerator * (step_den // p.denominator)
                nxt[c2] = nxt.get(c2, 0) + m * weight
        denominator *= step_den
        current = nxt
        masses.append(Fraction(sum(current.values()), denominator))
    return EvolutionTrace(tuple(masses))


def derivation_length_dist(trace: EvolutionTrace) -> dict[int, Fraction]:
    """Pointwise mass drops: probability of terminating in exactly i steps.

    Zero entries are omitted; within the horizon the values sum, together
    with the trailing mass, to exactly 1.
    """
    if len(trace.masses) < 2:
        raise ValueError("trace needs at least two entries")
    out: dict[int, Fraction] = {}
    for i in range(trace.horizon):
        d = trace.masses[i] - trace.masses[i + 1]
        if d != 0:
            out[i] = d
    return out


def expected_length_truncated(trace: EvolutionTrace) -> Fraction:
    """Partial sum of the step masses: a lower bound on the expected length,
    exact whenever the trailing mass is zero."""
    return sum(trace.masses[1:], Fraction(0))


# ---------------------------------------------------------------------------
# reachable-state chain


@dataclass(frozen=True)
class ChainAnalysis:
    """Reachable-state graph of a term under a strategy plus solved
    hitting-time quantities.

    states lists the non-absorbing alpha-classes in BFS discovery order;
    every normal form is identified with the single absorbing class TRM,
    which self-loops with probability 1.  rows map each state to its exact
    outgoing distribution over states and TRM.  expected_length is None in
    a skeleton; after solving it is the exact expected absorption time, or
    INFINITE (represented as the string "inf" by reports) exactly when the
    termination probability from the origin is below 1.
    """

    origin: CanonicalTerm
    origin_term: Term
    strategy_name: str
    states: tuple  # CanonicalTerm, BFS order (empty iff origin is normal)
    reps: dict  # CanonicalTerm -> Term
    rows: dict  # CanonicalTerm -> tuple[(CanonicalTerm | TRM, Fraction), ...]
    solved: bool = False
    termination_prob: Optional[Fraction] = None
    expected_length: Optional[Fraction] = None  # None means infinite once solved

    def state_index(self) -> dict:
        return {c: i for i, c in enumerate(self.states)}

    def to_report(self) -> dict:
        """JSON-ready report: rendered states, num/den transition triples."""
        index = self.state_index()
        transitions = []
        for c in self.states:
            for target, p in self.rows[c]:
                transitions.append(
                    {
                        "from": index[c],
                        "to": TRM if target == TRM else index[target],
                        "prob": f"{p.numerator}/{p.denominator}",
                    }
                )
        report = {
            "origin": render(self.origin_term),
            "strategy": self.strategy_name,
            "states": [render(self.reps[c]) for c in self.states],
            "absorbing": TRM,
            "transitions": transitions,
        }
        if self.solved:
            assert self.termination_prob is not None
            tp = self.termination_prob
            report["termination_prob"] = f"{tp.numerator}/{tp.denominator}"
            if self.expected_length is None:
                report["expected_length"] = "inf"
            else:
                e = self.expected_length
                report["expected_length"] = f"{e.numerator}/{e.denominator}"
        return report


def explore_states(
    t: Term, strategy: Strategy, state_cap: int = DEFAULT_STATE_CAP
) -> ChainAnalysis:
    """Breadth-first closure of t under the strategy's supports.

    Raises StateCapExceeded when more than state_cap distinct non-absorbing
    alpha-classes are discovered, so non-closure is an explicit result
    rather than a hang.
    """
    if state_cap < 1:
        raise ValueError("state_cap must be >= 1")
    origin = canonicalize(t)
    if is_normal_form(t):
        return ChainAnalysis(origin, t, strategy.name, (), {origin: t}, {})
    states: list[CanonicalTerm] = [origin]
    reps: dict[CanonicalTerm, Term] = {origin: t}
    rows: dict[CanonicalTerm, tuple] = {}
    frontier = 0
    while frontier < len(states):
        c = states[frontier]
        frontier += 1
        dist = strategy.distribution(reps[c])
        assert dist is not None  # only non-normal states are enqueued
        row: dict = {}
        for c2, p in dist.items():
            rep2 = dist.rep(c2)
            if is_normal_form(rep2):
                row[TRM] = row.get(TRM, Fraction(0)) + p
            else:
                if c2 not in reps:
                    if len(states) >= state_cap:
                        raise StateCapExceeded(len(states) + 1, state_cap)
                    reps[c2] = rep2
                    states.append(c2)
                row[c2] = row.get(c2, Fraction(0)) + p
        rows[c] = tuple(row.items())
    return ChainAnalysis(origin, t, strategy.name, tuple(states), reps, rows)


def _solve_linear(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination; raises SingularSystem on a zero pivot."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"no pivot in column {col}")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
        for r in range(col + 1, n):
            if a[r][col] == 0:
                continue
            factor = a[r][col] / a[col][col]
            for k in range(col, n + 1):
                a[r][k] -= factor * a[col][k]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = a[r][n]
        for k in range(r + 1, n):
            acc -= a[r][k] * x[k]
        x[r] = acc / a[r][r]
    return x


def _toposort_rows(states: tuple, rows: dict) -> Optional[list]:
    """States in topological order of the non-absorbing edges, or None when
    the transition graph has a cycle."""
    indegree = {c: 0 for c in states}
    for c in states:
        for target, _ in rows[c]:
            if target != TRM:
                indegree[target] += 1
    queue = [c for c in states if indegree[c] == 0]
    out = []
    while queue:
        c = queue.pop()
        out.append(c)
        for target, _ in rows[c]:
            if target != TRM:
                indegree[target] -= 1
                if indegree[target] == 0:
                    queue.append(target)
    return out if len(out) == len(states) else None


def _solve_rows(
    states: tuple, rows: dict, origin: CanonicalTerm
) -> tuple[Fraction, Optional[Fraction]]:
    """Absorption probability at TRM from origin and, when it is 1, the
    exact expected absorption time (None otherwise)."""
    if not states:
        return Fraction(1), Fraction(0)  # the origin itself is normal

    # Acyclic chains (every strongly normalizing start term) solve by plain
    # back-substitution: each maximal path ends in TRM, so absorption is
    # sure and the expected time is 1 + the mean over successors.
    topo = _toposort_rows(states, rows)
    if topo is not None:
        expected: dict[CanonicalTerm, Fraction] = {}
        for c in reversed(topo):
            acc = Fraction(1)
            for target, p in rows[c]:
                if target != TRM:
                    acc += p * expected[target]
            expected[c] = acc
        return Fraction(1), expected[origin]

    # states that can reach TRM at all (fixpoint over the row graph)
    can_reach: set = set()
    changed = True
    while changed:
        changed = False
        for c in states:
            if c in can_reach:
                continue
            for target, _ in rows[c]:
                if target == TRM or target in can_reach:
                    can_reach.add(c)
                    changed = True
                    break
    if origin not in can_reach:
        return Fraction(0), None

    # absorption probabilities on the can-reach set; everything else is 0
    order = [c for c in states if c in can_reach]
    pos = {c: i for i, c in enumerate(order)}
    n = len(order)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    rhs = [Fraction(0)] * n
    for i, c in enumerate(order):
        matrix[i][i] = Fraction(1)
        for target, p in rows[c]:
            if target == TRM:
                rhs[i] += p
            elif target in pos:
                matrix[i][pos[target]] -= p
    h = _solve_linear(matrix, rhs)
    termination = h[pos[origin]]
    if termination != 1:
        return termination, None

    # expected absorption time on the sure-absorption subsystem; from a
    # state with absorption probability 1 every successor has it too
    sure = [c for i, c in enumerate(order) if h[i] == 1]
    spos = {c: i for i, c in enumerate(sure)}
    m = len(sure)
    matrix2 = [[Fraction(0)] * m for _ in range(m)]
    rhs2 = [Fraction(1)] * m
    for i, c in enumerate(sure):
        matrix2[i][i] = Fraction(1)
        for target, p in rows[c]:
            if target == TRM:
                continue
            if target not in spos:
                raise SingularSystem("sure-absorption subsystem is not closed")
            matrix2[i][spos[target]] -= p
    k = _solve_linear(matrix2, rhs2)
    return termination, k[spos[origin]]


def solve_expected_length(chain: ChainAnalysis) -> ChainAnalysis:
    """Solve the absorbing chain exactly.

    termination_prob is the probability of absorption in TRM from the
    origin; expected_length is the exact expected number of steps when that
    probability is 1 and None (infinite) otherwise.
    """
    termination, expected = _solve_rows(chain.states, chain.rows, chain.origin)
    return replace(
        chain, solved=True, termination_prob=termination, expected_length=expected
    )


def analyze(
    t: Term, strategy: Strategy, state_cap: int = DEFAULT_STATE_CAP
) -> ChainAnalysis:
    """explore_states followed by solve_expected_length."""
    return solve_expected_length(explore_states(t, strategy, state_cap))


def chain_derivation_lengths(chain: ChainAnalysis, horizon: int) -> dict[int, Fraction]:
    """Absorption-time distribution of the chain up to the horizon.

    Pushes the origin's unit mass through the chain rows and records the
    mass entering TRM at each step; agrees entry-wise with the trace-side
    derivation_length_dist over the shared horizon.  Zero entries omitted.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    out: dict[int, Fraction] = {}
    if not chain.states:  # origin already normal
        out[0] = Fraction(1)
        return out
    current: dict[CanonicalTerm, Fraction] = {chain.origin: Fraction(1)}
    for step in range(1, horizon + 1):
        absorbed = Fraction(0)
        nxt: dict[CanonicalTerm, Fraction] = {}
        for c, m in current.items():
            for target, p in chain.rows[c]:
                if target == TRM:
                    absorbed += m * p
                else:
                    nxt[target] = nxt.get(target, Fraction(0)) + m * p
        if absorbed:
            out[step] = absorbed
        current = nxt
        if not current:
            break
    return out


# ---------------------------------------------------------------------------
# epsilon grids


def grid_expected_lengths(
    t: Term, grid, state_cap: int = DEFAULT_STATE_CAP
) -> dict[Fraction, tuple[Fraction, Optional[Fraction]]]:
    """(termination probability, expected length) of the LO/RI mixture for
    every eps in the grid.

    The LO/RI successor skeleton is explored once and reweighted per eps;
    the values agree exactly with analyze(t, Strategy.peps(eps)) for each
    grid point (extra states reachable only under other eps values cannot
    influence the origin's hitting quantities).
    """
    from .strategies import step_lo, step_ri

    origin = canonicalize(t)
    if is_normal_form(t):
        return {Fraction(e): (Fraction(1), Fraction(0)) for e in grid}
    states: list[CanonicalTerm] = [origin]
    reps: dict[CanonicalTerm, Term] = {origin: t}
    succ: dict[CanonicalTerm, tuple] = {}  # c -> ((lo_target, ri_target))
    frontier = 0
    while frontier < len(states):
        c = states[frontier]
        frontier += 1
        rep = reps[c]
        targets = []
        lo = step_lo(rep)
        ri = step_ri(rep)
        assert lo is not None and ri is not None
        for u in (lo, ri):
            if is_normal_form(u):
                targets.append(TRM)
            else:
                cu = canonicalize(u)
                if cu not in reps:
                    if len(states) >= state_cap:
                        raise StateCapExceeded(len(states) + 1, state_cap)
                    reps[cu] = u
                    states.append(cu)
                targets.append(cu)
        succ[c] = tuple(targets)

    out = {}
    for e in grid:
        eps = Fraction(e)
        rows = {}
        for c in states:
            lo_t, ri_t = succ[c]
            row: dict = {}
            if eps > 0:
                row[lo_t] = row.get(lo_t, Fraction(0)) + eps
            if eps < 1:
                row[ri_t] = row.get(ri_t, Fraction(0)) + (1 - eps)
            rows[c] = tuple(row.items())
        out[eps] = _solve_rows(tuple(states), rows, origin)
    return out


# ---------------------------------------------------------------------------
# the expectation bound


@dataclass(frozen=True)
class FosterReport:
    """Comparison of the solved expected length against N_LO/eps."""

    term: Term
    eps: Fraction
    status: str  # "holds" | "violated" | "inconclusive"
    reason: str
    n_lo: Optional[int] = None
    bound: Optional[Fraction] = None
    expected_length: Optional[Fraction] = None
    termination_prob: Optional[Fraction] = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"


def check_foster(
    t: Term,
    eps,
    fuel: int = 10_000,
    state_cap: int = DEFAULT_STATE_CAP,
) -> FosterReport:
    """Check exact expected length <= N_LO/eps for one term and one eps."""
    from .strategies import InvalidEpsilon

    eps = Fraction(eps)
    if eps == 0:
        raise InvalidEpsilon("the bound requires eps > 0")
    count = n_steps(t, "lo", fuel)
    if not count.finite:
        return FosterReport(t, eps, "inconclusive", f"LO did not finish in {fuel} steps")
    bound = Fraction(count.steps) / eps
    try:
        chain = analyze(t, Strategy.peps(eps), state_cap)
    except StateCapExceeded as exc:
        return FosterReport(
            t, eps, "inconclusive", f"state cap hit ({exc.discovered} states)",
            n_lo=count.steps, bound=bound,
        )
    assert chain.termination_prob is not None
    if chain.expected_length is None:
        return FosterReport(
            t, eps, "violated", "termination probability below 1",
            n_lo=count.steps, bound=bound,
            termination_prob=chain.termination_prob,
        )
    status = "holds" if chain.expected_length <= bound else "violated"
    reason = (
        "equality" if chain.expected_length == bound else
        f"{chain.expected_length} <= {bound}" if status == "holds" else
        f"{chain.expected_length} > {bound}"
    )
    return FosterReport(
        t, eps, status, reason,
        n_lo=count.steps, bound=bound,
        expected_length=chain.expected_length,
        termination_prob=chain.termination_prob,
    )
