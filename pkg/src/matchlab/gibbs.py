"""Exact Gibbs distributions over matchings and matching-polynomial analysis.

The Gibbs distribution at fugacity ``lam`` puts mass proportional to
``lam**|M|`` on each matching M.  Everything here is exact: probabilities are
rationals, the matching polynomial has integer coefficients, and roots are
isolated by Sturm sequences over rational arithmetic before being refined by
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from matchlab.graphs import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    Graph,
    Pinning,
    enumerate_matchings,
    matched_vertices,
)

DEFAULT_MEMO_CAP = 2_000_000


def as_fraction(lam) -> Fraction:
    """Exact rational value of a fugacity given as int, float, Fraction or str."""
    f = Fraction(lam)
    if f <= 0:
        raise ValueError(f"fugacity must be positive, got {lam}")
    return f


# -- matching polynomial -------------------------------------------------

@dataclass(frozen=True)
class MatchingPolynomial:
    """Generating polynomial of matchings: coeffs[k] counts the k-matchings."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, lam) -> Fraction:
        x = Fraction(lam)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "MatchingPolynomial":
        if len(self.coeffs) == 1:
            return MatchingPolynomial((0,))
        return MatchingPolynomial(
            tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))


def matching_polynomial(g: Graph, memo_cap: int = DEFAULT_MEMO_CAP) -> MatchingPolynomial:
    """Integer coefficient vector (m_0, m_1, ..., m_nu) of the graph.

    Deletion recursion on the lowest live edge id e = (u, v):
    every matching either omits e, or contains it and avoids all edges
    meeting u or v.  Subproblems are memoized on their live edge-id set.
    """
    all_edges = g.edge_ids
    adjacent = {e: frozenset(g.adjacent_edges(e)) for e in all_edges}
    memo: dict[frozenset[int], list[int]] = {}

    def rec(live: frozenset[int]) -> list[int]:
        if not live:
            return [1]
        got = memo.get(live)
        if got is not None:
            return got
        if len(memo) > memo_cap:
            raise EnumerationCapError(
                f"matching polynomial memo exceeded cap {memo_cap}")
        e = min(live)
        without = rec(live - {e})
        using = rec(live - adjacent[e] - {e})
        out = list(without)
        for k, c in enumerate(using):
            if k + 1 < len(out):
                out[k + 1] += c
            else:
                out.append(c)
        memo[live] = out
        return out

    return MatchingPolynomial(tuple(rec(frozenset(all_edges))))


# -- exact distributions -------------------------------------------------

@dataclass(frozen=True)
class MatchingDistribution:
    """Exact Gibbs distribution, possibly conditioned on a pinning.

    ``support`` is in canonical order (lexicographic on sorted edge ids) and
    ``probs`` are exact rationals summing to one.
    """

    support: tuple[frozenset[int], ...]
    probs: tuple[Fraction, ...]
    lam: Fraction

    def __len__(self) -> int:
        return len(self.support)

    def prob_of(self, matching: Iterable[int]) -> Fraction:
        key = frozenset(matching)
        for M, p in zip(self.support, self.probs):
            if M == key:
                return p
        return Fraction(0)

    def as_dict(self) -> dict[frozenset[int], Fraction]:
        return dict(zip(self.support, self.probs))

    def mean_size(self) -> Fraction:
        return sum((Fraction(len(M)) * p for M, p in zip(self.support, self.probs)),
                   Fraction(0))


@dataclass(frozen=True)
class VertexDistribution:
    """Push-forward of a matching distribution to matched-vertex sets."""

    support: tuple[frozenset[int], ...]
    probs: tuple[Fraction, ...]
    lam: Fraction

    def __len__(self) -> int:
        return len(self.support)

    def prob_of(self, vertex_set: Iterable[int]) -> Fraction:
        key = frozenset(vertex_set)
        for U, p in zip(self.support, self.probs):
            if U == key:
                return p
        return Fraction(0)

    def as_dict(self) -> dict[frozenset[int], Fraction]:
        return dict(zip(self.support, self.probs))


def exact_gibbs(
    g: Graph,
    lam,
    pinning: Pinning | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> MatchingDistribution:
    """The exact Gibbs distribution of ``g`` at fugacity ``lam``.

    With a pinning the distribution is conditional on it; an unsatisfiable
    pinning raises ValueError since conditioning on a null event is undefined.
    """
    lam_f = as_fraction(lam)
    support = enumerate_matchings(g, pinning, cap=cap)
    if not support:
        raise ValueError("pinning has empty support, cannot condition on it")
    weights = [lam_f ** len(M) for M in support]
    z = sum(weights)
    probs = tuple(w / z for w in weights)
    return MatchingDistribution(tuple(support), probs, lam_f)


def vertex_gibbs_exact(
    g: Graph,
    lam,
    vertex_set: Iterable[int] | None = None,
    pinning: Pinning | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> VertexDistribution:
    """Distribution of V(M) intersected with ``vertex_set`` under the Gibbs law."""
    vs = frozenset(g.vertices if vertex_set is None else vertex_set)
    base = exact_gibbs(g, lam, pinning, cap=cap)
    acc: dict[frozenset[int], Fraction] = {}
    for M, p in zip(base.support, base.probs):
        key = matched_vertices(g, M) & vs
        acc[key] = acc.get(key, Fraction(0)) + p
    keys = sorted(acc, key=lambda U: tuple(sorted(U)))
    return VertexDistribution(tuple(keys), tuple(acc[k] for k in keys), base.lam)


def marginal_probability(g: Graph, lam, event: Pinning,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """Probability of the pinning event under the unconditioned Gibbs law."""
    event.validate(g)
    dist = exact_gibbs(g, lam, cap=cap)
    total = Fraction(0)
    for M, p in zip(dist.support, dist.probs):
        if event.satisfied_by(g, M):
            total += p
    return total


def expected_size(g: Graph, lam, memo_cap: int = DEFAULT_MEMO_CAP) -> Fraction:
    """Expected matching size: lam * m'(lam) / m(lam), exactly."""
    lam_f = as_fraction(lam)
    poly = matching_polynomial(g, memo_cap=memo_cap)
    num = poly.derivative().evaluate(lam_f)
    den = poly.evaluate(lam_f)
    return lam_f * num / den


def expected_size_via_roots(roots: Sequence[float], lam) -> float:
    """Expected matching size from the root decomposition: sum of lam/(lam-r)."""
    lam_f = float(lam)
    return sum(lam_f / (lam_f - r) for r in roots)


# -- Sturm-sequence root isolation ---------------------------------------

def _strip(cs: list) -> list:
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return cs


def _eval_fr(cs: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _deriv(cs: Sequence) -> list:
    return _strip([k * c for k, c in enumerate(cs)][1:] or [0])


def _primitive(cs: Sequence[Fraction]) -> list[int]:
    """Scale a rational polynomial by a positive constant to primitive ints."""
    fr = [Fraction(c) for c in cs]
    den = math.lcm(*(c.denominator for c in fr))
    ints = [int(c * den) for c in fr]
    g = math.gcd(*(abs(c) for c in ints)) or 1
    return _strip([c // g for c in ints])


def _polydiv(a: Sequence, b: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    num = [Fraction(c) for c in a]
    den = [Fraction(c) for c in b]
    if den == [Fraction(0)]:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    while len(num) >= len(den) and _strip(list(num)) != [Fraction(0)]:
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        if factor == 0:
            num.pop()
            continue
        quot[shift] += factor
        for i, c in enumerate(den):
            num[i + shift] -= factor * c
        num.pop()
    return _strip(quot), _strip(num or [Fraction(0)])


def _poly_gcd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    x, y = [Fraction(c) for c in a], [Fraction(c) for c in b]
    while _strip(list(y)) != [Fraction(0)]:
        _, r = _polydiv(x, y)
        x, y = y, r
    out = _primitive(x)
    if out[-1] < 0:
        out = [-c for c in out]
    return out


def _sturm_chain(cs: Sequence[int]) -> list[list[int]]:
    chain = [_strip(list(cs)), _deriv(cs)]
    while _strip(list(chain[-1])) != [0]:
        _, r = _polydiv(chain[-2], chain[-1])
        if _strip(list(r)) == [Fraction(0)]:
            break
        chain.append([-c for c in _primitive(r)])
    return chain


def _variations(chain: list[list[int]], x: Fraction) -> int:
    signs = []
    for cs in chain:
        v = _eval_fr(cs, x)
        if v > 0:
            signs.append(1)
        elif v < 0:
            signs.append(-1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_in(chain, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots in the half-open interval (a, b]."""
    return _variations(chain, a) - _variations(chain, b)


def _isolate_roots(cs: list[int], lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    chain = _sturm_chain(cs)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(lo, hi, _count_in(chain, lo, hi))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        kl = _count_in(chain, a, mid)
        stack.append((a, mid, kl))
        stack.append((mid, b, k - kl))
    out.sort()
    return out


def _refine_root(cs: list[int], a: Fraction, b: Fraction) -> Fraction:
    """Bisect a sign-changing isolating interval (a, b] down to ~1e-15 width."""
    fa = _eval_fr(cs, a)
    fb = _eval_fr(cs, b)
    if fb == 0:
        return b
    if fa == 0:
        # the root sits at the open endpoint of (a, b]; nudge inside
        width = b - a
        probe = a + width / (1 << 20)
        fa = _eval_fr(cs, probe)
        if fa == 0:
            return probe
        a = probe
    assert (fa > 0) != (fb > 0), "interval does not isolate a sign change"
    target = Fraction(1, 10 ** 15)
    while b - a > target * max(1, abs(a)):
        mid = (a + b) / 2
        fm = _eval_fr(cs, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return (a + b) / 2


@dataclass(frozen=True)
class RootSet:
    """All roots of a matching polynomial, ascending, with multiplicity."""

    roots: tuple[float, ...]
    multiplicities: tuple[int, ...]
    residual: float
    all_real_negative: bool

    @property
    def flattened(self) -> tuple[float, ...]:
        out: list[float] = []
        for r, k in zip(self.roots, self.multiplicities):
            out.extend([r] * k)
        return tuple(out)


def _roots_with_mult(cs: list[int]) -> list[tuple[Fraction, int]]:
    cs = _strip(list(cs))
    if len(cs) <= 1:
        return []
    g = _poly_gcd(cs, _deriv(cs))
    sf = _primitive(_polydiv(cs, g)[0])
    bound = Fraction(1) + max(abs(Fraction(c, sf[-1])) for c in sf)
    intervals = _isolate_roots(sf, -bound, Fraction(0))
    mine = [(_refine_root(sf, a, b), (a, b)) for a, b in intervals]
    inner = _roots_with_mult(g) if len(g) > 1 else []
    out = []
    for r, (a, b) in mine:
        mult = 1
        for rr, kk in inner:
            if a < rr <= b:
                mult += kk
        out.append((r, mult))
    return out


def polynomial_roots(poly: MatchingPolynomial | Sequence[int]) -> RootSet:
    """Isolate and refine every root of a matching generating polynomial.

    Heilmann-Lieb theory promises the roots are real and negative; the
    returned ``all_real_negative`` flag reports whether the located real
    negative roots in fact account for the whole degree.
    """
    cs = list(poly.coeffs if isinstance(poly, MatchingPolynomial) else poly)
    cs = _strip([int(c) for c in cs])
    degree = len(cs) - 1
    if degree == 0:
        return RootSet((), (), 0.0, True)
    found = _roots_with_mult(cs)
    found.sort()
    roots = tuple(float(r) for r, _ in found)
    mults = tuple(k for _, k in found)
    complete = sum(mults) == degree and all(r < 0 for r in roots)
    residual = 0.0
    for r in roots:
        x = Fraction(r)
        num = abs(_eval_fr(cs, x))
        den = sum(abs(c) * abs(x) ** k for k, c in enumerate(cs))
        residual = max(residual, float(num / den))
    return RootSet(roots, mults, residual, complete)


# -- spectrum structure checks -------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    """Structural facts about a root spectrum against degree-based bounds."""

    degree: int
    max_degree: int
    epsilon: float
    all_real_negative: bool
    min_abs_root: float | None
    min_abs_bound: float | None      # 1 / (4 (max_degree - 1)); None when max_degree < 2
    min_abs_ok: bool
    threshold: float                 # (4 max_degree) ** (1 / epsilon)
    fraction_within: float
    required_fraction: float
    fraction_ok: bool

    @property
    def ok(self) -> bool:
        return self.all_real_negative and self.min_abs_ok and self.fraction_ok


def root_spectrum_check(
    poly: MatchingPolynomial | Sequence[int],
    delta_max: int,
    epsilon: float,
) -> SpectrumReport:
    """Check a spectrum against the two degree-driven root bounds.

    Small roots: every root has absolute value at least 1/(4(delta_max - 1))
    when delta_max >= 2 (the clause is skipped for delta_max <= 1, where the
    denominator degenerates).  Large roots: at most an epsilon fraction may
    exceed (4 delta_max) ** (1/epsilon) in absolute value.
    """
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    rs = polynomial_roots(poly)
    flat = rs.flattened
    nu = len(flat)
    threshold = (4.0 * delta_max) ** (1.0 / epsilon)
    if nu == 0:
        return SpectrumReport(0, delta_max, epsilon, rs.all_real_negative,
                              None, None, True, threshold, 1.0, 1.0 - epsilon, True)
    min_abs = min(abs(r) for r in flat)
    if delta_max >= 2:
        bound = 1.0 / (4.0 * (delta_max - 1))
        # exact comparisons carry a whisker of slack for the float refinement
        min_ok = min_abs >= bound * (1 - 1e-9)
    else:
        bound = None
        min_ok = True
    within = sum(1 for r in flat if abs(r) <= threshold * (1 + 1e-9))
    frac = within / nu
    required = 1.0 - epsilon
    return SpectrumReport(nu, delta_max, epsilon, rs.all_real_negative,
                          min_abs, bound, min_ok, threshold, frac, required,
                          frac >= required - 1e-12)
