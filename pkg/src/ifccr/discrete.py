"""Exact information measures on finite-alphabet channels and the bounds built from them.

All quantities are computed from dense joint pmfs by summing entropies of
marginals, with 0 log 0 = 0.  Results are in the configured log base.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .geometry import DEFAULT_DIRECTIONS, includes
from .model import (
    PROB_TOL,
    ChannelError,
    DiscreteChannel,
    Pentagon,
    ProductInputDistribution,
    Th1Distribution,
    get_log_base,
)

INPUT_NAMES = ("X1", "X2", "Xc", "Y1", "Y2")
TH1_NAMES = ("Q", "U1", "U2", "X1", "X2", "Xc", "Y1", "Y2")


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense pmf with one named axis per random variable."""

    p: np.ndarray
    names: tuple

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        names = tuple(self.names)
        if p.ndim != len(names) or len(set(names)) != len(names):
            raise ChannelError("SHAPE_MISMATCH", f"{p.ndim} axes but names {names}")
        if np.any(p < 0.0):
            raise ChannelError("NEGATIVE_PROBABILITY", "joint pmf has negative entries")
        total = float(p.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise ChannelError("NOT_NORMALIZED", f"joint pmf sums to {total!r}", deviation=abs(total - 1.0))
        p.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "names", names)

    def axes(self, names: Iterable[str]) -> tuple:
        out = []
        for n in names:
            if n not in self.names:
                raise ChannelError("VARIABLE_NOT_PRESENT", f"{n!r} not in {self.names}", variable=n)
            out.append(self.names.index(n))
        return tuple(out)

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        keep = self.axes(names)
        drop = tuple(i for i in range(self.p.ndim) if i not in keep)
        m = self.p.sum(axis=drop) if drop else self.p
        # reorder kept axes to the requested order
        kept_sorted = sorted(keep)
        return np.transpose(m, [kept_sorted.index(k) for k in keep]) if len(keep) > 1 else m

    def entropy(self, names: Sequence[str]) -> float:
        """Joint entropy of ``names`` in the configured base."""
        names = tuple(names)
        if not names:
            return 0.0
        return _backend.entropy_nats(self.marginal(names)) / math.log(get_log_base())


def _names(v) -> tuple:
    if v is None:
        return ()
    if isinstance(v, str):
        return tuple(n.strip() for n in v.split(",") if n.strip())
    return tuple(v)


def mutual_information(j: JointPmf, left, right, given=()) -> float:
    """``I(left; right | given)``.  Sets may be name tuples or comma-separated strings."""
    left, right, given = _names(left), _names(right), _names(given)
    j.axes(left + right + given)
    if len(set(left + right + given)) != len(left) + len(right) + len(given):
        raise ChannelError("OVERLAPPING_SETS", f"{left} / {right} / {given} overlap")
    if not left or not right:
        return 0.0
    v = (
        j.entropy(left + given)
        + j.entropy(right + given)
        - j.entropy(left + right + given)
        - j.entropy(given)
    )
    return max(v, 0.0)


_TERM = re.compile(r"^([^;|]+);([^;|]+)(?:\|(.*))?$")


def info(j: JointPmf, expr: str) -> float:
    """Shorthand: ``info(j, "Y1;X1,Xc|X2")``."""
    m = _TERM.match(expr.replace(" ", ""))
    if not m:
        raise ChannelError("UNKNOWN_EXPRESSION", f"cannot parse {expr!r}")
    return mutual_information(j, m.group(1), m.group(2), m.group(3))


# ----------------------------------------------------------------------------
# joints
# ----------------------------------------------------------------------------

def _check_sizes(ch: DiscreteChannel, sizes: tuple) -> None:
    if tuple(ch.sizes[:3]) != tuple(sizes):
        raise ChannelError(
            "SHAPE_MISMATCH", f"channel inputs {ch.sizes[:3]} vs distribution {tuple(sizes)}"
        )


def joint_from(ch: DiscreteChannel, d: ProductInputDistribution) -> JointPmf:
    """Joint pmf over (X1, X2, Xc, Y1, Y2)."""
    _check_sizes(ch, d.sizes)
    p = np.einsum("a,b,cab,deabc->abcde", d.p1, d.p2, d.pc, ch.t)
    return JointPmf(p, INPUT_NAMES)


def th1_joint(ch: DiscreteChannel, d: Th1Distribution) -> JointPmf:
    """Joint pmf over (Q, U1, U2, X1, X2, Xc, Y1, Y2)."""
    _check_sizes(ch, d.input_sizes)
    p1 = np.stack([x.p1 for x in d.inputs])
    p2 = np.stack([x.p2 for x in d.inputs])
    pc = np.stack([x.pc for x in d.inputs])
    p = np.einsum("q,qa,qb,qcab,uvabcq,yzabc->quvabcyz", d.q, p1, p2, pc, d.u, ch.t)
    return JointPmf(p, TH1_NAMES)


# ----------------------------------------------------------------------------
# regions
# ----------------------------------------------------------------------------

def th2_region_at(ch: DiscreteChannel, d: ProductInputDistribution) -> Pentagon:
    """Strong-interference outer region for one input law."""
    j = joint_from(ch, d)
    return Pentagon(info(j, "Y1;X1,Xc|X2"), info(j, "Y2;X2,Xc|X1"), info(j, "Y1;X1,X2,Xc"))


def inner_region_at(ch: DiscreteChannel, d: ProductInputDistribution) -> Pentagon:
    """Both receivers decode both messages; relay input generated from (X1, X2)."""
    j = joint_from(ch, d)
    return Pentagon(
        info(j, "Y1;X1|X2"), info(j, "Y2;X2|X1"), info(j, "Y1;X1,X2"), info(j, "Y2;X1,X2")
    )


@dataclass(frozen=True)
class Th1Bounds:
    """The nine single-letter bounds of the auxiliary-variable outer bound.

    ``r1_direct``  I(Y1;X1,Xc|X2,Q)          ``r1_aux``  I(Y1;U2,X1|Q)
    ``r2_direct``  I(Y2;X2,Xc|X1,Q)          ``r2_aux``  I(Y2;U1,X2|Q)
    ``sum_aux1``   I(Y1;X1,Xc|U1,X2,Q) + I(Y2;U1,X2|Q)
    ``sum_aux2``   I(Y2;X2,Xc|U2,X1,Q) + I(Y1;U2,X1|Q)
    ``sum_cross``  I(Y1;U2|Q) + I(Y2;U1|Q)
    ``sum_genie1`` I(Y1;X1,X2,Xc|Q) + I(Y2;X2,Xc|Y1,X1,Q)
    ``sum_genie2`` I(Y2;X1,X2,Xc|Q) + I(Y1;X1,Xc|Y2,X2,Q)

    ``sum_cross_printed`` is the variant I(Y1;U1|Q) + I(Y2;U2|Q); it is
    reported for comparison and does not enter ``pentagon``.
    """

    r1_direct: float
    r1_aux: float
    r2_direct: float
    r2_aux: float
    sum_aux1: float
    sum_aux2: float
    sum_cross: float
    sum_genie1: float
    sum_genie2: float
    sum_cross_printed: float

    def values(self) -> tuple:
        return (
            self.r1_direct, self.r1_aux, self.r2_direct, self.r2_aux, self.sum_aux1,
            self.sum_aux2, self.sum_cross, self.sum_genie1, self.sum_genie2,
        )

    @property
    def pentagon(self) -> Pentagon:
        return Pentagon(
            min(self.r1_direct, self.r1_aux),
            min(self.r2_direct, self.r2_aux),
            min(self.sum_aux1, self.sum_aux2, self.sum_cross, self.sum_genie1, self.sum_genie2),
        )


TH1_TERMS = {
    "r1_direct": ("Y1;X1,Xc|X2,Q",),
    "r1_aux": ("Y1;U2,X1|Q",),
    "r2_direct": ("Y2;X2,Xc|X1,Q",),
    "r2_aux": ("Y2;U1,X2|Q",),
    "sum_aux1": ("Y1;X1,Xc|U1,X2,Q", "Y2;U1,X2|Q"),
    "sum_aux2": ("Y2;X2,Xc|U2,X1,Q", "Y1;U2,X1|Q"),
    "sum_cross": ("Y1;U2|Q", "Y2;U1|Q"),
    "sum_genie1": ("Y1;X1,X2,Xc|Q", "Y2;X2,Xc|Y1,X1,Q"),
    "sum_genie2": ("Y2;X1,X2,Xc|Q", "Y1;X1,Xc|Y2,X2,Q"),
    "sum_cross_printed": ("Y1;U1|Q", "Y2;U2|Q"),
}


def th1_bounds_at(ch: DiscreteChannel, d: Th1Distribution) -> Th1Bounds:
    j = th1_joint(ch, d)
    return Th1Bounds(**{k: sum(info(j, e) for e in terms) for k, terms in TH1_TERMS.items()})


# ----------------------------------------------------------------------------
# condition sampling
# ----------------------------------------------------------------------------

def strong_margin_at(ch: DiscreteChannel, d: ProductInputDistribution) -> float:
    """I(Y1;X2,Xc|X1) - I(Y2;X2,Xc|X1); nonnegative when receiver 1 sees user 2 better."""
    j = joint_from(ch, d)
    return info(j, "Y1;X2,Xc|X1") - info(j, "Y2;X2,Xc|X1")


def very_strong_margin_at(ch: DiscreteChannel, d: ProductInputDistribution) -> float:
    j = joint_from(ch, d)
    return info(j, "Y2;X1,X2,Xc") - info(j, "Y1;X1,X2,Xc")


def sample_product_distribution(
    rng: np.random.Generator, sizes: Sequence[int], alpha: float = 1.0, deterministic_relay: bool = False
) -> ProductInputDistribution:
    n1, n2, nc = sizes
    p1 = rng.dirichlet(np.full(n1, alpha))
    p2 = rng.dirichlet(np.full(n2, alpha))
    if deterministic_relay:
        f = rng.integers(0, nc, size=(n1, n2))
        return ProductInputDistribution.with_relay_function(p1, p2, nc, lambda a, b: int(f[a, b]))
    pc = rng.dirichlet(np.full(nc, alpha), size=(n1, n2)).transpose(2, 0, 1)
    return ProductInputDistribution(p1, p2, pc)


def corner_distributions(sizes: Sequence[int]) -> list:
    """Uniform and point-mass source laws crossed with uniform / deterministic relay laws."""
    n1, n2, nc = sizes
    sources = []
    for a in (np.full(n1, 1 / n1), np.eye(n1)[0]):
        for b in (np.full(n2, 1 / n2), np.eye(n2)[0]):
            sources.append((a, b))
    out = []
    for a, b in sources:
        out.append(ProductInputDistribution(a, b, np.full((nc, n1, n2), 1 / nc)))
        out.append(ProductInputDistribution.with_relay_function(a, b, nc, lambda x, y: (x + y) % nc))
        out.append(ProductInputDistribution.with_relay_function(a, b, nc, lambda x, y: 0))
    return out


@dataclass(frozen=True)
class ConditionReport:
    """Minimum sampled margins of the two regime conditions.

    Nonnegative minima are evidence, not proof, that the conditions hold for
    every product input law.
    """

    strong_min: float
    very_strong_min: float
    strong_witness: ProductInputDistribution
    very_strong_witness: ProductInputDistribution
    n_samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "margins": {"strong": self.strong_min, "veryStrong": self.very_strong_min},
            "witnesses": {
                "strong": self.strong_witness.to_json(),
                "veryStrong": self.very_strong_witness.to_json(),
            },
            "seed": self.seed,
            "nSamples": self.n_samples,
        }


def check_conditions_sampled(
    ch: DiscreteChannel, n_samples: int, seed: int, alpha: float = 1.0
) -> ConditionReport:
    if n_samples < 1:
        raise ChannelError("BAD_SAMPLES", "n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    sizes = ch.sizes[:3]
    dists = corner_distributions(sizes)
    dists += [sample_product_distribution(rng, sizes, alpha) for _ in range(n_samples)]
    best_s = best_v = math.inf
    wit_s = wit_v = dists[0]
    for d in dists:
        j = joint_from(ch, d)
        s = info(j, "Y1;X2,Xc|X1") - info(j, "Y2;X2,Xc|X1")
        v = info(j, "Y2;X1,X2,Xc") - info(j, "Y1;X1,X2,Xc")
        if s < best_s:
            best_s, wit_s = s, d
        if v < best_v:
            best_v, wit_v = v, d
    return ConditionReport(best_s, best_v, wit_s, wit_v, len(dists), seed)


@dataclass(frozen=True)
class GenieTerm:
    margin: float
    coincidence_gap: float


def remark3_margin(ch: DiscreteChannel, d: ProductInputDistribution) -> GenieTerm:
    """``I(Y2;X2,Xc|X1,Y1)`` and the gap between the genie sum bound and the
    strong-interference sum bound for the same input law."""
    j = joint_from(ch, d)
    margin = info(j, "Y2;X2,Xc|X1,Y1")
    genie = th1_bounds_at(ch, Th1Distribution.trivial(d)).sum_genie1
    gap = abs(genie - th2_region_at(ch, d).sum_max)
    return GenieTerm(margin, gap)


# ----------------------------------------------------------------------------
# fixtures
# ----------------------------------------------------------------------------

FIXTURES = ("VERY_STRONG", "STRONG_ONLY")


def degraded_fixture(kind: str, n1: int = 2, n2: int = 2, nc: int = 2) -> DiscreteChannel:
    """Noiseless channels satisfying the regime conditions for every input law.

    ``VERY_STRONG``: Y1 = (X2, Xc), Y2 = (X1, X2, Xc).
    ``STRONG_ONLY``: Y1 = (X1, X2, Xc), Y2 = (X1, X2).
    """
    if min(n1, n2, nc) < 2:
        raise ChannelError("SHAPE_MISMATCH", "fixture alphabets must have size >= 2")
    if kind == "VERY_STRONG":
        return DiscreteChannel.deterministic(
            (n1, n2, nc, n2 * nc, n1 * n2 * nc),
            lambda a, b, c: (b * nc + c, (a * n2 + b) * nc + c),
        )
    if kind == "STRONG_ONLY":
        return DiscreteChannel.deterministic(
            (n1, n2, nc, n1 * n2 * nc, n1 * n2),
            lambda a, b, c: ((a * n2 + b) * nc + c, a * n2 + b),
        )
    raise ChannelError("UNKNOWN_KIND", f"unknown fixture {kind!r}; expected one of {FIXTURES}")


# ----------------------------------------------------------------------------
# sum identity over sequences
# ----------------------------------------------------------------------------

def sequence_names(n: int) -> tuple:
    return tuple(f"Y1_{i}" for i in range(1, n + 1)) + tuple(f"Y2_{i}" for i in range(1, n + 1))


def sequence_pmf(p) -> JointPmf:
    """Wrap a pmf whose axes are (Y1_1..Y1_N, Y2_1..Y2_N)."""
    p = np.asarray(p, dtype=float)
    if p.ndim % 2 or p.ndim == 0:
        raise ChannelError("BAD_SEQUENCE_SHAPE", f"need 2N axes, got {p.ndim}")
    return JointPmf(p, sequence_names(p.ndim // 2))


def csiszar_identity_residual(j: JointPmf) -> float:
    """|sum_i I(Y1_i; Y2_{i+1..N} | Y1_{1..i-1}) - sum_i I(Y2_i; Y1_{1..i-1} | Y2_{i+1..N})|."""
    if len(j.names) % 2 or set(j.names) != set(sequence_names(len(j.names) // 2)):
        raise ChannelError("BAD_SEQUENCE_SHAPE", f"expected names Y1_i, Y2_i; got {j.names}")
    n = len(j.names) // 2
    y1 = [f"Y1_{i}" for i in range(1, n + 1)]
    y2 = [f"Y2_{i}" for i in range(1, n + 1)]
    forward = sum(mutual_information(j, [y1[i]], y2[i + 1:], y1[:i]) for i in range(n))
    backward = sum(mutual_information(j, [y2[i]], y1[:i], y2[i + 1:]) for i in range(n))
    return abs(forward - backward)


# ----------------------------------------------------------------------------
# verification driver
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyResult:
    name: str
    asserted: bool
    passed: bool
    worst_gap: float
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "asserted": self.asserted,
            "passed": self.passed,
            "worstGap": self.worst_gap,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerifyReport:
    conditions: ConditionReport
    properties: tuple
    tol: float

    @property
    def ok(self) -> bool:
        return all(p.passed for p in self.properties if p.asserted)

    def to_json(self) -> dict:
        out = self.conditions.to_json()
        out["tol"] = self.tol
        out["conditionsHold"] = {
            "strong": self.conditions.strong_min >= -self.tol,
            "veryStrong": self.conditions.very_strong_min >= -self.tol,
        }
        out["properties"] = [p.to_json() for p in self.properties]
        out["ok"] = self.ok
        return out


def verify_channel(
    ch: DiscreteChannel,
    n_samples: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    n_directions: int = DEFAULT_DIRECTIONS,
    extra: Sequence[ProductInputDistribution] = (),
) -> VerifyReport:
    """Sample the regime conditions, then check the region relations they imply.

    Inner-inside-outer is always asserted.  The vanishing genie term is asserted
    only when the strong condition held on every sample, and inner = outer
    (for deterministic relay laws) only when both conditions held.
    """
    cond = check_conditions_sampled(ch, n_samples, seed)
    strong_ok = cond.strong_min >= -tol
    very_ok = cond.very_strong_min >= -tol

    rng = np.random.default_rng([seed, 1])
    sizes = ch.sizes[:3]
    n_check = max(1, min(n_samples, 100))
    general = list(extra) + [sample_product_distribution(rng, sizes) for _ in range(n_check)]
    determ = [sample_product_distribution(rng, sizes, deterministic_relay=True) for _ in range(n_check)]

    def worst_inclusion(pairs):
        worst = -math.inf
        for a, b in pairs:
            worst = max(worst, includes(a, b, n_directions, tol).worst_gap)
        return worst

    sub_gap = worst_inclusion((inner_region_at(ch, d), th2_region_at(ch, d)) for d in general + determ)
    eq_gap = worst_inclusion(
        pair
        for d in determ
        for inner, outer in [(inner_region_at(ch, d), th2_region_at(ch, d))]
        for pair in ((inner, outer), (outer, inner))
    )
    r3 = [remark3_margin(ch, d) for d in general]
    r3_gap = max(max(r.margin, r.coincidence_gap) for r in r3)

    props = (
        PropertyResult("inner_subset_outer", True, sub_gap <= tol, sub_gap),
        PropertyResult(
            "genie_term_vanishes", strong_ok, r3_gap <= tol, r3_gap,
            "" if strong_ok else "strong condition failed on a sample; not asserted",
        ),
        PropertyResult(
            "inner_equals_outer", strong_ok and very_ok, eq_gap <= tol, eq_gap,
            "" if strong_ok and very_ok else "regime conditions failed on a sample; not asserted",
        ),
    )
    return VerifyReport(cond, props, tol)

