"""Gaussian channel: outer-bound pentagons, regime conditions and regime maps.

Conventions
-----------
Standard-form channel (unit powers, unit noise)::

    Y1 = h11 X1 + h1c Xc + h12 X2 + Z1
    Y2 = h22 X2 + h2c Xc + h21 X1 + Z2

with proper complex Gaussian inputs and ``Xc = beta1 X1 + beta2 X2``,
``|beta1|^2 + |beta2|^2 = 1``.  Rates use ``C(s) = log(1 + s)`` in the
configured log base (bits unless changed with :func:`ifccr.model.set_log_base`).

Both regime conditions are maximizations of a quadratic form in the relay
split.  For fixed moduli ``|beta1|, |beta2|`` the phases enter only through
``Re(beta * b)`` terms, which are maximized by aligning against ``b``, so the
searches below run over the moduli alone (a 1-D problem on the sphere).
"""
from __future__ import annotations

import cmath
import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .geometry import Frontier, frontier
from .model import (
    BetaSplit,
    ChannelError,
    GaussianChannel,
    Pentagon,
    RawGaussianChannel,
    Regime,
    RegimeLabel,
    RegionFamily,
    get_log_base,
    swap_roles,
)

DEFAULT_TOL = 1e-9
DEFAULT_GRID = 64
DEFAULT_XTOL = 1e-10
SPHERE_TOL = 1e-12


def capacity_fn(s):
    """``log(1 + s)`` in the configured base.  Accepts scalars or arrays."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise ChannelError("NEGATIVE_SNR", f"SNR must be >= 0, got {s!r}")
    out = np.log1p(arr) / math.log(get_log_base())
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# standard form
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Rotations:
    """Phase rotations taking a raw channel to standard form.

    Raw inputs are ``X~1 = sqrt(P1) e^{j theta1} X1`` (likewise X2) and
    ``X~c = sqrt(Pc) Xc``; standard outputs are ``Yk = e^{j rho_k} Y~k / sigma_k``.
    """

    theta1: float
    theta2: float
    rho1: float
    rho2: float


def standard_rotations(raw: RawGaussianChannel) -> Rotations:
    a = cmath.phase
    return Rotations(
        theta1=a(raw.h1c) - a(raw.h11),
        theta2=a(raw.h2c) - a(raw.h22),
        rho1=-a(raw.h1c),
        rho2=-a(raw.h2c),
    )


def standard_form(raw: RawGaussianChannel) -> GaussianChannel:
    rot = standard_rotations(raw)
    s1, s2 = math.sqrt(raw.noise1), math.sqrt(raw.noise2)
    in1 = math.sqrt(raw.p1) * cmath.exp(1j * rot.theta1)
    in2 = math.sqrt(raw.p2) * cmath.exp(1j * rot.theta2)
    inc = math.sqrt(raw.pc)
    out1 = cmath.exp(1j * rot.rho1) / s1
    out2 = cmath.exp(1j * rot.rho2) / s2
    return GaussianChannel(
        h11=abs(raw.h11 * in1 * out1),
        h12=raw.h12 * in2 * out1,
        h1c=abs(raw.h1c * inc * out1),
        h21=raw.h21 * in1 * out2,
        h22=abs(raw.h22 * in2 * out2),
        h2c=abs(raw.h2c * inc * out2),
    )


def standard_beta(raw: RawGaussianChannel, beta: BetaSplit) -> BetaSplit:
    """Relay split of the raw channel (on power-normalized raw inputs) in standard coordinates."""
    rot = standard_rotations(raw)
    return BetaSplit(beta.beta1 * cmath.exp(1j * rot.theta1), beta.beta2 * cmath.exp(1j * rot.theta2))


# ----------------------------------------------------------------------------
# log-det oracle
# ----------------------------------------------------------------------------

_VARS = ("X1", "X2", "Xc", "Y1", "Y2")
_EXPR = re.compile(r"^\s*I\(\s*([^;|()]+);([^;|()]+)(?:\|([^;|()]*))?\)\s*$")


def parse_expression(expression: str) -> tuple:
    """``"I(Y1;X1,Xc|X2)"`` -> (("Y1",), ("X1", "Xc"), ("X2",))."""
    m = _EXPR.match(expression or "")
    if not m:
        raise ChannelError("UNKNOWN_EXPRESSION", f"cannot parse {expression!r}")
    parts = []
    for grp in m.groups():
        names = tuple(n.strip() for n in (grp or "").split(",") if n.strip())
        if any(n not in _VARS for n in names):
            raise ChannelError("UNKNOWN_EXPRESSION", f"unknown variable in {expression!r}")
        parts.append(names)
    left, right, given = parts
    if not left or not right or not set(left) <= {"Y1", "Y2"}:
        raise ChannelError("UNKNOWN_EXPRESSION", f"left side must be channel outputs in {expression!r}")
    if len(set(left + right + given)) != len(left + right + given):
        raise ChannelError("UNKNOWN_EXPRESSION", f"overlapping variable sets in {expression!r}")
    return left, right, given


def _source_matrix(H, powers, noise, beta1, beta2) -> np.ndarray:
    # rows X1, X2, Xc, Y1, Y2 as linear maps of iid CN(0,1) sources (S1, S2, N1, N2)
    p1, p2, pc = (math.sqrt(p) for p in powers)
    x = np.array(
        [[p1, 0, 0, 0], [0, p2, 0, 0], [pc * beta1, pc * beta2, 0, 0]], dtype=complex
    )
    y = H @ x
    y[0, 2] = math.sqrt(noise[0])
    y[1, 3] = math.sqrt(noise[1])
    return np.vstack([x, y])


def _residual(rows: np.ndarray, given: np.ndarray) -> np.ndarray:
    if given.shape[0] == 0:
        return rows
    _, sv, vh = np.linalg.svd(given)
    rank = int(np.sum(sv > 1e-10 * sv[0])) if sv.size and sv[0] > 0 else 0
    v = vh[:rank]
    return rows - (rows @ v.conj().T) @ v


def _logdet_cond(M: np.ndarray, left, given) -> float:
    idx = [_VARS.index(n) for n in left]
    gidx = [_VARS.index(n) for n in given]
    r = _residual(M[idx], M[gidx])
    sign, ld = np.linalg.slogdet(r @ r.conj().T)
    return float(ld)


def gaussian_mi(M: np.ndarray, expression: str) -> float:
    """Conditional mutual information of jointly Gaussian variables given by source rows ``M``."""
    left, right, given = parse_expression(expression)
    nats = _logdet_cond(M, left, given) - _logdet_cond(M, left, given + right)
    return max(nats, 0.0) / math.log(get_log_base())


def gaussian_mi_oracle(ch, beta: BetaSplit, expression: str) -> float:
    """Evaluate a mutual information by log-determinants of covariance blocks.

    For a :class:`RawGaussianChannel` the split applies to power-normalized raw
    inputs and the raw powers and noise variances are used as given.
    """
    if not isinstance(beta, BetaSplit):
        beta = BetaSplit(*beta)
    if isinstance(ch, RawGaussianChannel):
        M = _source_matrix(
            ch.gain_matrix(), (ch.p1, ch.p2, ch.pc), (ch.noise1, ch.noise2), beta.beta1, beta.beta2
        )
    else:
        M = _source_matrix(ch.gain_matrix(), (1.0, 1.0, 1.0), (1.0, 1.0), beta.beta1, beta.beta2)
    return gaussian_mi(M, expression)


TH4_EXPRESSIONS = ("I(Y1;X1,Xc|X2)", "I(Y2;X2,Xc|X1)", "I(Y1;X1,X2,Xc)")


# ----------------------------------------------------------------------------
# outer-bound pentagons
# ----------------------------------------------------------------------------

def _th4_bounds(ch: GaussianChannel, b1, b2):
    a = np.abs(ch.h11 + ch.h1c * b1) ** 2
    b = np.abs(ch.h22 + ch.h2c * b2) ** 2
    s = np.abs(ch.h12 + ch.h1c * b2) ** 2
    return capacity_fn(a), capacity_fn(b), capacity_fn(a + s)


def th4_pentagon(ch: GaussianChannel, beta: BetaSplit) -> Pentagon:
    if not isinstance(beta, BetaSplit):
        beta = BetaSplit(*beta)
    if not beta.on_sphere(SPHERE_TOL):
        raise ChannelError("INVALID_BETA", f"|beta1|^2 + |beta2|^2 = {beta.power!r}, need 1")
    r1, r2, s = _th4_bounds(ch, beta.beta1, beta.beta2)
    return Pentagon(r1, r2, s)


@dataclass(frozen=True)
class BetaGrid:
    """Samples of ``beta1 = sin(t)``, ``beta2 = cos(t) e^{j phi}`` with ``t`` in [0, pi/2].

    The ``t`` samples are the two endpoints followed by dyadic midpoints in
    van der Corput order, so a denser grid always contains a sparser one and
    the sampled region can only grow with ``n_t``.
    """

    n_t: int = 2048
    n_phi: int = 64

    def __post_init__(self):
        if self.n_t < 1 or self.n_phi < 1:
            raise ChannelError("EMPTY_GRID", f"grid sizes must be >= 1, got {self.n_t}, {self.n_phi}")


def _radical_inverse(k: int) -> float:
    out, f = 0.0, 0.5
    while k:
        out += f * (k & 1)
        k >>= 1
        f *= 0.5
    return out


def t_samples(n: int) -> np.ndarray:
    """First ``n`` points of the nested split-angle sequence, sorted."""
    if n == 1:
        return np.zeros(1)
    frac = [0.0, 1.0] + [_radical_inverse(k) for k in range(1, n - 1)]
    return np.sort(np.array(frac)) * (math.pi / 2)


def _phase_samples(ch: GaussianChannel, grid: BetaGrid) -> np.ndarray:
    if ch.h12.imag == 0.0 and ch.h12.real >= 0.0:
        return np.zeros(1)
    phis = np.linspace(0.0, 2 * math.pi, grid.n_phi, endpoint=False)
    return np.unique(np.append(phis, cmath.phase(ch.h12) % (2 * math.pi)))


def th4_region(ch: GaussianChannel, grid: BetaGrid | int = BetaGrid()) -> RegionFamily:
    """Pentagons over a grid of the relay split.

    ``beta1`` stays real nonnegative: it enters only ``|h11 + h1c beta1|`` with
    real nonnegative gains, so any other phase gives a smaller pentagon.  The
    phase of ``beta2`` is swept only when ``h12`` is not real nonnegative.
    """
    if isinstance(grid, int):
        grid = BetaGrid(n_t=grid)
    ts = t_samples(grid.n_t)
    phis = _phase_samples(ch, grid)
    tt, pp = np.meshgrid(ts, phis, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    b1 = np.sin(tt).astype(complex)
    b2 = np.cos(tt) * np.exp(1j * pp)
    r1, r2, s = _th4_bounds(ch, b1, b2)
    pentagons = tuple(Pentagon(*v) for v in zip(r1.tolist(), r2.tolist(), s.tolist()))
    params = tuple(zip(tt.tolist(), [0.0] * tt.size, pp.tolist()))
    return RegionFamily(pentagons, params)


def th4_frontier(ch: GaussianChannel, grid: BetaGrid | int = BetaGrid()) -> Frontier:
    return frontier(th4_region(ch, grid))


# ----------------------------------------------------------------------------
# regime conditions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionCheck:
    holds: bool
    margin: float
    worst_beta: BetaSplit
    boundary: bool = False


def _unit(z):
    """e^{-j angle(z)} with the convention angle(0) = 0."""
    # via the angle rather than conj(z) / |z|, which overflows for subnormal z
    return np.exp(-1j * np.angle(np.asarray(z, dtype=complex)))


def _maximize(a, b, c, d, lo, hi, n_grid, xtol):
    fmax, tmax = _backend.maximize_trig(a, b, c, d, lo, hi, n_grid, xtol)
    if not (np.all(np.isfinite(fmax)) and np.all(np.isfinite(tmax))):
        raise ChannelError("OPTIMIZER_FAILURE", "non-finite optimum")
    return fmax, tmax


def strong_margins(h12, h1c, h22, h2c, n_grid=DEFAULT_GRID, xtol=DEFAULT_XTOL):
    """Batched max over ``|beta2| <= 1`` of ``|h22 + h2c beta2|^2 - |h12 + h1c beta2|^2``.

    Returns ``(margin, beta2_at_max)``.
    """
    h12 = np.asarray(h12, dtype=complex)
    h1c, h22, h2c = (np.asarray(v, dtype=float) for v in (h1c, h22, h2c))
    h12, h1c, h22, h2c = np.broadcast_arrays(h12, h1c, h22, h2c)
    quad = (h2c**2 - h1c**2).ravel()
    lin = h22 * h2c - h1c * np.conj(h12)
    const = (h22**2 - np.abs(h12) ** 2).ravel()
    zero = np.zeros_like(quad)
    # |beta2| = sin(t), t in [0, pi/2]
    fmax, t = _maximize(quad, zero, 2 * np.abs(lin).ravel(), zero, 0.0, math.pi / 2, n_grid, xtol)
    beta2 = np.sin(t) * _unit(lin.ravel())
    shape = h12.shape
    return (fmax + const).reshape(shape), beta2.reshape(shape)


def very_strong_margins(h11, h12, h1c, h21, h22, h2c, n_grid=DEFAULT_GRID, xtol=DEFAULT_XTOL):
    """Batched max over the sphere of the received-power difference of both sum-rate terms.

    Objective: ``|h11 + h1c b1|^2 + |h12 + h1c b2|^2 - |h21 + h2c b1|^2 - |h22 + h2c b2|^2``.
    Returns ``(margin, beta1_at_max, beta2_at_max)``.
    """
    h12, h21 = (np.asarray(v, dtype=complex) for v in (h12, h21))
    h11, h1c, h22, h2c = (np.asarray(v, dtype=float) for v in (h11, h1c, h22, h2c))
    h11, h12, h1c, h21, h22, h2c = np.broadcast_arrays(h11, h12, h1c, h21, h22, h2c)
    quad = (h1c**2 - h2c**2).ravel()
    lin1 = h11 * h1c - h2c * np.conj(h21)
    lin2 = h1c * np.conj(h12) - h22 * h2c
    const = (h11**2 + np.abs(h12) ** 2 - np.abs(h21) ** 2 - h22**2).ravel()
    # |beta1| = sin(t), |beta2| = cos(t)
    fmax, t = _maximize(
        quad, quad, 2 * np.abs(lin1).ravel(), 2 * np.abs(lin2).ravel(), 0.0, math.pi / 2, n_grid, xtol
    )
    shape = h11.shape
    beta1 = (np.sin(t) * _unit(lin1.ravel())).reshape(shape)
    beta2 = (np.cos(t) * _unit(lin2.ravel())).reshape(shape)
    return (fmax + const).reshape(shape), beta1, beta2


def _verdict(margin: float, tol: float) -> tuple:
    return margin <= tol, -tol < margin <= tol


def check_strong(ch: GaussianChannel, tol: float = DEFAULT_TOL, n_grid: int = DEFAULT_GRID) -> ConditionCheck:
    """User 1's strong-interference condition: the relay+X2 signal is received at
    least as well at receiver 1 as at receiver 2 for every relay split."""
    m, b2 = strong_margins(ch.h12, ch.h1c, ch.h22, ch.h2c, n_grid)
    margin = float(m)
    holds, boundary = _verdict(margin, tol)
    return ConditionCheck(holds, margin, BetaSplit(0.0, complex(b2)), boundary)


def check_very_strong(ch: GaussianChannel, tol: float = DEFAULT_TOL, n_grid: int = DEFAULT_GRID) -> ConditionCheck:
    m, b1, b2 = very_strong_margins(ch.h11, ch.h12, ch.h1c, ch.h21, ch.h22, ch.h2c, n_grid)
    margin = float(m)
    holds, boundary = _verdict(margin, tol)
    return ConditionCheck(holds, margin, BetaSplit(complex(b1), complex(b2)), boundary)


@dataclass(frozen=True)
class SymmetricMargins:
    strong_margin: float
    very_strong_margin: float


def symmetric_margins(ch: GaussianChannel, tol: float = 1e-12) -> SymmetricMargins:
    """Closed-form margins for equal relay gains and real nonnegative cross gains.

    Both are maxima over real relay splits of either sign, in the same power
    units as :func:`check_strong` and :func:`check_very_strong`.  The strong
    margin is ``(h22 - h12)(h22 + h12) + 2 hc |h22 - h12|``: it is <= 0 iff
    ``h12 >= h22`` and ``2 hc <= h12 + h22`` (or ``h12 == h22``), so the
    relay strength matters once it exceeds the mean of the two gains.
    """
    if abs(ch.h1c - ch.h2c) > tol:
        raise ChannelError("NOT_SYMMETRIC", f"h1c = {ch.h1c} differs from h2c = {ch.h2c}")
    for name in ("h12", "h21"):
        z = getattr(ch, name)
        if abs(z.imag) > tol or z.real < 0.0:
            raise ChannelError("NOT_SYMMETRIC", f"{name} = {z} is not real nonnegative")
    h11, h22, hc = ch.h11, ch.h22, ch.h1c
    h12, h21 = ch.h12.real, ch.h21.real
    strong = (h22 - h12) * (h22 + h12) + 2 * hc * abs(h22 - h12)
    very = 2 * hc * math.hypot(h12 - h22, h11 - h21) + h11**2 + h12**2 - h22**2 - h21**2
    return SymmetricMargins(strong, very)


def _label(sm: float, vm: float, tol: float) -> Regime:
    if sm <= tol:
        return Regime.VERY_STRONG if vm <= tol else Regime.STRONG
    return Regime.NEITHER


def classify(ch: GaussianChannel, user: int = 1, tol: float = DEFAULT_TOL) -> RegimeLabel:
    if user not in (1, 2):
        raise ChannelError("BAD_USER", f"user must be 1 or 2, got {user}")
    target = ch if user == 1 else swap_roles(ch)
    s = check_strong(target, tol)
    v = check_very_strong(target, tol)
    return RegimeLabel(
        _label(s.margin, v.margin, tol), s.margin, v.margin, user, s.boundary, v.boundary
    )


# ----------------------------------------------------------------------------
# regime map
# ----------------------------------------------------------------------------

UNIT_MAP_CHANNEL = GaussianChannel(h11=1.0, h12=0.0, h1c=1.0, h21=0.0, h22=1.0, h2c=1.0)


@dataclass(frozen=True)
class RegimeMapSpec:
    """Sweep of the real cross gains; ``h12``/``h21`` ranges are ``(lo, hi, count)``."""

    base: GaussianChannel = UNIT_MAP_CHANNEL
    h12: tuple = (0.0, 10.0, 200)
    h21: tuple = (0.0, 10.0, 200)
    user: int = 1

    def __post_init__(self):
        for name in ("h12", "h21"):
            rng = getattr(self, name)
            try:
                lo, hi, n = float(rng[0]), float(rng[1]), rng[2]
            except (TypeError, ValueError, IndexError) as exc:
                raise ChannelError("BAD_RANGE", f"{name} range must be (lo, hi, count)") from exc
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise ChannelError("BAD_RANGE", f"{name} range needs lo < hi, got {lo}:{hi}")
            if int(n) != n or n < 2:
                raise ChannelError("BAD_RANGE", f"{name} count must be an integer >= 2, got {n}")
            object.__setattr__(self, name, (lo, hi, int(n)))
        if self.user not in (1, 2):
            raise ChannelError("BAD_USER", f"user must be 1 or 2, got {self.user}")

    def axes(self) -> tuple:
        return (np.linspace(*self.h12), np.linspace(*self.h21))


@dataclass(frozen=True, eq=False)
class RegimeMap:
    """Labels and margins on the ``(h12, h21)`` grid; arrays indexed ``[i12, i21]``."""

    h12: np.ndarray
    h21: np.ndarray
    labels: np.ndarray
    strong_margin: np.ndarray
    very_strong_margin: np.ndarray
    user: int
    tol: float = field(default=DEFAULT_TOL)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("h12,h21,label,strongMargin,veryStrongMargin\n")
        for i, a in enumerate(self.h12):
            for j, b in enumerate(self.h21):
                buf.write(
                    f"{a:.12g},{b:.12g},{self.labels[i, j]},"
                    f"{self.strong_margin[i, j]:.12g},{self.very_strong_margin[i, j]:.12g}\n"
                )
        return buf.getvalue()


def _cell_margins(args):
    h11, h12, h1c, h21, h22, h2c = args
    sm, _ = strong_margins(h12, h1c, h22, h2c)
    vm, _, _ = very_strong_margins(h11, h12, h1c, h21, h22, h2c)
    return sm, vm


def regime_map(spec: RegimeMapSpec, tol: float = DEFAULT_TOL, jobs: int = 1) -> RegimeMap:
    """Classify every cell of the sweep.  Cells are independent; ``jobs > 1``
    splits them across processes and reassembles in grid order."""
    a12, a21 = spec.axes()
    g12, g21 = np.meshgrid(a12, a21, indexing="ij")
    b = spec.base
    n = g12.size
    cols = [
        np.full(n, b.h11), g12.ravel(), np.full(n, b.h1c),
        g21.ravel(), np.full(n, b.h22), np.full(n, b.h2c),
    ]
    if spec.user == 2:
        h11, h12, h1c, h21, h22, h2c = cols
        cols = [h22, h21, h2c, h12, h11, h1c]
    if jobs <= 1:
        sm, vm = _cell_margins(cols)
    else:
        bounds = np.linspace(0, n, jobs + 1).astype(int)
        chunks = [[c[lo:hi] for c in cols] for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_cell_margins, chunks))
        sm = np.concatenate([p[0] for p in parts])
        vm = np.concatenate([p[1] for p in parts])
    strong_ok = sm <= tol
    very_ok = vm <= tol
    labels = np.where(
        strong_ok,
        np.where(very_ok, Regime.VERY_STRONG.value, Regime.STRONG.value),
        Regime.NEITHER.value,
    )
    shape = g12.shape
    return RegimeMap(a12, a21, labels.reshape(shape), sm.reshape(shape), vm.reshape(shape), spec.user, tol)
