"""Channel and distribution types for the interference channel with a cognitive relay.

Everything here is immutable once constructed; constructors validate and raise
:class:`ChannelError` with a machine-readable ``code``.

Variable naming follows the usual convention: sources 1 and 2 send ``X1`` and
``X2``, the relay sends ``Xc``, and receivers observe ``Y1`` and ``Y2``.
"""
from __future__ import annotations

import contextlib
import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

PROB_TOL = 1e-12
MAX_ALPHABET = 8

_log_base = 2.0


class ChannelError(ValueError):
    """Validation failure.  ``code`` is one of the upper-case tags used across the package."""

    def __init__(self, code: str, message: str, **details):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.details = details


# ----------------------------------------------------------------------------
# rate units
# ----------------------------------------------------------------------------

def _parse_base(base) -> float:
    if base in ("e", "nats"):
        return math.e
    if base in ("2", "bits"):
        return 2.0
    base = float(base)
    if not (base > 1.0 and math.isfinite(base)):
        raise ChannelError("BAD_BASE", f"log base must be > 1, got {base!r}")
    return base


def get_log_base() -> float:
    return _log_base


def set_log_base(base) -> None:
    """Switch the unit of every returned rate: 2 (bits, default) or ``"e"`` (nats)."""
    global _log_base
    _log_base = _parse_base(base)


@contextlib.contextmanager
def log_base(base) -> Iterator[None]:
    old = _log_base
    set_log_base(base)
    try:
        yield
    finally:
        set_log_base(old)


# ----------------------------------------------------------------------------
# Gaussian channels
# ----------------------------------------------------------------------------

def _finite(name: str, value) -> None:
    if not cmath_isfinite(value):
        raise ChannelError("NONFINITE", f"gain {name} is not finite: {value!r}", field=name)


def cmath_isfinite(z) -> bool:
    z = complex(z)
    return math.isfinite(z.real) and math.isfinite(z.imag)


def _as_magnitude(name: str, value) -> float:
    z = complex(value)
    _finite(name, z)
    if z.imag != 0.0:
        raise ChannelError("NOT_REAL", f"{name} must be a real magnitude, got {value!r}", field=name)
    if z.real < 0.0:
        raise ChannelError("NEGATIVE_MAGNITUDE", f"{name} = {z.real} < 0", field=name)
    return float(z.real)


@dataclass(frozen=True)
class GaussianChannel:
    """Standard-form Gaussian channel: unit input powers, unit noise.

    ``h11, h22, h1c, h2c`` are nonnegative magnitudes; the cross gains
    ``h12`` (X2 into Y1) and ``h21`` (X1 into Y2) may be complex.
    """

    h11: float = 1.0
    h12: complex = 1.0
    h1c: float = 1.0
    h21: complex = 1.0
    h22: float = 1.0
    h2c: float = 1.0

    def __post_init__(self):
        for name in ("h11", "h22", "h1c", "h2c"):
            object.__setattr__(self, name, _as_magnitude(name, getattr(self, name)))
        for name in ("h12", "h21"):
            z = complex(getattr(self, name))
            _finite(name, z)
            object.__setattr__(self, name, z)

    def gains(self) -> tuple:
        return (self.h11, self.h12, self.h1c, self.h21, self.h22, self.h2c)

    def gain_matrix(self) -> np.ndarray:
        """2x3 matrix mapping (X1, X2, Xc) to (Y1, Y2) without noise."""
        return np.array(
            [[self.h11, self.h12, self.h1c], [self.h21, self.h22, self.h2c]], dtype=complex
        )


def validate_gaussian(ch: GaussianChannel) -> GaussianChannel:
    """Re-run the constructor checks (useful after ``dataclasses.replace`` or unpickling)."""
    GaussianChannel(*ch.gains())
    return ch


@dataclass(frozen=True)
class RawGaussianChannel:
    """General Gaussian channel with arbitrary complex gains, powers and noise variances."""

    h11: complex
    h12: complex
    h1c: complex
    h21: complex
    h22: complex
    h2c: complex
    p1: float = 1.0
    p2: float = 1.0
    pc: float = 1.0
    noise1: float = 1.0
    noise2: float = 1.0

    def __post_init__(self):
        for name in ("h11", "h12", "h1c", "h21", "h22", "h2c"):
            z = complex(getattr(self, name))
            _finite(name, z)
            object.__setattr__(self, name, z)
        for name in ("p1", "p2", "pc", "noise1", "noise2"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise ChannelError("NONPOSITIVE", f"{name} must be finite and > 0, got {v}", field=name)
            object.__setattr__(self, name, v)

    def gain_matrix(self) -> np.ndarray:
        return np.array(
            [[self.h11, self.h12, self.h1c], [self.h21, self.h22, self.h2c]], dtype=complex
        )


@dataclass(frozen=True)
class BetaSplit:
    """Relay amplitude split: ``Xc = beta1 * X1 + beta2 * X2``."""

    beta1: complex
    beta2: complex

    def __post_init__(self):
        b1, b2 = complex(self.beta1), complex(self.beta2)
        if not (cmath_isfinite(b1) and cmath_isfinite(b2)):
            raise ChannelError("INVALID_BETA", "beta must be finite")
        if abs(b1) ** 2 + abs(b2) ** 2 > 1.0 + PROB_TOL:
            raise ChannelError("INVALID_BETA", f"|beta1|^2 + |beta2|^2 = {abs(b1)**2 + abs(b2)**2} > 1")
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "beta2", b2)

    @classmethod
    def from_angles(cls, t: float, phi1: float = 0.0, phi2: float = 0.0) -> "BetaSplit":
        return cls(math.sin(t) * complex(math.cos(phi1), math.sin(phi1)),
                   math.cos(t) * complex(math.cos(phi2), math.sin(phi2)))

    @property
    def power(self) -> float:
        return abs(self.beta1) ** 2 + abs(self.beta2) ** 2

    def on_sphere(self, tol: float = PROB_TOL) -> bool:
        return abs(self.power - 1.0) <= tol


# ----------------------------------------------------------------------------
# discrete channels and distributions
# ----------------------------------------------------------------------------

def _frozen_array(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _check_conditional(t: np.ndarray, n_out_axes: int, what: str) -> None:
    """Leading ``n_out_axes`` axes are outcomes; every remaining index must be a pmf."""
    if not np.all(np.isfinite(t)):
        raise ChannelError("NONFINITE", f"{what} has non-finite entries")
    if np.any(t < 0.0):
        idx = tuple(int(i) for i in np.argwhere(t < 0.0)[0])
        raise ChannelError("NEGATIVE_PROBABILITY", f"{what} has negative entry at {idx}", index=idx)
    sums = t.reshape((-1,) + t.shape[n_out_axes:]).sum(axis=0) if t.size else np.zeros(0)
    dev = np.abs(np.asarray(sums) - 1.0)
    if dev.size and dev.max() > PROB_TOL:
        worst = tuple(int(i) for i in np.unravel_index(int(np.argmax(dev)), dev.shape))
        raise ChannelError(
            "NOT_NORMALIZED",
            f"{what} slice {worst} sums to {float(np.asarray(sums)[worst]):.15g} "
            f"(deviation {float(dev.max()):.3g})",
            slice=worst,
            deviation=float(dev.max()),
        )


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Memoryless channel law ``t[y1, y2, x1, x2, xc] = P(y1, y2 | x1, x2, xc)``."""

    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 5:
            raise ChannelError("SHAPE_MISMATCH", f"transition tensor must have 5 axes, got {t.ndim}")
        if min(t.shape) < 1 or max(t.shape) > MAX_ALPHABET:
            raise ChannelError(
                "SHAPE_MISMATCH", f"alphabet sizes {t.shape} outside 1..{MAX_ALPHABET}"
            )
        _check_conditional(t, 2, "transition tensor")
        object.__setattr__(self, "t", _frozen_array(t))

    @classmethod
    def from_flat(cls, sizes: Sequence[int], flat: Sequence[float]) -> "DiscreteChannel":
        """``sizes = (n1, n2, nc, m1, m2)``; ``flat`` is row-major over (y1, y2, x1, x2, xc)."""
        sizes = [int(s) for s in sizes]
        if len(sizes) != 5:
            raise ChannelError("SHAPE_MISMATCH", "sizes must be [n1, n2, nc, m1, m2]")
        n1, n2, nc, m1, m2 = sizes
        flat = np.asarray(flat, dtype=float)
        if flat.size != n1 * n2 * nc * m1 * m2:
            raise ChannelError(
                "SHAPE_MISMATCH", f"expected {n1 * n2 * nc * m1 * m2} entries, got {flat.size}"
            )
        return cls(flat.reshape(m1, m2, n1, n2, nc))

    @classmethod
    def deterministic(cls, sizes: Sequence[int], fn) -> "DiscreteChannel":
        """Noiseless channel; ``fn(x1, x2, xc) -> (y1, y2)``."""
        n1, n2, nc, m1, m2 = (int(s) for s in sizes)
        t = np.zeros((m1, m2, n1, n2, nc))
        for x1 in range(n1):
            for x2 in range(n2):
                for xc in range(nc):
                    y1, y2 = fn(x1, x2, xc)
                    t[y1, y2, x1, x2, xc] = 1.0
        return cls(t)

    @property
    def sizes(self) -> tuple:
        m1, m2, n1, n2, nc = self.t.shape
        return (n1, n2, nc, m1, m2)

    def flat(self) -> list:
        return self.t.ravel().tolist()

    def __eq__(self, other):
        return isinstance(other, DiscreteChannel) and np.array_equal(self.t, other.t)

    __hash__ = None


def validate_discrete(ch) -> DiscreteChannel:
    """Accept a channel, a raw 5-axis tensor, or ``(sizes, flat)``."""
    if isinstance(ch, DiscreteChannel):
        return DiscreteChannel(np.array(ch.t))
    if isinstance(ch, tuple) and len(ch) == 2:
        return DiscreteChannel.from_flat(*ch)
    return DiscreteChannel(ch)


@dataclass(frozen=True, eq=False)
class ProductInputDistribution:
    """``P(x1) P(x2) P(xc | x1, x2)`` with ``pc[xc, x1, x2]``."""

    p1: np.ndarray
    p2: np.ndarray
    pc: np.ndarray

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float)
        p2 = np.asarray(self.p2, dtype=float)
        pc = np.asarray(self.pc, dtype=float)
        if p1.ndim != 1 or p2.ndim != 1 or pc.ndim != 3 or pc.shape[1:] != (p1.size, p2.size):
            raise ChannelError(
                "SHAPE_MISMATCH",
                f"inconsistent shapes p1={p1.shape} p2={p2.shape} pc={pc.shape}",
            )
        _check_conditional(p1, 1, "p1")
        _check_conditional(p2, 1, "p2")
        _check_conditional(pc, 1, "pc")
        object.__setattr__(self, "p1", _frozen_array(p1))
        object.__setattr__(self, "p2", _frozen_array(p2))
        object.__setattr__(self, "pc", _frozen_array(pc))

    @property
    def sizes(self) -> tuple:
        return (self.p1.size, self.p2.size, self.pc.shape[0])

    @classmethod
    def uniform(cls, n1: int, n2: int, nc: int) -> "ProductInputDistribution":
        return cls(np.full(n1, 1 / n1), np.full(n2, 1 / n2), np.full((nc, n1, n2), 1 / nc))

    @classmethod
    def with_relay_function(cls, p1, p2, nc: int, fn) -> "ProductInputDistribution":
        """Relay input is the deterministic ``xc = fn(x1, x2)``."""
        p1, p2 = np.asarray(p1, float), np.asarray(p2, float)
        pc = np.zeros((nc, p1.size, p2.size))
        for x1 in range(p1.size):
            for x2 in range(p2.size):
                pc[fn(x1, x2), x1, x2] = 1.0
        return cls(p1, p2, pc)

    def relay_is_deterministic(self) -> bool:
        return bool(np.all((self.pc == 0.0) | (self.pc == 1.0)))

    def to_json(self) -> dict:
        return {"p1": self.p1.tolist(), "p2": self.p2.tolist(), "pc": self.pc.tolist()}

    def __eq__(self, other):
        return (
            isinstance(other, ProductInputDistribution)
            and np.array_equal(self.p1, other.p1)
            and np.array_equal(self.p2, other.p2)
            and np.array_equal(self.pc, other.pc)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Th1Distribution:
    """Input law for the auxiliary-variable outer bound.

    ``q[q]`` is the time-sharing law, ``inputs[q]`` the product input law given
    ``Q = q``, and ``u[u1, u2, x1, x2, xc, q] = P(u1, u2 | x1, x2, xc, q)``.
    The factorization P_Q P_{X1|Q} P_{X2|Q} P_{Xc|X1,X2,Q} P_{U1,U2|X1,X2,Xc,Q}
    holds by construction.  Auxiliary alphabet sizes are whatever the caller
    declares; nothing is claimed about sufficient cardinalities.
    """

    q: np.ndarray
    inputs: tuple
    u: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        inputs = tuple(self.inputs)
        u = np.asarray(self.u, dtype=float)
        if q.ndim != 1 or len(inputs) != q.size:
            raise ChannelError("FACTORIZATION_VIOLATED", "need exactly one input law per value of Q")
        sizes = {d.sizes for d in inputs}
        if len(sizes) != 1:
            raise ChannelError("FACTORIZATION_VIOLATED", f"input alphabets differ across Q: {sizes}")
        n1, n2, nc = sizes.pop()
        if u.ndim != 6 or u.shape[2:] != (n1, n2, nc, q.size):
            raise ChannelError(
                "FACTORIZATION_VIOLATED",
                f"u must have shape (k1, k2, {n1}, {n2}, {nc}, {q.size}), got {u.shape}",
            )
        _check_conditional(q, 1, "q")
        try:
            _check_conditional(u, 2, "u")
        except ChannelError as exc:
            raise ChannelError("FACTORIZATION_VIOLATED", str(exc)) from exc
        object.__setattr__(self, "q", _frozen_array(q))
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "u", _frozen_array(u))

    @classmethod
    def trivial(cls, d: ProductInputDistribution) -> "Th1Distribution":
        """Singleton Q, U1, U2."""
        n1, n2, nc = d.sizes
        return cls(np.ones(1), (d,), np.ones((1, 1, n1, n2, nc, 1)))

    @property
    def input_sizes(self) -> tuple:
        return self.inputs[0].sizes

    @property
    def aux_sizes(self) -> tuple:
        """(|Q|, |U1|, |U2|)."""
        return (self.q.size, self.u.shape[0], self.u.shape[1])


# ----------------------------------------------------------------------------
# regions and labels
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Pentagon:
    """``{0 <= R1 <= r1_max, 0 <= R2 <= r2_max, R1 + R2 <= min(sum_max, sum_max2)}``."""

    r1_max: float
    r2_max: float
    sum_max: float
    sum_max2: float | None = None

    def __post_init__(self):
        for name in ("r1_max", "r2_max", "sum_max", "sum_max2"):
            v = getattr(self, name)
            if v is None:
                continue
            v = float(v)
            if not (math.isfinite(v) and v >= 0.0):
                raise ChannelError("INVALID_PENTAGON", f"{name} = {v} must be finite and >= 0")
            object.__setattr__(self, name, v)

    @property
    def sum_bound(self) -> float:
        if self.sum_max2 is None:
            return self.sum_max
        return min(self.sum_max, self.sum_max2)

    def as_tuple(self) -> tuple:
        return (self.r1_max, self.r2_max, self.sum_bound)


@dataclass(frozen=True)
class RegionFamily:
    """Pentagons indexed by a parameter grid; compared after convexification."""

    pentagons: tuple
    params: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.pentagons)

    def __iter__(self):
        return iter(self.pentagons)


class Regime(str, enum.Enum):
    NEITHER = "NEITHER"
    STRONG = "STRONG"
    VERY_STRONG = "VERY_STRONG"


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    strong_margin: float
    very_strong_margin: float
    user: int
    strong_boundary: bool = False
    very_strong_boundary: bool = False

    def __post_init__(self):
        if self.user not in (1, 2):
            raise ChannelError("BAD_USER", f"user must be 1 or 2, got {self.user}")

    def to_json(self) -> dict:
        return {
            "regime": self.regime.value,
            "user": self.user,
            "strongMargin": self.strong_margin,
            "veryStrongMargin": self.very_strong_margin,
            "strongBoundary": self.strong_boundary,
            "veryStrongBoundary": self.very_strong_boundary,
        }


# ----------------------------------------------------------------------------
# role swap
# ----------------------------------------------------------------------------

@functools.singledispatch
def swap_roles(ch):
    """Exchange the labels of users 1 and 2 everywhere."""
    raise TypeError(f"cannot swap roles of {type(ch).__name__}")


@swap_roles.register
def _(ch: GaussianChannel) -> GaussianChannel:
    return GaussianChannel(h11=ch.h22, h12=ch.h21, h1c=ch.h2c, h21=ch.h12, h22=ch.h11, h2c=ch.h1c)


@swap_roles.register
def _(ch: RawGaussianChannel) -> RawGaussianChannel:
    return RawGaussianChannel(
        h11=ch.h22, h12=ch.h21, h1c=ch.h2c, h21=ch.h12, h22=ch.h11, h2c=ch.h1c,
        p1=ch.p2, p2=ch.p1, pc=ch.pc, noise1=ch.noise2, noise2=ch.noise1,
    )


@swap_roles.register
def _(ch: DiscreteChannel) -> DiscreteChannel:
    return DiscreteChannel(np.transpose(ch.t, (1, 0, 3, 2, 4)))


@swap_roles.register
def _(d: ProductInputDistribution) -> ProductInputDistribution:
    return ProductInputDistribution(d.p2, d.p1, np.transpose(d.pc, (0, 2, 1)))


# ----------------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------------

_GAUSSIAN_FIELDS = ("h11", "h12", "h1c", "h21", "h22", "h2c")
_RAW_POWER_FIELDS = ("P1", "P2", "Pc", "sigma1_sq", "sigma2_sq")


def _number_from_json(obj: Mapping, name: str):
    if name not in obj:
        raise ChannelError("MISSING_FIELD", f'missing field "{name}"', field=name)
    v = obj[name]
    if isinstance(v, Mapping):
        try:
            return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise ChannelError("BAD_FIELD", f'field "{name}" is not a number', field=name) from exc
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ChannelError("BAD_FIELD", f'field "{name}" is not a number', field=name)
    return v


def _number_to_json(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else {"re": z.real, "im": z.imag}


def channel_from_json(obj: Mapping):
    """Parse the channel schema: ``kind`` is ``gaussian``, ``gaussian_raw`` or ``discrete``."""
    if not isinstance(obj, Mapping):
        raise ChannelError("BAD_FIELD", "channel spec must be a JSON object")
    kind = obj.get("kind")
    if kind == "gaussian":
        return GaussianChannel(**{k: _number_from_json(obj, k) for k in _GAUSSIAN_FIELDS})
    if kind == "gaussian_raw":
        gains = {k: _number_from_json(obj, k) for k in _GAUSSIAN_FIELDS}
        p1, p2, pc, s1, s2 = (_number_from_json(obj, k) for k in _RAW_POWER_FIELDS)
        return RawGaussianChannel(**gains, p1=p1, p2=p2, pc=pc, noise1=s1, noise2=s2)
    if kind == "discrete":
        for name in ("sizes", "t"):
            if name not in obj:
                raise ChannelError("MISSING_FIELD", f'missing field "{name}"', field=name)
        return DiscreteChannel.from_flat(obj["sizes"], obj["t"])
    raise ChannelError("BAD_FIELD", f'unknown channel kind {kind!r}', field="kind")


def channel_to_json(ch) -> dict:
    if isinstance(ch, GaussianChannel):
        return {"kind": "gaussian", **{k: _number_to_json(getattr(ch, k)) for k in _GAUSSIAN_FIELDS}}
    if isinstance(ch, RawGaussianChannel):
        out = {"kind": "gaussian_raw", **{k: _number_to_json(getattr(ch, k)) for k in _GAUSSIAN_FIELDS}}
        out.update(P1=ch.p1, P2=ch.p2, Pc=ch.pc, sigma1_sq=ch.noise1, sigma2_sq=ch.noise2)
        return out
    if isinstance(ch, DiscreteChannel):
        return {"kind": "discrete", "sizes": list(ch.sizes), "t": ch.flat()}
    raise TypeError(f"cannot serialize {type(ch).__name__}")


def distribution_from_json(obj: Mapping) -> ProductInputDistribution:
    for name in ("p1", "p2", "pc"):
        if name not in obj:
            raise ChannelError("MISSING_FIELD", f'missing field "{name}"', field=name)
    try:
        return ProductInputDistribution(obj["p1"], obj["p2"], obj["pc"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ChannelError):
            raise
        raise ChannelError("BAD_FIELD", f"malformed distribution: {exc}") from exc
