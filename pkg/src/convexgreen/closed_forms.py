"""Closed-form extremal functions for the compact factors used in products."""

from dataclasses import dataclass

import numpy as np

from .bodies import TAU_NUM, contains
from .errors import InvalidArgumentError, UnsupportedConfigurationError
from .log_support import MaxAffine, h_of_body

KINDS = ("disc", "interval", "polydisc")


@dataclass(frozen=True)
class CompactFactorSpec:
    """One compact factor: a disc, a real interval, or a polydisc centred at 0."""

    kind: str
    center: complex = 0j
    radius: float = 1.0
    a: float = -1.0
    b: float = 1.0
    radii: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown compact kind {self.kind!r}")
        if self.kind == "disc" and not self.radius > 0:
            raise InvalidArgumentError("disc radius must be positive")
        if self.kind == "interval" and not self.a < self.b:
            raise InvalidArgumentError("interval needs a < b")
        if self.kind == "polydisc":
            radii = tuple(float(r) for r in self.radii)
            if not radii or min(radii) <= 0:
                raise InvalidArgumentError("polydisc radii must be positive and nonempty")
            object.__setattr__(self, "radii", radii)

    @classmethod
    def disc(cls, center=0j, radius=1.0):
        return cls("disc", center=complex(center), radius=float(radius))

    @classmethod
    def interval(cls, a=-1.0, b=1.0):
        return cls("interval", a=float(a), b=float(b))

    @classmethod
    def polydisc(cls, radii):
        return cls("polydisc", radii=tuple(radii))

    @property
    def dim(self):
        return len(self.radii) if self.kind == "polydisc" else 1

    @property
    def is_toric(self):
        """Centred disc or polydisc: extremal functions depend on |z_i| only."""
        return self.kind == "polydisc" or (self.kind == "disc" and self.center == 0)

    def polydisc_radii(self):
        if self.kind == "polydisc":
            return self.radii
        if self.kind == "disc" and self.center == 0:
            return (self.radius,)
        raise UnsupportedConfigurationError(f"{self.kind} factor is not a centred polydisc")

    def to_dict(self):
        if self.kind == "disc":
            return {"kind": "disc", "center": [self.center.real, self.center.imag], "radius": self.radius}
        if self.kind == "interval":
            return {"kind": "interval", "a": self.a, "b": self.b}
        return {"kind": "polydisc", "radii": list(self.radii)}

    @classmethod
    def from_dict(cls, data):
        kind = data.get("kind") if isinstance(data, dict) else None
        try:
            if kind == "disc":
                c = data.get("center", [0.0, 0.0])
                return cls.disc(complex(c[0], c[1]), data["radius"])
            if kind == "interval":
                return cls.interval(data["a"], data["b"])
            if kind == "polydisc":
                return cls.polydisc(data["radii"])
        except (KeyError, TypeError, IndexError):
            raise InvalidArgumentError(f"malformed {kind} spec: {data!r}") from None
        raise InvalidArgumentError(f"unknown compact kind {kind!r}")


@dataclass(frozen=True)
class ProductCompact:
    """K = K_1 x ... x K_r assembled from :class:`CompactFactorSpec` pieces."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise InvalidArgumentError("a product compact needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def total_dim(self):
        return sum(f.dim for f in self.factors)

    @property
    def is_toric(self):
        return all(f.is_toric for f in self.factors)

    def polydisc_radii(self):
        return tuple(r for f in self.factors for r in f.polydisc_radii())

    def to_dict(self):
        return [f.to_dict() for f in self.factors]

    @classmethod
    def from_dict(cls, data):
        if isinstance(data, dict):
            data = [data]
        return cls(tuple(CompactFactorSpec.from_dict(d) for d in data))


def unit_polydisc(n):
    return ProductCompact((CompactFactorSpec.polydisc([1.0] * n),))


def v_disc(center, radius, z):
    """log+ (|z - center| / radius)."""
    if not radius > 0:
        raise InvalidArgumentError("radius must be positive")
    r = np.abs(np.asarray(z, dtype=complex) - center) / radius
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(r), 0.0)


def v_interval(a, b, z):
    """Green function of [a, b] with pole at infinity.

    With w the affine image of z (mapping [a, b] onto [-1, 1]) this is
    ``log|w + sqrt(w^2 - 1)|`` on the branch of modulus >= 1; the two
    branches are reciprocal, so taking the larger modulus avoids the cut.
    """
    if not a < b:
        raise InvalidArgumentError("interval needs a < b")
    w = (2.0 * np.asarray(z, dtype=complex) - (a + b)) / (b - a)
    root = np.sqrt(w * w - 1.0)
    mod = np.maximum(np.abs(w + root), np.abs(w - root))
    on_segment = (w.imag == 0.0) & (np.abs(w.real) <= 1.0)
    return np.where(on_segment, 0.0, np.maximum(np.log(mod), 0.0))


def v_factor(k, z):
    """Extremal function (S = [0, 1]) of a one-dimensional factor."""
    if k.kind == "disc":
        return v_disc(k.center, k.radius, z)
    if k.kind == "interval":
        return v_interval(k.a, k.b, z)
    if k.kind == "polydisc" and k.dim == 1:
        return v_disc(0j, k.radii[0], z)
    raise InvalidArgumentError("v_factor needs a one-dimensional factor")


def v_factor_scaled(k, s, z):
    """s * V_K(z): the extremal function for growth body [0, s]."""
    if s < 0:
        raise InvalidArgumentError("growth scale must be nonnegative")
    if s == 0:
        return np.zeros(np.shape(z))
    return s * v_factor(k, z)


def v_polydisc_body(body, radii):
    """V^S for the polydisc {|z_i| <= r_i} as a max-affine function of Log z.

    Licensed only when the polydisc lies inside {H_S = 0}, i.e. every
    generator g has <g, Log r> <= 0; unit radii always qualify and give H_S.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (body.dim,) or np.any(radii <= 0):
        raise InvalidArgumentError("need one positive radius per body coordinate")
    if not contains(body, np.zeros(body.dim)):
        raise InvalidArgumentError("the growth body must contain the origin")
    h = h_of_body(body)
    shift = h.slopes @ np.log(radii)
    if np.any(shift > TAU_NUM):
        raise UnsupportedConfigurationError(
            "polydisc is not contained in {H_S = 0}; no closed form is claimed here"
        )
    if np.all(radii == 1.0):
        return h
    return MaxAffine(h.slopes, -shift)


def factor_growth(body):
    """Return s when ``body`` is the one-dimensional segment [0, s], else None."""
    if body.dim != 1:
        return None
    g = body.generators[:, 0]
    if g.min() > TAU_NUM:
        return None
    return float(g.max())


def v_block(body, compact, z_block):
    """V^{S_j}_{K_j}(z_j) at complex points ``z_block`` of shape (k, n_j).

    Supported: centred polydisc factors with any S_j (max-affine closed
    form) and one-dimensional factors with S_j = [0, s].
    """
    z_block = np.atleast_2d(np.asarray(z_block, dtype=complex))
    if compact.total_dim != body.dim:
        raise InvalidArgumentError("compact and growth body dimensions differ")
    s = factor_growth(body)
    if s is not None and len(compact.factors) == 1:
        return v_factor_scaled(compact.factors[0], s, z_block[:, 0])
    if compact.is_toric:
        f = v_polydisc_body(body, compact.polydisc_radii())
        with np.errstate(divide="ignore"):
            return f(np.log(np.abs(z_block)))
    raise UnsupportedConfigurationError(
        "closed form needs a centred polydisc factor or a 1-D factor with S = [0, s]"
    )

