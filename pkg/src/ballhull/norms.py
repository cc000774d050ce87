"""Norms on R^n with closed-form dual norms, plus unit-sphere direction sampling.

The four supported families (euclidean, l1, linf, lp with p > 1) all have
conjugate-exponent duals, so dual norms are evaluated in closed form rather
than by maximizing the pairing.  The pairing itself is always the Euclidean
scalar product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

#: Default absolute tolerance for floating comparisons in this package.
DEFAULT_TOL = 1e-9

#: Maximum unit-norm defect allowed for stored directions.
UNIT_TOL = 1e-12

_KINDS = ("euclidean", "l1", "linf", "lp")

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class NormSpec:
    """A norm on R^n: one of ``euclidean``, ``l1``, ``linf``, or ``lp`` (p > 1)."""

    kind: str
    dim: int
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}; expected one of {_KINDS}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.kind == "lp":
            if self.p is None or not math.isfinite(self.p) or not self.p > 1.0:
                raise ValueError("lp norm requires a finite exponent p > 1")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise ValueError(f"p is only meaningful for kind='lp', not {self.kind!r}")

    @classmethod
    def euclidean(cls, dim: int) -> "NormSpec":
        return cls("euclidean", dim)

    @classmethod
    def l1(cls, dim: int) -> "NormSpec":
        return cls("l1", dim)

    @classmethod
    def linf(cls, dim: int) -> "NormSpec":
        return cls("linf", dim)

    @classmethod
    def lp(cls, p: float, dim: int) -> "NormSpec":
        return cls("lp", dim, p)

    def eval(self, x) -> float | np.ndarray:
        """Norm of ``x``; reduces the last axis, so batches broadcast through."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: vector has {x.shape[-1]} coordinates, norm expects {self.dim}")
        if self.kind == "euclidean":
            out = np.sqrt(np.sum(x * x, axis=-1))
        elif self.kind == "l1":
            out = np.sum(np.abs(x), axis=-1)
        elif self.kind == "linf":
            out = np.max(np.abs(x), axis=-1)
        else:
            out = np.sum(np.abs(x) ** self.p, axis=-1) ** (1.0 / self.p)
        return float(out) if out.ndim == 0 else out

    def dual(self) -> "NormSpec":
        """The dual norm, given by the conjugate exponent (1/p + 1/q = 1)."""
        if self.kind == "euclidean":
            return self
        if self.kind == "l1":
            return NormSpec("linf", self.dim)
        if self.kind == "linf":
            return NormSpec("l1", self.dim)
        return NormSpec("lp", self.dim, self.p / (self.p - 1.0))

    def dual_eval(self, xstar) -> float | np.ndarray:
        return self.dual().eval(xstar)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "dim": self.dim}
        if self.kind == "lp":
            d["p"] = self.p
        return d

    @classmethod
    def from_json(cls, d: dict) -> "NormSpec":
        return cls(d["kind"], d["dim"], d.get("p"))


def norm_eval(ns: NormSpec, x) -> float | np.ndarray:
    """Evaluate ``ns`` at ``x`` (vector or batch with vectors on the last axis)."""
    return ns.eval(x)


def dual_norm_eval(ns: NormSpec, xstar) -> float | np.ndarray:
    """Evaluate the dual norm of ``ns`` at ``xstar``."""
    return ns.dual_eval(xstar)


def pairing(x, xstar) -> float:
    """Euclidean scalar product, the duality pairing used everywhere here."""
    return float(np.dot(np.asarray(x, float), np.asarray(xstar, float)))


@dataclass(frozen=True)
class DirectionSet:
    """Unit vectors for a stated norm (``norm_ref`` is ``primal`` or ``dual``)."""

    directions: np.ndarray
    norm_ref: str
    space: NormSpec

    def __post_init__(self):
        dirs = np.atleast_2d(np.asarray(self.directions, dtype=float))
        object.__setattr__(self, "directions", dirs)
        if self.norm_ref not in ("primal", "dual"):
            raise ValueError("norm_ref must be 'primal' or 'dual'")
        target = self.space if self.norm_ref == "primal" else self.space.dual()
        norms = np.atleast_1d(target.eval(dirs))
        if not np.all(np.abs(norms - 1.0) <= UNIT_TOL):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValueError(f"directions are not unit vectors (worst defect {worst:.3e})")

    def __len__(self) -> int:
        return len(self.directions)


def _raw_directions(dim: int, k: int, seed, mode: str) -> np.ndarray:
    if mode == "systematic":
        if dim == 1:
            return np.array([[1.0] if j % 2 == 0 else [-1.0] for j in range(k)])
        if dim == 2:
            ang = 2.0 * np.pi * np.arange(k) / k
            return np.stack([np.cos(ang), np.sin(ang)], axis=1)
        if dim == 3:
            # Fibonacci lattice on the Euclidean sphere, then rescaled by the caller.
            j = np.arange(k)
            z = 1.0 - (2.0 * j + 1.0) / k
            r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            phi = j * _GOLDEN_ANGLE
            return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        raise ValueError("systematic sphere sampling is only defined for dim <= 3")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((k, dim))
    # Resample the (measure-zero) near-null rows so normalization is safe.
    bad = np.sqrt(np.sum(raw * raw, axis=1)) < 1e-12
    while np.any(bad):
        raw[bad] = rng.standard_normal((int(np.sum(bad)), dim))
        bad = np.sqrt(np.sum(raw * raw, axis=1)) < 1e-12
    return raw


def unit_sphere_samples(
    ns: NormSpec,
    which: str = "primal",
    k: int = 1,
    seed: int | None = 0,
    mode: str | None = None,
) -> DirectionSet:
    """Sample ``k`` unit directions of the primal or dual norm of ``ns``.

    ``mode`` is ``systematic`` (default for dim <= 3: evenly spread, angles
    2*pi*j/k in 2D, a Fibonacci lattice in 3D) or ``random`` (seeded Gaussian
    directions, the only choice above dim 3).  Output is deterministic given
    the seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if which not in ("primal", "dual"):
        raise ValueError("which must be 'primal' or 'dual'")
    if mode is None:
        mode = "systematic" if ns.dim <= 3 else "random"
    target = ns if which == "primal" else ns.dual()
    raw = _raw_directions(ns.dim, k, seed, mode)
    lens = np.atleast_1d(target.eval(raw))
    dirs = raw / lens[:, None]
    # One corrective pass keeps the unit defect comfortably below UNIT_TOL.
    lens = np.atleast_1d(target.eval(dirs))
    dirs = dirs / lens[:, None]
    return DirectionSet(dirs, which, ns)
