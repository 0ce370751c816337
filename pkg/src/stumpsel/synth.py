"""Sparse additive regression instance generators and the signal-gap measure.

An instance is ``y_i = sum_k f_k(x_ik) + noise_sd * z_i`` where only the s
active features have nonzero link functions f_k.  All provided links are
monotone, which is the regime in which stump scoring provably separates
active from inactive features.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtr, ndtri

from .stump import Dataset


class DesignDistribution(Enum):
    """Marginal distribution of the design-matrix entries."""

    UNIFORM01 = "uniform01"
    UNIFORM_SYM = "uniformsym"
    STD_GAUSSIAN = "gaussian"

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self is DesignDistribution.UNIFORM01:
            return rng.random(size)
        if self is DesignDistribution.UNIFORM_SYM:
            return rng.uniform(-1.0, 1.0, size)
        return rng.standard_normal(size)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        if self is DesignDistribution.UNIFORM01:
            return np.clip(x, 0.0, 1.0)
        if self is DesignDistribution.UNIFORM_SYM:
            return np.clip((x + 1.0) / 2.0, 0.0, 1.0)
        return ndtr(x)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        if self is DesignDistribution.UNIFORM01:
            return np.asarray(u, dtype=np.float64)
        if self is DesignDistribution.UNIFORM_SYM:
            return 2.0 * np.asarray(u, dtype=np.float64) - 1.0
        return ndtri(u)


_LINK_KINDS = ("linear", "cubic", "logistic", "zero")


@dataclass(frozen=True)
class LinkFunction:
    """A univariate monotone link, or the zero link for inactive features."""

    kind: str
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in _LINK_KINDS:
            raise ValueError(f"unknown link kind {self.kind!r}")
        if self.kind == "zero" and self.beta != 0.0:
            raise ValueError("zero link must have beta == 0")

    @classmethod
    def linear(cls, beta: float) -> "LinkFunction":
        return cls("linear", float(beta))

    @classmethod
    def cubic(cls, beta: float) -> "LinkFunction":
        return cls("cubic", float(beta))

    @classmethod
    def logistic(cls, beta: float) -> "LinkFunction":
        return cls("logistic", float(beta))

    @classmethod
    def zero(cls) -> "LinkFunction":
        return cls("zero", 0.0)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "linear":
            return self.beta * x
        if self.kind == "cubic":
            return self.beta * x**3
        if self.kind == "logistic":
            return self.beta / (1.0 + np.exp(-4.0 * x))
        return np.zeros_like(x)


@dataclass(frozen=True)
class ModelSpec:
    """Generative description of one s-sparse additive instance."""

    p: int
    s: int
    active: tuple[int, ...]
    links: tuple[LinkFunction, ...]
    design: DesignDistribution
    noise_sd: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not 0 <= self.s <= self.p:
            raise ValueError(f"s must be in [0, {self.p}], got {self.s}")
        active = tuple(int(k) for k in self.active)
        if sorted(set(active)) != sorted(active) or len(active) != self.s:
            raise ValueError("active must hold s distinct indices")
        if any(not 0 <= k < self.p for k in active):
            raise ValueError("active indices out of range")
        if len(self.links) != self.p:
            raise ValueError(f"need {self.p} links, got {len(self.links)}")
        active_set = set(active)
        for k, link in enumerate(self.links):
            if link.is_zero == (k in active_set):
                raise ValueError(f"link {k} must be zero iff the feature is inactive")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        object.__setattr__(self, "active", active)
        object.__setattr__(self, "links", tuple(self.links))


_LINK_MAKERS = {
    "linear": LinkFunction.linear,
    "cubic": LinkFunction.cubic,
    "logistic": LinkFunction.logistic,
}


def gen_model(
    p: int,
    s: int,
    beta_min: float,
    beta_max: float,
    design: DesignDistribution,
    noise_sd: float,
    rng: np.random.Generator,
    link: str = "linear",
) -> ModelSpec:
    """Draw a random s-sparse model: uniform active set, beta ~ +-U[min, max]."""
    if not 1 <= s <= p:
        raise ValueError(f"s must be in [1, {p}], got {s}")
    if not 0 < beta_min <= beta_max:
        raise ValueError("need 0 < beta_min <= beta_max")
    if link not in _LINK_MAKERS:
        raise ValueError(f"unknown link kind {link!r}")
    active = np.sort(rng.choice(p, size=s, replace=False))
    magnitude = rng.uniform(beta_min, beta_max, size=s)
    sign = np.where(rng.random(s) < 0.5, -1.0, 1.0)
    make = _LINK_MAKERS[link]
    links: list[LinkFunction] = [LinkFunction.zero()] * p
    for k, beta in zip(active, sign * magnitude):
        links[int(k)] = make(float(beta))
    return ModelSpec(
        p=p,
        s=s,
        active=tuple(int(k) for k in active),
        links=tuple(links),
        design=design,
        noise_sd=float(noise_sd),
    )


def gen_dataset(spec: ModelSpec, n: int, rng: np.random.Generator) -> Dataset:
    """Sample n rows from the model: design draws first, then the noise."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    x = spec.design.sample(rng, (n, spec.p))
    y = np.zeros(n, dtype=np.float64)
    for k in spec.active:
        y += spec.links[k](x[:, k])
    y += spec.noise_sd * rng.standard_normal(n)
    return Dataset(x=x, y=y)


def signal_gap(
    link: LinkFunction,
    design: DesignDistribution,
    mc_samples: int,
    rng: np.random.Generator,
) -> float:
    """Expected link value on the upper half of the design minus the lower half.

    Linear links on the uniform-[0,1] design have the closed form beta/2;
    every other combination is estimated by Monte Carlo on the
    quantile-transformed variable, pairing u and u + 1/2 draws so the two
    conditional means share their sampling noise.
    """
    if link.is_zero:
        return 0.0
    if link.kind == "linear" and design is DesignDistribution.UNIFORM01:
        return link.beta / 2.0
    if mc_samples < 1:
        raise ValueError("mc_samples must be >= 1")
    u = rng.random(mc_samples) * 0.5
    np.clip(u, 1e-12, None, out=u)  # keep the Gaussian quantile finite
    low = link(design.quantile(u))
    high = link(design.quantile(u + 0.5))
    return float(np.mean(high - low))
