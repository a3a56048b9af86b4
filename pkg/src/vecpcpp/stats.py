"""Sampled-estimate bookkeeping with Wilson score intervals."""
from __future__ import annotations

from dataclasses import dataclass

from scipy.stats import binomtest

CONFIDENCE = 0.99


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int
    seed: int | None
    low: float
    high: float

    @property
    def value(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    @property
    def radius(self) -> float:
        return (self.high - self.low) / 2

    def to_json(self) -> dict:
        return {"estimate": self.value, "ci": [self.low, self.high], "radius": self.radius,
                "successes": self.successes, "trials": self.trials, "seed": self.seed,
                "confidence": CONFIDENCE}


def wilson(successes: int, trials: int, seed=None, confidence: float = CONFIDENCE) -> Estimate:
    if trials <= 0:
        raise ValueError("need at least one trial")
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return Estimate(successes, trials, seed, float(ci.low), float(ci.high))
