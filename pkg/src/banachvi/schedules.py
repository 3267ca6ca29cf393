"""Parameter sequences lambda_n, alpha_{n,i} and r_n."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

from .exceptions import ScheduleError

log = logging.getLogger(__name__)

LAMBDA_KINDS = ("constant", "harmonic", "capped_harmonic", "custom")


@dataclass(frozen=True)
class LambdaRule:
    """Step sizes lambda_n.

    ``capped_harmonic`` is ``min(1/n, kappa * cap)`` where ``cap = c^2 alpha / 2``.
    """

    kind: str = "capped_harmonic"
    value: float = 0.99
    func: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in LAMBDA_KINDS:
            raise ScheduleError(f"unknown lambda rule {self.kind!r}")
        if self.kind == "capped_harmonic" and not 0.0 < self.value < 1.0:
            raise ScheduleError(f"capped_harmonic needs kappa in (0, 1), got {self.value}")
        if self.kind == "constant" and not self.value > 0.0:
            raise ScheduleError(f"constant step must be positive, got {self.value}")

    @classmethod
    def constant(cls, v):
        return cls("constant", float(v))

    @classmethod
    def harmonic(cls):
        return cls("harmonic", 0.0)

    @classmethod
    def capped_harmonic(cls, kappa=0.99):
        return cls("capped_harmonic", float(kappa))

    def __call__(self, n, cap):
        if self.kind == "constant":
            return self.value
        if self.kind == "harmonic":
            return 1.0 / n
        if self.kind == "capped_harmonic":
            return min(1.0 / n, self.value * cap)
        return float(self.func(n))

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind in ("constant", "capped_harmonic"):
            d["value"] = self.value
        return d


@dataclass(frozen=True)
class AffineRule:
    """``a + b/(n + shift)``."""

    a: float
    b: float = 0.0
    shift: float = 0.0

    def __call__(self, n):
        return self.a + self.b / (n + self.shift)

    @property
    def first(self):
        return self(1)

    @property
    def limit(self):
        return self.a

    def to_list(self):
        return [self.a, self.b] if self.shift == 0.0 else [self.a, self.b, self.shift]


@dataclass(frozen=True)
class ScheduleSet:
    lambda_rule: LambdaRule = field(default_factory=LambdaRule)
    alpha_rules: tuple = ()
    r: Optional[float] = None

    def alphas(self, n):
        return [rule(n) for rule in self.alpha_rules]

    def validate(self, n_alpha, need_r=False, cap=None):
        """Check the hypotheses that can be decided for affine rules.

        Raises ``ScheduleError`` on a violation; custom rules only warn.
        """
        rules = self.alpha_rules
        if len(rules) != n_alpha:
            raise ScheduleError(f"expected {n_alpha} alpha rules, got {len(rules)}")
        if not all(isinstance(r, AffineRule) for r in rules):
            log.warning("non-affine alpha rules accepted without checking their hypotheses")
        else:
            shifts = {r.shift for r in rules}
            if len(shifts) != 1:
                raise ScheduleError("alpha rules must share the same index shift")
            if abs(sum(r.a for r in rules) - 1.0) > 1e-12 or abs(sum(r.b for r in rules)) > 1e-12:
                raise ScheduleError("alpha_{n,i} must sum to 1 for every n")
            for i, r in enumerate(rules, 1):
                # affine in 1/(n + shift): the extremes are n = 1 and the limit
                for v in (r.first, r.limit):
                    if not -1e-15 <= v <= 1.0 + 1e-15:
                        raise ScheduleError(f"alpha_{{n,{i}}} leaves [0, 1] (value {v:g})")
            if not rules[1].limit * rules[2].limit > 0.0:
                raise ScheduleError("liminf alpha_{n,2} alpha_{n,3} must be positive")
            if n_alpha == 4 and not rules[1].limit * rules[3].limit > 0.0:
                raise ScheduleError("liminf alpha_{n,2} alpha_{n,4} must be positive")
        if need_r:
            if self.r is None or not self.r > 0.0:
                raise ScheduleError(f"r_n must be a positive constant, got {self.r}")
        lam = self.lambda_rule
        if lam.kind == "constant":
            log.warning("constant lambda_n does not tend to 0")
        if cap is not None and lam.kind in ("constant", "harmonic") and lam(1, cap) >= cap:
            log.warning("lambda_1 = %g violates the step cap c^2 alpha / 2 = %g", lam(1, cap), cap)

    def to_dict(self):
        return {"lambda": self.lambda_rule.to_dict(),
                "alpha": [r.to_list() for r in self.alpha_rules],
                "r": self.r}


def affine_rules(pairs):
    return tuple(AffineRule(*map(float, p)) for p in pairs)
