"""Bi-infinite scale sequences ``eps_k`` with controlled consecutive ratios.

The sequence is pinned at ``eps_0 = anchor`` and generated from a ratio
rule ``r_k = eps_{k-1} / eps_k``. Admissible rules keep every ratio
positive, strictly increasing in ``k``, at most ``rho`` and vanishing as
``k -> -inf``, where ``rho = eps / (3 (L + eps))``.

Going downward the values collapse super-geometrically, so ``eps(k)``
underflows to ``0.0`` somewhere below ``k = -40`` for unit anchors. The
exact logarithm is kept alongside (:meth:`EpsilonSequence.log_eps`) and is
what certifies positivity far down.
"""

from __future__ import annotations

import math
import threading
from typing import Callable

from .errors import ConstantFunctionShortcut, NonpositiveParameter

RatioRule = Callable[[float, int], float]


def dyadic_ratio(rho: float, k: int) -> float:
    """``rho / (1 + 2**-k)``: increasing, below ``rho``, ~``rho * 2**k`` at -inf."""
    return rho / (1.0 + 2.0 ** (-k))


RULES: dict[str, RatioRule] = {"dyadic": dyadic_ratio}


class EpsilonSequence:
    """Lazily grown, thread-safe cache of ``eps_k`` for ``k`` in ``Z``."""

    def __init__(self, rho: float, anchor: float, rule: str | RatioRule = "dyadic",
                 L: float | None = None, epsilon: float | None = None,
                 eps_eff: float | None = None):
        if not rho > 0 or not anchor > 0:
            raise NonpositiveParameter(f"need rho > 0 and anchor > 0, got {rho!r}, {anchor!r}")
        if callable(rule):
            self.rule_id = getattr(rule, "__name__", "custom")
            self._rule = rule
        else:
            if rule not in RULES:
                raise NonpositiveParameter(f"unknown ratio rule {rule!r}")
            self.rule_id = rule
            self._rule = RULES[rule]
        self.rho = float(rho)
        self.anchor = float(anchor)
        self.L = L
        self.epsilon = epsilon
        self.eps_eff = eps_eff
        self._lock = threading.Lock()
        # _up[i] = eps(i), _down[i] = eps(-i); same layout for the logs
        self._up = [self.anchor]
        self._down = [self.anchor]
        self._log_up = [math.log(self.anchor)]
        self._log_down = [math.log(self.anchor)]

    def ratio(self, k: int) -> float:
        """``r_k = eps(k-1) / eps(k)`` as given by the rule."""
        return self._rule(self.rho, int(k))

    def _grow(self, k: int) -> None:
        with self._lock:
            if k >= 0:
                while len(self._up) <= k:
                    i = len(self._up)
                    r = self.ratio(i)
                    self._up.append(self._up[-1] / r)
                    self._log_up.append(self._log_up[-1] - math.log(r))
            else:
                while len(self._down) <= -k:
                    i = len(self._down)
                    r = self.ratio(-i + 1)
                    self._down.append(self._down[-1] * r)
                    self._log_down.append(self._log_down[-1] + math.log(r))

    def eps(self, k: int) -> float:
        k = int(k)
        if k >= 0:
            if k >= len(self._up):
                self._grow(k)
            return self._up[k]
        if -k >= len(self._down):
            self._grow(k)
        return self._down[-k]

    __call__ = eps

    def log_eps(self, k: int) -> float:
        k = int(k)
        self.eps(k)
        return self._log_up[k] if k >= 0 else self._log_down[-k]

    def bracket(self, t: float, offset: int = 0) -> int:
        """The unique ``k`` with ``eps(k-1+offset) <= t < eps(k+offset)``."""
        if not t > 0:
            raise ValueError(f"bracket needs t > 0, got {t!r}")
        m = 0
        if t < self.eps(m - 1):
            while t < self.eps(m - 1):
                m -= 1
        else:
            while t >= self.eps(m):
                m += 1
        return m - offset

    def __repr__(self):
        return f"EpsilonSequence(rho={self.rho:g}, anchor={self.anchor:g}, rule={self.rule_id!r})"


def new_sequence(L: float, eps: float, anchor: float, rule: str | RatioRule = "dyadic") -> EpsilonSequence:
    """Scale sequence for an ``L``-Lipschitz datum and tolerance ``eps``.

    ``eps`` is clamped to ``min(eps, L)`` before computing ``rho``; the
    clamped value is exposed as ``seq.eps_eff``.
    """
    if L == 0:
        raise ConstantFunctionShortcut("L = 0: use the constant extension")
    for name, val in (("L", L), ("eps", eps), ("anchor", anchor)):
        if not (val > 0 and math.isfinite(val)):
            raise NonpositiveParameter(f"{name} must be positive and finite, got {val!r}")
    eps_eff = min(eps, L)
    rho = eps_eff / (3.0 * (L + eps_eff))
    return EpsilonSequence(rho, anchor, rule, L=L, epsilon=eps, eps_eff=eps_eff)


def check_hypotheses(seq: EpsilonSequence, k_lo: int, k_hi: int) -> dict[str, bool]:
    """Enumerate the sequence hypotheses over ``k_lo <= k <= k_hi``.

    Positivity is read off the logarithm, which stays finite where the
    float value has underflowed.
    """
    ks = range(k_lo, k_hi + 1)
    ratios = [seq.ratio(k) for k in ks]
    return {
        "positive": all(math.isfinite(seq.log_eps(k)) and seq.eps(k) >= 0 for k in ks)
        and all(r > 0 for r in ratios),
        "ratio_increasing": all(a < b for a, b in zip(ratios, ratios[1:])),
        "ratio_below_rho": all(r <= seq.rho for r in ratios),
        "ratio_decay": all(r <= seq.rho * 2.0 ** k for k, r in zip(ks, ratios) if k <= 0),
    }
