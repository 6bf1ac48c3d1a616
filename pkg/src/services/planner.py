"""
Parameter planning.

``plan_params`` turns (n, k, eps) into every slice length a construction needs
and records the inequality ledger the constructions rely on. In ``strict`` mode
each analytic inequality must hold; in ``structural`` mode they are evaluated
and recorded as waived, and only the structural requirements (positive widths,
divisibility, slice layout) are enforced, which is what makes desk-scale plans
possible.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from src.conf.config import config
from src.schemas.plans import LedgerCheck, ParamPlan
from src.services.errors import Infeasible, RangeError

logger = logging.getLogger(__name__)

PROFILES = ("seeded-nm", "two-source-nm", "multi")
LEDGERS = ("strict", "structural")

DEFAULT_GAMMA = Fraction(1, 5000)
DEFAULT_ALPHA = Fraction(1, 4000)
DEFAULT_BETA = Fraction(1, 71)

TOY_ADVCB_S = 5
TOY_SEED_PREFIX_EXTRA = 3
TOY_MULTI_PREFIX = 8


def parse_eps(text: str) -> Fraction:
    """Parse ``2^-20``, ``2**-20``, ``1/1024`` or a decimal into a rational."""
    text = text.strip()
    match = re.fullmatch(r"2\s*(?:\^|\*\*)\s*(-?\d+)", text)
    if match:
        return Fraction(2) ** int(match.group(1))
    value = Fraction(text)
    if not 0 < value < 1:
        raise RangeError(f"error parameter {text} is not in (0, 1)")
    return value


def log2(x: Fraction | int) -> float:
    x = Fraction(x)
    return math.log2(x.numerator) - math.log2(x.denominator)


def ceil_log2(x: int) -> int:
    return max(0, (x - 1).bit_length())


@dataclass(frozen=True)
class AdvCBWidths:
    d: int
    a: int
    s: int

    @property
    def a_pad(self) -> int:
        return 1 << ceil_log2(max(1, self.a))

    @property
    def ell(self) -> int:
        return ceil_log2(self.a_pad)

    @property
    def h(self) -> int:
        return 3 * self.d // 10

    @property
    def z(self) -> int:
        return self.d // 20

    @property
    def r(self) -> int:
        return self.s // 5

    @property
    def out(self) -> int:
        return self.d // 10

    @property
    def ff_k(self) -> int:
        return (5 * self.s + 1) // 2

    def symbols(self, prefix: str = "cb_") -> dict[str, int]:
        return {f"{prefix}d": self.d, f"{prefix}a": self.a, f"{prefix}s": self.s,
                f"{prefix}a_pad": self.a_pad, f"{prefix}ell": self.ell, f"{prefix}h": self.h,
                f"{prefix}z": self.z, f"{prefix}r": self.r, f"{prefix}out": self.out}

    @classmethod
    def from_symbols(cls, symbols: dict[str, int], prefix: str = "cb_") -> AdvCBWidths:
        return cls(symbols[f"{prefix}d"], symbols[f"{prefix}a"], symbols[f"{prefix}s"])


def advcb_structural(w: AdvCBWidths) -> list[tuple[str, float, float]]:
    return [
        ("a >= 1", w.a, 1),
        ("floor(0.2s) >= 1", w.r, 1),
        ("floor(0.05d) >= s", w.z, w.s),
        ("floor(d/10) >= 1", w.out, 1),
    ]


def advcb_analytic(w: AdvCBWidths, log_inv_eps: float, c: float) -> list[tuple[str, float, float]]:
    s, d, ell, L = w.s, w.d, w.ell, log_inv_eps
    return [
        ("s >= c*log2(d/eps')", s, c * (math.log2(d) + L)),
        ("s >= 8c*log2(3s/eps')", s, 8 * c * (math.log2(3 * s) + L)),
        ("d >= 240(l+1)s", d, 240 * (ell + 1) * s),
        ("0.05d >= 4s + 2(2l+1)3s + 2log2(1/eps')", w.z, 4 * s + 6 * (2 * ell + 1) * s + 2 * L),
        ("0.3d - (12l+9)s >= 4s", w.h - (12 * ell + 9) * s, 4 * s),
        ("0.2d - (6l+6)s >= 0.15d", d // 5 - (6 * ell + 6) * s, 3 * d / 20),
        ("NIPM: m >= 4cL*log2(d'/eps')", s, 8 * c * (math.log2(3 * s) + L)),
        ("NIPM: d' >= 4cL*log2(m/eps')", 3 * s, 8 * c * (math.log2(s) + L)),
        ("floor(0.2s) >= c*log2(3s/eps')", w.r, c * (math.log2(3 * s) + L)),
    ]


_D_DEPENDENT = {"d >= 240(l+1)s", "0.05d >= 4s + 2(2l+1)3s + 2log2(1/eps')",
                "0.3d - (12l+9)s >= 4s", "0.2d - (6l+6)s >= 0.15d"}


def min_advcb_s(log_inv_eps: float, c: float) -> int:
    s = TOY_ADVCB_S
    while s < 8 * c * (math.log2(3 * s) + log_inv_eps) or s // 5 < c * (math.log2(3 * s) + log_inv_eps):
        s += 1
    return s


def solve_advcb(a: int, log_inv_eps: float, c: float, d_min: int = 1) -> AdvCBWidths:
    """Smallest internal width ``s`` and then smallest ``d >= d_min`` meeting the analytic ledger."""
    s = min_advcb_s(log_inv_eps, c)
    while True:
        ell = AdvCBWidths(1, a, s).ell
        d = max(d_min, 240 * (ell + 1) * s,
                math.ceil(20 * (4 * s + 6 * (2 * ell + 1) * s + 2 * log_inv_eps)))
        while not all(lhs >= rhs for name, lhs, rhs in advcb_analytic(AdvCBWidths(d, a, s), log_inv_eps, c)
                      if name in _D_DEPENDENT):
            d += 1
        widths = AdvCBWidths(d, a, s)
        if all(lhs >= rhs for _, lhs, rhs in advcb_analytic(widths, log_inv_eps, c)):
            return widths
        s += 1


def _fmt(value: float) -> str:
    if isinstance(value, int) or float(value).is_integer():
        return str(int(value))
    return f"{float(value):.6g}"


class Ledger:
    """Collects inequality checks; a failing enforced check raises ``Infeasible``."""

    def __init__(self, mode: str):
        if mode not in LEDGERS:
            raise RangeError(f"unknown ledger mode {mode!r}")
        self.mode = mode
        self.checks: list[LedgerCheck] = []

    def require(self, name: str, lhs: float, rhs: float, *, analytic: bool = False, strict: bool = False) -> None:
        holds = lhs > rhs if strict else lhs >= rhs
        waived = analytic and self.mode == "structural"
        self.checks.append(LedgerCheck(name=name, lhs=_fmt(lhs), rhs=_fmt(rhs), holds=holds, waived=waived))
        if holds:
            return
        if waived:
            logger.debug(f"waived: {name} ({_fmt(lhs)} vs {_fmt(rhs)})")
            return
        raise Infeasible(name, f"{_fmt(lhs)} vs {_fmt(rhs)}")

    def equal(self, name: str, lhs: int, rhs: int, *, analytic: bool = False) -> None:
        self.require(name, lhs, rhs, analytic=analytic)
        self.require(name.replace("==", "<="), rhs, lhs, analytic=analytic)

    def extend(self, terms: list[tuple[str, float, float]], *, analytic: bool) -> None:
        for name, lhs, rhs in terms:
            self.require(name, lhs, rhs, analytic=analytic)


def _constants(c: float, big_c: float, c_prime: int, **extra: Fraction) -> dict[str, str]:
    constants = {"c": _fmt(c), "C": _fmt(big_c), "c_prime": str(c_prime)}
    constants.update({name: str(value) for name, value in extra.items()})
    return constants


def _plan_seeded(n: int, k: int, eps: Fraction, ledger: Ledger, c: float, big_c: float,
                 c_prime: int, d3: int | None) -> tuple[dict[str, int], Fraction]:
    eps_prime = eps / 10
    L = log2(1 / eps_prime)
    if ledger.mode == "strict":
        d1 = math.ceil(big_c * (math.log2(n) + L))
        d = d1 + 1
        while True:
            w = max(1, ceil_log2(d))
            y2_bits = d3 if d3 is not None else w * math.ceil(c * L / w)
            a = d1 + y2_bits
            cb_log = L + math.log2(c_prime * a)
            need = max(d, math.ceil(big_c * (math.log2(n) + L)),
                       math.ceil(big_c * math.log2(max(a, 2)) * (math.log2(d * a) + L)))
            cb = solve_advcb(a, cb_log, c, d_min=need)
            if cb.d == d and ceil_log2(d) == w:
                break
            d = max(d, cb.d)
    else:
        d1 = ceil_log2(max(n, 1)) + TOY_SEED_PREFIX_EXTRA
        d = max(20 * TOY_ADVCB_S, d1 + 1)
        w = max(1, ceil_log2(d))
        y2_bits = d3 if d3 is not None else w
        a = d1 + y2_bits
        cb_log = L + math.log2(c_prime * a)
        cb = AdvCBWidths(d, a, TOY_ADVCB_S)
    count = math.ceil(y2_bits / w)
    symbols = {"n": n, "k": k, "d": d, "d1": d1, "d2": count * w, "d3": y2_bits, "w": w,
               "count": count, "a": a}
    symbols.update(cb.symbols())
    symbols["out"] = k // 4

    ledger.require("k <= n", n, k)
    ledger.require("floor(k/4) >= 1", k // 4, 1)
    ledger.require("d1 <= d", d, d1)
    ledger.require("z-bar width <= d", d, count * w)
    ledger.require("2^w >= ceil(d/w)", 1 << w, math.ceil(d / w))
    ledger.require("count >= 1", count, 1)
    ledger.extend(advcb_structural(cb), analytic=False)
    ledger.require("k >= 6d", k, 6 * d, analytic=True)
    ledger.require("d >= C*log2(n/eps')", d, big_c * (math.log2(n) + L), analytic=True)
    ledger.require("d >= C*log2(a)*log2(d*a/eps')", d,
                   big_c * math.log2(max(a, 2)) * (math.log2(d * a) + L), analytic=True)
    ledger.extend(advcb_analytic(cb, cb_log, c), analytic=True)
    return symbols, eps_prime


def _two_source_slices(n: int, alpha: Fraction, beta: Fraction, ledger: Ledger) -> dict[str, int]:
    w = max(1, ceil_log2(n))
    if ledger.mode == "strict":
        n2 = w * ((n - math.floor(alpha * n)) // w)
        n1 = n - n2
        n3 = math.floor(beta * n)
        n5 = w * (math.floor((1 - alpha - 31 * beta) * n) // w)
        r = w * (math.floor(alpha * n / 2) // w)
    else:
        r = w
        n1 = 2 * r
        n2 = n - n1
        n3 = 20 * TOY_ADVCB_S
        n5 = w
    n4 = n2 - n3 - n5
    return {"n": n, "w": w, "n1": n1, "n2": n2, "n3": n3, "n4": n4, "n5": n5, "r": r}


def _plan_two_source(n: int, k: int, eps: Fraction, ledger: Ledger, c: float, big_c: float,
                     c_prime: int, gamma: Fraction, alpha: Fraction, beta: Fraction) -> tuple[dict[str, int], Fraction]:
    symbols = _two_source_slices(n, alpha, beta, ledger)
    w, n1, n2, n3, n4, n5, r = (symbols[key] for key in ("w", "n1", "n2", "n3", "n4", "n5", "r"))
    ledger.require("n <= 2^w", 1 << w, n)
    ledger.require("n4 >= 0", n4, 0)
    ledger.require("r >= w", r, w)
    ledger.require("n1 >= r", n1, r)
    ledger.equal("n2 % w == 0", n2 % w, 0)
    ledger.equal("n5 % w == 0", n5 % w, 0)
    ledger.equal("n1 + n3 + n4 + n5 == n", n1 + n3 + n4 + n5, n)

    n0, t_var, count = n2 // w, n5 // w, r // w
    a = 2 * n1 + 2 * r
    eps_prime = eps / (c_prime * a)
    cb_log = log2(1 / eps_prime)
    if ledger.mode == "strict":
        s = min_advcb_s(cb_log, c)
        while s < c * (math.log2(n3) + cb_log):
            s += 1
    else:
        s = TOY_ADVCB_S
    cb = AdvCBWidths(n3, a, s)
    ie_d = cb.out
    ie_r1 = ie_d // 10
    ie_t = ie_d - ie_r1 + 1
    ie_out = 3 * ie_d // 10
    symbols.update({"n0": n0, "t_var": t_var, "count": count, "a": a})
    symbols.update(cb.symbols())
    symbols.update({"ie_d": ie_d, "ie_r1": ie_r1, "ie_t": ie_t, "ie_out": ie_out, "out": ie_out})

    ledger.require("t_var >= count", t_var, count)
    ledger.extend(advcb_structural(cb), analytic=False)
    ledger.require("IExt: r1 >= 1", ie_r1, 1)
    ledger.require("IExt: out >= 1", ie_out, 1)
    ledger.require("IExt: t <= n4", n4, ie_t)
    ledger.require("IExt: out < d/2", ie_d / 2, ie_out, strict=True)

    ledger.require("0 < gamma < alpha", alpha, gamma, analytic=True, strict=True)
    ledger.require("alpha < beta", beta, alpha, analytic=True, strict=True)
    ledger.require("beta < 1/70", Fraction(1, 70), beta, analytic=True, strict=True)
    ledger.require("alpha < beta/50", beta / 50, alpha, analytic=True, strict=True)
    ledger.require("n3 >= floor(beta*n)", n3, math.floor(beta * n), analytic=True)
    ledger.require("r <= alpha*n/2", alpha * n / 2, r, analytic=True)
    ledger.require("k >= (1-gamma)n", k, (1 - gamma) * n, analytic=True)
    ledger.require("n5 > n/2", n5, n / 2, analytic=True, strict=True)
    ledger.require("n - n0 >= 0.9n", n - n0, 0.9 * n, analytic=True)
    ledger.require("X3 rate: n3 - (gamma*n + n1 + 3r) >= 0.9*n3", n3 - (gamma * n + n1 + 3 * r), 0.9 * n3,
                   analytic=True)
    ledger.require("Y4 rate: n4 - (gamma*n + n1 + r + n3) >= 0.95*n4", n4 - (gamma * n + n1 + r + n3),
                   0.95 * n4, analytic=True)
    ledger.require("n3 >= C*log2(a)*log2(n3*a/eps')", n3,
                   big_c * math.log2(max(a, 2)) * (math.log2(n3 * a) + cb_log), analytic=True)
    ledger.extend(advcb_analytic(cb, cb_log, c), analytic=True)
    return symbols, eps_prime


def _plan_multi(n: int, k: int, eps: Fraction, ledger: Ledger, c: float, big_c: float, t: int, sources: int,
                plugin_n: int | None, plugin_m: int, gamma: Fraction,
                entropy_cost: Callable[[Fraction], float] | None) -> tuple[dict[str, int], Fraction]:
    cost = entropy_cost(eps) if entropy_cost is not None else log2(1 / eps)
    strict = ledger.mode == "strict"
    d1 = math.ceil(big_c * (math.log2(n) + cost)) if strict else TOY_MULTI_PREFIX
    d = 2 * (plugin_n or 2 * d1)
    while True:
        w = max(1, ceil_log2(d))
        d3 = w * math.ceil(c * cost / w) if strict else w
        a = d1 + d3
        v_len = math.ceil(a / gamma) if strict else (plugin_n or 0) - a
        d4 = max(d3, a)
        d5 = 3 * (t + 1) * d4
        m1_need = math.ceil(2 * (t + 1) ** 2 * a / gamma) if strict else v_len
        need = max(2 * m1_need, d1 + d5)
        if strict:
            need = max(need, math.ceil(big_c * t * t * (math.log2(n) + cost)))
        if need == d and ceil_log2(d) == w:
            break
        d = need
    m1 = d // 2
    zlen = 9 * k // 10
    symbols = {"n": n, "k": k, "t": t, "s": sources, "d": d, "d1": d1, "d2": d3, "d3": d3, "d4": d4,
               "d5": d5, "w": w, "count": d3 // w, "a": a, "v_len": v_len, "m1": m1, "zlen": zlen,
               "r_len": d4, "plugin_n": v_len + a, "plugin_m": plugin_m, "out": plugin_m}

    ledger.require("k <= n", n, k)
    ledger.require("t >= 1", t, 1)
    ledger.require("s >= 1", sources, 1)
    ledger.require("v_len >= 1", v_len, 1)
    ledger.require("m1 >= v_len", m1, v_len)
    ledger.require("zlen >= m1", zlen, m1)
    ledger.require("zlen >= d2 + d5", zlen, d3 + d5)
    ledger.require("d >= d1 + d5", d, d1 + d5)
    ledger.require("2^w >= ceil(d/w)", 1 << w, math.ceil(d / w))
    ledger.equal("d5 == 3(t+1)d4", d5, 3 * (t + 1) * d4)
    ledger.require("m1 >= 2(t+1)^2*a/gamma", m1, 2 * (t + 1) ** 2 * a / gamma, analytic=True)
    ledger.require("k >= C*t^2*(log2(n) + f(eps))", k, big_c * t * t * (math.log2(n) + cost), analytic=True)
    ledger.require("d >= C*t^2*(log2(n) + f(eps))", d, big_c * t * t * (math.log2(n) + cost), analytic=True)
    ledger.require("d - (t+1)(d1+d3+d5) >= 2d/3", d - (t + 1) * (d1 + d3 + d5), 2 * d / 3, analytic=True)
    ledger.require("zlen - (t+1)(d2+d5) >= 2zlen/3", zlen - (t + 1) * (d3 + d5), 2 * zlen / 3, analytic=True)
    return symbols, eps


def plan_params(n: int, k: int, eps: Fraction, profile: str, ledger: str = "strict", *,
                c: float | None = None, big_c: float | None = None, c_prime: int | None = None,
                gamma: Fraction = DEFAULT_GAMMA, alpha: Fraction = DEFAULT_ALPHA, beta: Fraction = DEFAULT_BETA,
                d3: int | None = None, t: int = 1, sources: int = 1, plugin_n: int | None = None,
                plugin_m: int = 1, entropy_cost: Callable[[Fraction], float] | None = None) -> ParamPlan:
    """
    The plan_params function solves the inequality ledger of a profile.

    :param n: int: Source length
    :param k: int: Source min-entropy
    :param eps: Fraction: Target error
    :param profile: str: seeded-nm, two-source-nm or multi
    :param ledger: str: strict or structural
    :return: An immutable plan; raises Infeasible naming the first failing inequality
    """
    if profile not in PROFILES:
        raise RangeError(f"unknown profile {profile!r}")
    if n < 1:
        raise Infeasible("n >= 1", f"n = {n}")
    eps = Fraction(eps)
    c = config.CONST_C if c is None else c
    big_c = config.CONST_BIG_C if big_c is None else big_c
    c_prime = config.CONST_C_PRIME if c_prime is None else c_prime
    book = Ledger(ledger)
    if profile == "seeded-nm":
        symbols, eps_prime = _plan_seeded(n, k, eps, book, c, big_c, c_prime, d3)
        constants = _constants(c, big_c, c_prime)
    elif profile == "two-source-nm":
        symbols, eps_prime = _plan_two_source(n, k, eps, book, c, big_c, c_prime, gamma, alpha, beta)
        constants = _constants(c, big_c, c_prime, gamma=gamma, alpha=alpha, beta=beta)
    else:
        if ledger == "structural" and plugin_n is None:
            raise RangeError("a structural multi plan needs the plug-in input length")
        symbols, eps_prime = _plan_multi(n, k, eps, book, c, big_c, t, sources, plugin_n, plugin_m, gamma,
                                         entropy_cost)
        constants = _constants(c, big_c, c_prime, gamma=gamma)
    plan = ParamPlan(profile=profile, ledger=ledger, n=n, k=k, eps=str(eps), eps_prime=str(eps_prime),
                     constants=constants, symbols=symbols, checks=book.checks)
    if plan.waived:
        logger.info(f"{profile} plan for n={n}: {sum(not check.holds for check in plan.waived)} analytic checks waived")
    return plan


def smallest_plan(profile: str, eps: Fraction = Fraction(1, 4), *, start: int = 1, limit: int = 1 << 12,
                  **kwargs) -> ParamPlan:
    """Scan n upward for the first structural plan of a profile (k = n)."""
    last: Infeasible | None = None
    for n in range(start, limit + 1):
        try:
            return plan_params(n, n, eps, profile, "structural", **kwargs)
        except Infeasible as error:
            last = error
    raise last or Infeasible("n <= limit", f"no plan up to {limit}")
