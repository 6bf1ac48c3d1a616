"""
Verification suites.

Each suite turns a budget (number of sources, seeds or encodings it may use)
and a random generator into ``SuiteResult`` rows. Exact suites compare exact
statistical distances with exact bounds; regression suites compare realized
distances at toy plans with a random function on the same sources, within a
pinned margin, and with the broken controls.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.stats import chisquare

from src.conf.thresholds import Thresholds
from src.schemas.reports import SuiteResult, VerifyReport
from src.services.bitcore import BitString, all_strings, random_bits
from src.services.breaker import AdvCBCfg, FlipFlopCfg, adv_cb, flip_flop
from src.services.distrib import (
    FlatSource,
    JointDist,
    Tamperer,
    conditioned_distance,
    eval_extractor_dist,
    nm_distance,
    random_function,
    strongness_gap,
    tamperer_library,
)
from src.services.errors import Infeasible, RangeError
from src.services.gfield import FieldElement, field_ctx, gf2_rank, rank, vandermonde
from src.services.iext import IExtCfg, iext_extract, iext_matrix
from src.services.laext import AltExtCfg, la_ext_prefix, nipm, nipm_cfg
from src.services.multi import MultiCfg, multi_adv_cb, nm2_plugin, seeded_tnm_extract
from src.services.nm2ext import Nm2Cfg, RSCode, nm2_extract, rs_encode, sampled_symbols, split
from src.services.nmcode import (
    CodecCfg,
    complete,
    decode,
    draw_prefix,
    encode,
    identity,
    simulation_distance,
    tamper_experiment,
)
from src.services.planner import plan_params, smallest_plan
from src.services.seeded import SeededExtCfg, lhl_extract_table
from src.services.snmext import AdvGenCfg, SnmCfg, adv_gen, snm_extract
from src.services.twosource import IPCfg, ip_table

logger = logging.getLogger(__name__)

LOOKAHEAD_STEPS = 3
LOOKAHEAD_BITS = 12
FIBER_CELLS = 64
CHI_SQUARE_PER_CELL = 5


@dataclass
class SuiteRun:
    budget: int
    rng: np.random.Generator
    thresholds: Thresholds


Suite = Callable[[SuiteRun], list[SuiteResult]]
SUITES: dict[str, Suite] = {}


def suite(name: str) -> Callable[[Suite], Suite]:
    def register(fn: Suite) -> Suite:
        SUITES[name] = fn
        return fn

    return register


def _result(construction: str, sd: Fraction, passed: bool, bound: str = "", **params) -> SuiteResult:
    sources = params.pop("sources", [])
    tamperers = params.pop("tamperers", [])
    return SuiteResult(construction=construction, params=params, sources=sources, tamperers=tamperers,
                       sd=str(sd), sd_float=float(sd), bound=bound, passed=passed)


def toy_seeded_cfg() -> SnmCfg:
    return SnmCfg.from_plan(plan_params(16, 16, Fraction(1, 4), "seeded-nm", "structural"))


def toy_two_source_cfg() -> Nm2Cfg:
    return Nm2Cfg.from_plan(smallest_plan("two-source-nm"))


def toy_multi_cfg() -> MultiCfg:
    """Two tamperings over the two-source plug-in of the smallest two-source plan."""
    plugin = toy_two_source_cfg()
    return MultiCfg.from_plan(plan_params(180, 180, Fraction(1, 4), "multi", "structural", t=2, sources=1,
                                          plugin_n=plugin.n, plugin_m=plugin.out))


@suite("ip-strongness")
def ip_strongness(run: SuiteRun) -> list[SuiteResult]:
    cfg = IPCfg.create(12, 2)
    bound = cfg.bound(10, 10)
    results = []
    for i in range(run.budget):
        xs = run.rng.choice(1 << 12, size=1 << 10, replace=False)
        ys = run.rng.choice(1 << 12, size=1 << 10, replace=False)
        table = ip_table(cfg, xs, ys)
        for side, sd in (("y", conditioned_distance(table.T, cfg.m)), ("x", conditioned_distance(table, cfg.m))):
            results.append(_result("ip", sd, bound.holds(sd), str(bound), n=12, m=2, k=10, side=side,
                                   sources=[f"flat-12-10-#{i}"] * 2))
    return results


@suite("lhl-strongness")
def lhl_strongness(run: SuiteRun) -> list[SuiteResult]:
    cfg = SeededExtCfg.create(12, 11, 4, 8)
    seeds = np.arange(1 << cfg.d, dtype=np.uint64)
    results = []
    for i in range(run.budget):
        xs = run.rng.choice(1 << cfg.n, size=1 << cfg.k, replace=False)
        sd = conditioned_distance(lhl_extract_table(cfg, xs, seeds), cfg.m)
        results.append(_result("lhl", sd, cfg.bound.holds(sd), str(cfg.bound), n=cfg.n, d=cfg.d, m=cfg.m,
                               k=cfg.k, sources=[f"flat-12-8-#{i}"]))
    return results


@suite("iext-fiber")
def iext_fiber(run: SuiteRun) -> list[SuiteResult]:
    cfg = IExtCfg.create(20, 10)
    seeds = list(all_strings(cfg.d))[:run.budget]
    bad = sum(gf2_rank(iext_matrix(cfg, seed)) != cfg.out for seed in seeds)
    results = [_result("iext", Fraction(bad), bad == 0, "0", n=cfg.n, d=cfg.d, seeds=len(seeds),
                       fiber=f"2^{cfg.n - cfg.out}")]
    small = IExtCfg.create(14, 10)
    for seed in seeds[:max(1, run.budget // 256)]:
        counts = Counter(iext_extract(small, x, seed).value for x in all_strings(small.n))
        uneven = sum(count != 1 << (small.n - small.out) for count in counts.values())
        uneven += (1 << small.out) - len(counts)
        results.append(_result("iext", Fraction(uneven), uneven == 0, "0", n=small.n, d=small.d,
                               seed=seed.to_hex()))
    return results


@suite("iext-linearity")
def iext_linearity(run: SuiteRun) -> list[SuiteResult]:
    cfg = IExtCfg.create(20, 10)
    failures = 0
    for _ in range(run.budget):
        seed = random_bits(run.rng, cfg.d)
        x, y = random_bits(run.rng, cfg.n), random_bits(run.rng, cfg.n)
        if iext_extract(cfg, x ^ y, seed) != iext_extract(cfg, x, seed) ^ iext_extract(cfg, y, seed):
            failures += 1
        basis = BitString.zeros(cfg.out)
        for j in range(cfg.n):
            if x.bit(j):
                basis = basis ^ iext_extract(cfg, BitString(1 << (cfg.n - 1 - j), cfg.n), seed)
        failures += basis != iext_extract(cfg, x, seed)
    return [_result("iext", Fraction(failures), failures == 0, "0", n=cfg.n, d=cfg.d, seeds=run.budget)]


@suite("rs-distance")
def rs_distance(run: SuiteRun) -> list[SuiteResult]:
    ctx = field_ctx(3)
    results = []
    for n0, n in itertools.product(range(1, 4), range(1, 8)):
        if n0 > n:
            continue
        code = RSCode(ctx, n0, n)
        words = np.array([[s.value for s in rs_encode(code, [FieldElement(ctx, v) for v in msg])]
                          for msg in itertools.product(range(ctx.order), repeat=n0)])
        distances = (words[:, None, :] != words[None, :, :]).sum(axis=2)
        np.fill_diagonal(distances, n + 1)
        worst = int(distances.min())
        results.append(_result("rs", Fraction(0), worst >= code.distance, str(code.distance), n0=n0, n=n,
                               min_distance=worst))
    return results


@suite("vandermonde-rank")
def vandermonde_rank(run: SuiteRun) -> list[SuiteResult]:
    ctx = field_ctx(3)
    bad = 0
    subsets = 0
    for size in range(1, ctx.order + 1):
        for points in itertools.combinations(ctx.elements(), size):
            subsets += 1
            bad += rank(ctx, vandermonde(ctx, points, ctx.order - 1)) != size
    return [_result("vandermonde", Fraction(bad), bad == 0, "0", w=3, subsets=subsets)]


@suite("output-lengths")
def output_lengths(run: SuiteRun) -> list[SuiteResult]:
    rng = run.rng
    merge = nipm_cfg(20, 30, 4)
    ff = FlipFlopCfg.create(15, 15, 13)
    cb = AdvCBCfg.create(100, 4, 5)
    snm = toy_seeded_cfg()
    nm2 = toy_two_source_cfg()
    measured = {
        "nipm": (nipm(merge, [random_bits(rng, 20) for _ in range(4)], random_bits(rng, 30)).length, 20 // 5),
        "flip-flop": (flip_flop(ff, random_bits(rng, 15), random_bits(rng, 15), 1).length, 2 * 13 // 5),
        "adv-cb": (adv_cb(cb, random_bits(rng, 100), random_bits(rng, 100), random_bits(rng, 4)).length, 10),
        "snm": (snm_extract(snm, random_bits(rng, snm.n), random_bits(rng, snm.d)).length, snm.k // 4),
        "nm2": (nm2_extract(nm2, random_bits(rng, nm2.n), random_bits(rng, nm2.n)).length, nm2.iext.out),
    }
    return [_result(name, Fraction(abs(got - want)), got == want, str(want), measured=got)
            for name, (got, want) in measured.items()]


def _names(tampering: list) -> list[str]:
    rows = tampering if any(isinstance(t, list) for t in tampering) else [tampering]
    return ["/".join(t.name if t is not None else "identity" for t in row) for row in rows]


def _margin(value: float) -> Fraction:
    return Fraction(value).limit_denominator(1 << 16)


def _nm_case(name: str, ext: Callable, control: Callable, sources: list[FlatSource], tampering: list,
             m: int, margin: float, *, sides: tuple[int, ...] = (1,), strict: bool = True) -> SuiteResult:
    """
    The _nm_case function measures one construction against an ideal reference and its broken control.

    The reference is a random function evaluated on the same sources and
    tamperings, so the small-support noise it carries is the noise the
    construction carries too.
    """
    def distance(fn: Callable) -> Fraction:
        return nm_distance(eval_extractor_dist(fn, sources, tampering, sides), m)

    sd, control_sd, reference = distance(ext), distance(control), distance(random_function(m))
    limit = reference + _margin(margin)
    beats = sd < control_sd if strict else sd <= control_sd
    logger.info(f"{name}: sd {float(sd):.4f}, reference {float(reference):.4f}, control {float(control_sd):.4f}")
    return _result(name, sd, sd <= limit and beats, f"{float(limit):.4f}", control=str(control_sd),
                   reference=str(reference), sources=[f"flat-{s.n}-{len(s)}" for s in sources],
                   tamperers=_names(tampering))


@suite("nm-regression")
def nm_regression(run: SuiteRun) -> list[SuiteResult]:
    rng, th = run.rng, run.thresholds
    size = max(2, run.budget)
    advice = FlatSource.from_values(1, [0])
    results = []

    ff = FlipFlopCfg.create(8, 8, 8)
    results.append(_nm_case(
        "flip-flop", lambda x, y, b: flip_flop(ff, x, y, b.value), lambda x, y, b: flip_flop(ff, x, y, 0),
        [FlatSource.random(rng, 8, min(64, 4 * size)), FlatSource.random(rng, 8, min(16, size)), advice],
        [None, None, tamperer_library(1)[0]], ff.out, th.flip_flop))

    cb = AdvCBCfg.create(100, 1, 5)
    results.append(_nm_case(
        "adv-cb", lambda x, y, a: adv_cb(cb, x, y, a), lambda x, y, a: adv_cb(cb, x, y, a, control=True),
        [FlatSource.random(rng, 100, 256), FlatSource.random(rng, 100, min(4, size)), advice],
        [None, None, tamperer_library(1)[0]], cb.out, th.adv_cb))

    snm = toy_seeded_cfg()
    flip = tamperer_library(snm.d)[snm.d - 1]
    results.append(_nm_case(
        "snm", lambda x, y: snm_extract(snm, x, y), lambda x, y: snm_extract(snm, x, y, control=True),
        [FlatSource.random(rng, snm.n, 16), FlatSource.random(rng, snm.d, size)],
        [None, flip], snm.out, th.snm))

    nm2 = toy_two_source_cfg()
    flip = tamperer_library(nm2.n)[nm2.n1 + nm2.n3]
    results.append(_nm_case(
        "nm2", lambda x, y: nm2_extract(nm2, x, y), lambda x, y: nm2_extract(nm2, x, y, control=True),
        [FlatSource.random(rng, nm2.n, 16), FlatSource.random(rng, nm2.n, size)],
        [flip, None], nm2.out, th.nm2))

    mc = toy_multi_cfg()
    plugin = nm2_plugin(nm2)
    # only the advice is tampered, so the advice-free control repeats its output in every run
    flips = tamperer_library(mc.a)[:mc.t]
    results.append(_nm_case(
        "multi-adv-cb", lambda x1, x2, a: multi_adv_cb(mc, plugin, [x1, x2], a),
        lambda x1, x2, a: multi_adv_cb(mc, plugin, [x1, x2], a, control=True),
        [FlatSource.random(rng, mc.m1, min(16, 4 * size)), FlatSource.random(rng, mc.m1, min(8, size)),
         FlatSource.from_values(mc.a, [0])],
        [[None, None, flip] for flip in flips], plugin.m, th.multi))

    # seed tampering reaches every refreshed source; the control is only required not to beat the construction
    seed_flips = tamperer_library(mc.d)
    results.append(_nm_case(
        "seeded-tnm", lambda x, y: seeded_tnm_extract(mc, plugin, [x], y),
        lambda x, y: seeded_tnm_extract(mc, plugin, [x], y, control=True),
        [FlatSource.random(rng, mc.n, 16), FlatSource.random(rng, mc.d, size)],
        [[None, seed_flips[0]], [None, seed_flips[mc.d - 1]]], plugin.m, th.multi, strict=False))
    return results


@suite("lookahead")
def lookahead(run: SuiteRun) -> list[SuiteResult]:
    cfg = AltExtCfg.create(LOOKAHEAD_STEPS, LOOKAHEAD_BITS, LOOKAHEAD_BITS, LOOKAHEAD_BITS - 1, 2)
    ws = list(all_strings(LOOKAHEAD_BITS))
    qs = FlatSource.random(run.rng, LOOKAHEAD_BITS, min(64, 4 * run.budget)).ordered()
    library = tamperer_library(LOOKAHEAD_BITS)
    # a flip inside the first message, the flip outside it, the complement and the random cycle
    tamperers = [library[0], library[LOOKAHEAD_BITS - 1], library[LOOKAHEAD_BITS], library[-1]]
    honest = {q: [la_ext_prefix(cfg, w, q) for w in ws] for q in qs}
    results = []
    for flip in tamperers:
        counts = [Counter() for _ in range(cfg.steps)]
        for q in qs:
            fq = flip(q)
            for w, rs in zip(ws, honest[q]):
                rs_t = la_ext_prefix(cfg, w, fq)
                for j, table in enumerate(counts):
                    table[(rs[j], *rs[:j], *rs_t[:j], q, fq)] += 1
        for j, table in enumerate(counts):
            sd = nm_distance(JointDist.from_counts(table, 3 + 2 * j), cfg.r)
            results.append(_result("lookahead", sd, sd <= run.thresholds.lookahead,
                                   str(run.thresholds.lookahead), step=j + 1, tamperers=[flip.name]))
    return results


@suite("strongness")
def strongness(run: SuiteRun) -> list[SuiteResult]:
    rng, th = run.rng, run.thresholds
    size = max(2, run.budget)
    snm = toy_seeded_cfg()
    nm2 = toy_two_source_cfg()
    cases = [
        ("snm", lambda x, y: snm_extract(snm, x, y), lambda x, y: snm_extract(snm, x, y, control=True),
         [FlatSource.random(rng, snm.n, 16), FlatSource.random(rng, snm.d, size)],
         [None, tamperer_library(snm.d)[snm.d - 1]], snm.out, th.snm),
        ("nm2", lambda x, y: nm2_extract(nm2, x, y), lambda x, y: nm2_extract(nm2, x, y, control=True),
         [FlatSource.random(rng, nm2.n, 8), FlatSource.random(rng, nm2.n, size)],
         [tamperer_library(nm2.n)[nm2.n1 + nm2.n3], None], nm2.out, th.nm2),
    ]
    results = []
    for name, ext, control, sources, tampering, m, margin in cases:
        strong, plain = strongness_gap(ext, sources, tampering, (1,), m)
        control_strong, _ = strongness_gap(control, sources, tampering, (1,), m)
        reference, _ = strongness_gap(random_function(m), sources, tampering, (1,), m)
        limit = reference + _margin(margin)
        passed = strong <= limit and strong < control_strong
        results.append(_result(name, strong, passed, f"{float(limit):.4f}", plain=str(plain),
                               control=str(control_strong), reference=str(reference),
                               tamperers=_names(tampering)))
    return results


@suite("advgen-collision")
def advgen_collision(run: SuiteRun) -> list[SuiteResult]:
    cfg = AdvGenCfg.create(16, 12, 4, 4)
    design = Fraction(cfg.code.n0 - 1, cfg.code.n)
    limit = design * Fraction(run.thresholds.collision_slack).limit_denominator(1000)
    xs = [BitString(int(v), cfg.n) for v in run.rng.choice(1 << cfg.n, size=min(run.budget, 1 << cfg.n),
                                                            replace=False)]
    results = []
    for flip in tamperer_library(cfg.d)[:cfg.d]:
        collisions = 0
        for y in all_strings(cfg.d):
            y_t = flip(y)
            collisions += sum(adv_gen(cfg, x, y)[0] == adv_gen(cfg, x, y_t)[0] for x in xs)
        rate = Fraction(collisions, len(xs) << cfg.d)
        results.append(_result("adv-gen", rate, rate <= limit, str(limit), n=cfg.n, d=cfg.d,
                               tamperers=[flip.name]))
    return results


@suite("codec-roundtrip")
def codec_roundtrip(run: SuiteRun) -> list[SuiteResult]:
    cfg = CodecCfg(toy_two_source_cfg())
    results = []
    for msg in all_strings(cfg.m):
        failures = sum(decode(cfg, encode(cfg, msg, run.rng)) != msg for _ in range(run.budget))
        results.append(_result("codec", Fraction(failures), failures == 0, "0", n=cfg.n, m=cfg.m,
                               message=msg.to_hex(), encodings=run.budget))
    return results


@suite("encoder-uniformity")
def encoder_uniformity(run: SuiteRun) -> list[SuiteResult]:
    cfg = CodecCfg(toy_two_source_cfg())
    nm = cfg.nm2
    tails = 1 << (nm.w * (nm.t_var - nm.count))
    results = []
    for msg in all_strings(cfg.m):
        prefix = draw_prefix(cfg, run.rng)
        positions = list(prefix.positions)
        fiber = [y4 for y4 in all_strings(nm.n4) if iext_extract(nm.iext, y4, prefix.v) == msg]
        index = {y4: i for i, y4 in enumerate(fiber)}
        defects = abs(len(fiber) - (1 << (nm.n4 - cfg.m)))
        for y4 in fiber[:run.budget]:
            head = prefix.y3.concat(y4)
            fits = sum(sampled_symbols(nm, head.concat(y5), positions) == prefix.y_tilde
                       for y5 in all_strings(nm.n5))
            defects += fits != tails
        cells = np.zeros(FIBER_CELLS, dtype=np.int64)
        for _ in range(CHI_SQUARE_PER_CELL * FIBER_CELLS * run.budget):
            codeword, _ = complete(cfg, prefix, msg, run.rng)
            xs, ys = split(nm, codeword.left), split(nm, codeword.right)
            if (ys.fourth not in index or sampled_symbols(nm, ys.second, positions) != prefix.y_tilde
                    or sampled_symbols(nm, xs.second, positions) != prefix.x_tilde):
                defects += 1
                continue
            cells[index[ys.fourth] % FIBER_CELLS] += 1
        p_value = float(chisquare(cells).pvalue) if cells.sum() else 0.0
        passed = defects == 0 and p_value > run.thresholds.chi_square_p
        results.append(_result("encoder", Fraction(defects), passed, f"2^{nm.n4 - cfg.m}", message=msg.to_hex(),
                               fiber=len(fiber), p_value=f"{p_value:.4f}", encodings=int(cells.sum())))
    return results


@suite("codec-tamper")
def codec_tamper(run: SuiteRun) -> list[SuiteResult]:
    cfg = CodecCfg(toy_two_source_cfg())
    nm = cfg.nm2
    ones = (1 << cfg.n) - 1
    pairs = [
        ("constant", Tamperer("constant", cfg.n, lambda v: ones, fixed_point_free=False),
         Tamperer("constant", cfg.n, lambda v: 0, fixed_point_free=False)),
        ("identity", identity(cfg.n), identity(cfg.n)),
        ("flip-x1", tamperer_library(cfg.n)[0], identity(cfg.n)),
        ("flip-y4", identity(cfg.n), tamperer_library(cfg.n)[nm.n1 + nm.n3]),
    ]
    results = []
    for name, f, g in pairs:
        histograms = {msg: tamper_experiment(cfg, msg, f, g, run.budget, run.rng) for msg in all_strings(cfg.m)}
        sd = simulation_distance(histograms)
        results.append(_result("codec", sd, sd <= run.thresholds.tamper, str(run.thresholds.tamper),
                               tamperers=[f.name, g.name], case=name))
    return results


@suite("planner-ledger")
def planner_ledger(run: SuiteRun) -> list[SuiteResult]:
    eps = Fraction(1, 1 << 20)
    shipped = [
        ("seeded-nm", dict(n=1 << 23, k=1 << 23)),
        ("two-source-nm", dict(n=1 << 30, k=1 << 30)),
        ("multi", dict(n=1 << 26, k=1 << 26, t=2)),
    ]
    results = []
    for profile, kwargs in shipped:
        plan = plan_params(kwargs.pop("n"), kwargs.pop("k"), eps, profile, "strict", **kwargs)
        failing = [check.name for check in plan.checks if not check.holds]
        results.append(_result(profile, Fraction(len(failing)), not failing, "0", n=plan.n,
                               checks=len(plan.checks)))
    try:
        plan_params(4, 4, Fraction(1, 4), "two-source-nm", "structural")
        results.append(_result("infeasible", Fraction(1), False, "Infeasible"))
    except Infeasible as error:
        results.append(_result("infeasible", Fraction(0), bool(error.inequality), "Infeasible",
                               inequality=error.inequality))
    return results


def run_suite(name: str, budget: int, seed: int = 0, thresholds: Thresholds | None = None) -> VerifyReport:
    """
    The run_suite function runs one verification suite and collects its report.

    :param name: str: Registered suite name
    :param budget: int: Work budget; 0 yields an empty report
    :param seed: int: Seed of the suite's random generator
    :param thresholds: Thresholds | None: Regression pins, defaults when omitted
    :return: The report
    """
    if name not in SUITES:
        raise RangeError(f"unknown suite {name!r}")
    report = VerifyReport(suite=name, budget=budget)
    if budget <= 0:
        report.warnings.append("budget 0: nothing was run")
        logger.warning(f"suite {name}: budget 0, nothing run")
        return report
    run = SuiteRun(budget, np.random.default_rng(seed), thresholds or Thresholds())
    report.results.extend(SUITES[name](run))
    logger.info(f"suite {name}: {sum(r.passed for r in report.results)}/{len(report.results)} passed")
    return report
