"""Seeded random frames and mechanical checks of the theorems.

Every trial draws one frame from a :class:`GenConfig`, computes the measured
ratios once, and checks each theorem against them exactly.  A theorem whose
hypotheses fail on the frame is Skipped, never counted as holding.

Campaigns also look for frames showing that hypotheses matter: a
correlated X, A frame whose associative and causal ratios differ, a frame
with non-fresh R whose causal ratio exceeds its noninterference ratio, and a
frame whose associative ratio strictly exceeds its posterior/prior ratio.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from fractions import Fraction

from caudit.checkers import (
    check_assoc_independence,
    check_assoc_independence_on_X,
    check_causal_irrelevance,
    check_noninterference,
    interventional_dists,
    measure_noninterference,
    ratio_text,
)
from caudit.errors import InvalidConfig
from caudit.frames import AnalysisFrame
from caudit.impossibility import (
    WITNESS_FOR_EVERY_OUTPUT,
    ImpossibilityViolation,
    classify_impossibility,
    classify_openness,
    is_informative,
    realizable_outputs,
)
from caudit.inference import ONE, distribution, independent, is_fresh, ratio_bound, within
from caudit.mechlib import assemble_frame
from caudit.prop import Not, Proposition, conj, disj, eq, ne
from caudit.scm import BackgroundDist, Domain

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Steele, Lea and Flood's SplitMix64 with the standard published constants."""

    NAME = "splitmix64"
    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    domain_size_range: tuple[int, int] = (2, 4)
    num_other_inputs: tuple[int, int] = (0, 2)
    correlate_x_a: bool = False
    randomized: bool = False
    fresh_r: bool = True
    max_denominator: int = 12

    def validate(self) -> GenConfig:
        lo, hi = self.domain_size_range
        if not 2 <= lo <= hi <= 4:
            raise InvalidConfig(f"domain_size_range must lie within [2, 4], got {self.domain_size_range}")
        lo, hi = self.num_other_inputs
        if not 0 <= lo <= hi <= 2:
            raise InvalidConfig(f"num_other_inputs must lie within [0, 2], got {self.num_other_inputs}")
        if self.max_denominator < 1:
            raise InvalidConfig("max_denominator must be positive")
        if not 0 <= self.seed <= MASK64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")
        return self

    @property
    def label(self) -> str:
        parts = ["corr" if self.correlate_x_a else "indep"]
        if self.randomized:
            parts.append("fresh-R" if self.fresh_r else "shared-R")
        else:
            parts.append("det")
        return "/".join(parts)


def _block(rng: SplitMix64, keys: list[tuple], n: int) -> dict[tuple, Fraction]:
    """Drop n unit weights on random keys: every probability is i/n."""
    w = [0] * len(keys)
    for _ in range(n):
        w[rng.below(len(keys))] += 1
    return {k: Fraction(c, n) for k, c in zip(keys, w) if c}


def generate_frame(cfg: GenConfig) -> AnalysisFrame:
    """Random canonical frame; identical config (seed included) gives an identical frame.

    Background variables are drawn in independent blocks: X alone, the A's
    jointly, and R alone when fresh.  A correlated config puts X and the A's
    in one block; a non-fresh R joins the A block (or X's block when there is
    no A).  Each block's probabilities are multiples of 1/n for some
    n <= max_denominator.
    """
    cfg.validate()
    rng = SplitMix64(cfg.seed)
    lo, hi = cfg.domain_size_range

    def dom(name):
        return Domain(name, tuple(str(i) for i in range(rng.randint(lo, hi))))

    def denom():
        return rng.randint(min(2, cfg.max_denominator), cfg.max_denominator)

    x_dom = dom("DX")
    n_a = rng.randint(*cfg.num_other_inputs)
    if cfg.correlate_x_a and n_a == 0 and cfg.num_other_inputs[1] > 0:
        n_a = 1
    others = [(f"A{j}", dom(f"DA{j}")) for j in range(1, n_a + 1)]
    r_dom = dom("DR") if cfg.randomized else None
    o_dom = dom("DO")

    blocks: list[list[tuple[str, Domain]]]
    x_block = [("X", x_dom)]
    a_block = list(others)
    if cfg.correlate_x_a:
        x_block, a_block = x_block + a_block, []
    r_block: list[tuple[str, Domain]] = []
    if r_dom is not None:
        if cfg.fresh_r:
            r_block = [("R", r_dom)]
        elif a_block:
            a_block.append(("R", r_dom))
        else:
            x_block.append(("R", r_dom))
    blocks = [b for b in (x_block, a_block, r_block) if b]

    support: dict[tuple, Fraction] = {(): Fraction(1)}
    names: list[str] = []
    for b in blocks:
        keys = list(itertools.product(*(d.values for _, d in b)))
        part = _block(rng, keys, denom())
        support = {k + k2: p * q for k, p in support.items() for k2, q in part.items()}
        names += [v for v, _ in b]
    dist = BackgroundDist(tuple(names), support)

    inputs = ["Xh"] + [f"{a}h" for a, _ in others] + (["R"] if r_dom else [])
    mode = rng.below(8)
    if mode == 0:
        reads = []
    elif mode <= 2:
        reads = inputs[1:]
    else:
        reads = inputs
    sizes = {"Xh": len(x_dom), "R": len(r_dom) if r_dom else 0}
    sizes.update({f"{a}h": len(d) for a, d in others})
    combos = list(itertools.product(*(range(sizes[n]) for n in reads)))
    if r_dom is not None and "R" in reads and rng.below(4) == 0:
        # additive noise: finite noninterference ratios whenever R has full support
        table = {c: o_dom.values[sum(c) % len(o_dom)] for c in combos}
    else:
        table = {c: o_dom.values[rng.below(len(o_dom))] for c in combos}

    def system(*vals):
        return table[tuple(int(v) for v in vals)]

    return assemble_frame(x_dom, others, r_dom, o_dom, system, dist, reads=reads)


# -- propositions ------------------------------------------------------------


def background_atoms(f: AnalysisFrame) -> list[Proposition]:
    m = f.model
    return [eq(v, val) for v in m.background for val in m.domain(v).values]


def _literal(rng: SplitMix64, atoms: list[Proposition]) -> Proposition:
    a = rng.choice(atoms)
    return ne(a.var, a.value) if rng.below(2) else a


def random_formula(rng: SplitMix64, atoms: list[Proposition], depth: int = 2) -> Proposition:
    if depth == 0:
        return _literal(rng, atoms)
    op = rng.below(5)
    if op == 0:
        return Not(random_formula(rng, atoms, depth - 1))
    left = random_formula(rng, atoms, depth - 1)
    right = random_formula(rng, atoms, rng.below(depth))
    return conj(left, right) if op <= 2 else disj(left, right)


def sample_props(f: AnalysisFrame, rng: SplitMix64, n_random: int = 50) -> list[Proposition]:
    atoms = background_atoms(f)
    return atoms + [random_formula(rng, atoms) for _ in range(n_random)]


# -- theorems ----------------------------------------------------------------


class TheoremId(str, Enum):
    NI_IMPLIES_CI = "NI_IMPLIES_CI"
    INDEP_ASSOC_EQ_CI = "INDEP_ASSOC_EQ_CI"
    EPS_NI_IMPLIES_EPS_CI = "EPS_NI_IMPLIES_EPS_CI"
    ONE_SIDED_COR = "ONE_SIDED_COR"
    EPS_INDEP_ASSOC_EQ_CI = "EPS_INDEP_ASSOC_EQ_CI"
    ASSOC_TO_ASSOCX = "ASSOC_TO_ASSOCX"
    ASSOCX_TO_ASSOC_2EPS = "ASSOCX_TO_ASSOC_2EPS"
    IMPOSS_CLASSIFY = "IMPOSS_CLASSIFY"
    LEMMA_OPEN_DISJ = "LEMMA_OPEN_DISJ"
    LEMMA_OPEN_NEQ = "LEMMA_OPEN_NEQ"


HOLDS, SKIPPED, VIOLATED = "holds", "skipped", "violated"


@dataclass(frozen=True)
class Verdict:
    status: str
    reason: str = ""
    witness: dict | None = None


def _holds():
    return Verdict(HOLDS)


def _skip(reason):
    return Verdict(SKIPPED, reason)


def _violated(reason, **witness):
    return Verdict(VIOLATED, reason, {k: _jsonable(v) for k, v in witness.items()})


def _jsonable(v):
    if isinstance(v, Fraction) or v is ONE:
        return ratio_text(v)
    if isinstance(v, Proposition):
        return str(v)
    try:
        return ratio_text(v)
    except (TypeError, ValueError):
        return v


class FrameFacts:
    """Measured quantities of one frame, computed lazily and shared across theorems."""

    def __init__(self, f: AnalysisFrame, props: list[Proposition] | None = None, rng: SplitMix64 | None = None):
        self.f = f
        self.rng = rng or SplitMix64(0)
        self._props = props
        self._memo = {}

    def _get(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    @property
    def props(self) -> list[Proposition]:
        if self._props is None:
            self._props = sample_props(self.f, self.rng)
        return self._props

    @property
    def fresh(self) -> bool:
        f = self.f
        return self._get("fresh", lambda: f.randomness is None or is_fresh(f.pm, f.randomness, f.r_marginal()))

    @property
    def x_indep_a(self) -> bool:
        return self._get("xa", lambda: independent(self.f.pm, [self.f.sensitive_bg], self.f.other_bg))

    @property
    def x_indep_ar(self) -> bool:
        f = self.f
        rest = list(f.other_bg) + ([f.randomness] if f.randomness else [])
        return self._get("xar", lambda: independent(f.pm, [f.sensitive_bg], rest))

    @property
    def x_positive(self) -> bool:
        f = self.f
        return self._get("xpos", lambda: set(f.pm.dist.marginal(f.sensitive_bg)) == set(f.x_values))

    @property
    def ni(self):
        return self._get("ni", lambda: measure_noninterference(self.f, fresh_required=False).tightest_ratio)

    @property
    def ni_exact(self) -> bool:
        return self._get("ni_exact", lambda: check_noninterference(self.f).holds)

    @property
    def causal(self):
        return self._get("causal", lambda: check_causal_irrelevance(self.f).tightest_ratio)

    @property
    def assoc(self):
        return self._get("assoc", lambda: check_assoc_independence(self.f).tightest_ratio)

    @property
    def assoc_x(self):
        return self._get("assoc_x", lambda: check_assoc_independence_on_X(self.f).tightest_ratio)

    @property
    def do_dists(self):
        return self._get("do", lambda: interventional_dists(self.f))

    @property
    def observed(self):
        return self._get("obs", lambda: distribution(self.f.pm, None, self.f.output))


def _ni_implies_ci(ff: FrameFacts) -> Verdict:
    if not ff.fresh:
        return _skip("R is not fresh")
    if not ff.ni_exact:
        return _skip("system does not have noninterference")
    if ff.causal != ONE:
        return _violated("causal ratio is not 1", causal=ff.causal)
    for x, d in ff.do_dists.items():
        if d != ff.observed:
            return _violated("interventional distribution differs from the observed one", x=x)
    return _holds()


def _indep_assoc_eq_ci(ff: FrameFacts) -> Verdict:
    if not ff.x_indep_ar:
        return _skip("X is not independent of the other background variables")
    if not ff.x_positive:
        return _skip("some sensitive value has zero mass")
    assoc_holds, causal_holds = ff.assoc == ONE, ff.causal == ONE
    if assoc_holds != causal_holds:
        return _violated("associative independence and causal irrelevance disagree",
                         assoc=ff.assoc, causal=ff.causal)
    return _holds()


def _eps_ni_implies_eps_ci(ff: FrameFacts) -> Verdict:
    if not ff.fresh:
        return _skip("R is not fresh")
    if not within(ff.causal, ff.ni):
        return _violated("causal ratio exceeds noninterference ratio", causal=ff.causal, ni=ff.ni)
    return _holds()


def _one_sided(ff: FrameFacts) -> Verdict:
    if not ff.fresh:
        return _skip("R is not fresh")
    for x, d in ff.do_dists.items():
        for o in ff.f.outputs:
            for p, q in ((ff.observed[o], d[o]), (d[o], ff.observed[o])):
                r = ratio_bound(p, q)
                if not within(r, ff.ni):
                    return _violated("observed/interventional ratio exceeds noninterference ratio",
                                     x=x, o=o, p=p, q=q, ni=ff.ni)
    return _holds()


def _eps_indep_assoc_eq_ci(ff: FrameFacts) -> Verdict:
    if not ff.fresh:
        return _skip("R is not fresh")
    if not ff.x_indep_a:
        return _skip("X is not independent of A")
    if not ff.x_positive:
        return _skip("some sensitive value has zero mass")
    if ff.assoc != ff.causal:
        return _violated("associative ratio differs from causal ratio", assoc=ff.assoc, causal=ff.causal)
    return _holds()


def _assoc_to_assocx(ff: FrameFacts) -> Verdict:
    if not within(ff.assoc_x, ff.assoc):
        return _violated("posterior/prior ratio exceeds associative ratio", assoc_x=ff.assoc_x, assoc=ff.assoc)
    return _holds()


def _assocx_to_assoc(ff: FrameFacts) -> Verdict:
    bound = ff.assoc_x ** 2
    if not within(ff.assoc, bound):
        return _violated("associative ratio exceeds the squared posterior/prior ratio",
                         assoc=ff.assoc, assoc_x=ff.assoc_x)
    return _holds()


def _impossibility(ff: FrameFacts) -> Verdict:
    f = ff.f
    for phi in ff.props:
        try:
            c = classify_impossibility(f, phi)
        except ImpossibilityViolation as e:
            return _violated(str(e), phi=phi)
        if c.case == WITNESS_FOR_EVERY_OUTPUT:
            if set(c.verdicts) != set(realizable_outputs(f)):
                return _violated("witness evidence does not cover every realizable output", phi=phi)
    return _holds()


def _open_disj(ff: FrameFacts) -> Verdict:
    pm = ff.f.pm
    props = ff.props
    rng = SplitMix64(ff.rng.next_u64())
    checked = 0
    for _ in range(len(props)):
        phi, psi = rng.choice(props), rng.choice(props)
        if not classify_openness(pm, psi, phi).open:
            continue
        checked += 1
        if not classify_openness(pm, disj(phi, psi), phi).open:
            return _violated("phi open under psi but not under phi | psi", phi=phi, psi=psi)
    return _holds() if checked else _skip("no sampled pair has phi open under psi")


def _open_neq(ff: FrameFacts) -> Verdict:
    f = ff.f
    if not is_informative(f):
        return _skip("system is uninformative")
    outs = realizable_outputs(f)
    checked = 0
    for phi in ff.props:
        if all(classify_openness(f.pm, eq(f.output, o), phi).open for o in outs):
            checked += 1
            for o in outs:
                if not classify_openness(f.pm, ne(f.output, o), phi).open:
                    return _violated("phi open under every O=o but closed under O!=o", phi=phi, o=o)
    return _holds() if checked else _skip("no sampled phi is open under every output")


CHECKS = {
    TheoremId.NI_IMPLIES_CI: _ni_implies_ci,
    TheoremId.INDEP_ASSOC_EQ_CI: _indep_assoc_eq_ci,
    TheoremId.EPS_NI_IMPLIES_EPS_CI: _eps_ni_implies_eps_ci,
    TheoremId.ONE_SIDED_COR: _one_sided,
    TheoremId.EPS_INDEP_ASSOC_EQ_CI: _eps_indep_assoc_eq_ci,
    TheoremId.ASSOC_TO_ASSOCX: _assoc_to_assocx,
    TheoremId.ASSOCX_TO_ASSOC_2EPS: _assocx_to_assoc,
    TheoremId.IMPOSS_CLASSIFY: _impossibility,
    TheoremId.LEMMA_OPEN_DISJ: _open_disj,
    TheoremId.LEMMA_OPEN_NEQ: _open_neq,
}


def check_theorem(tid: TheoremId | str, f: AnalysisFrame | FrameFacts) -> Verdict:
    ff = f if isinstance(f, FrameFacts) else FrameFacts(f)
    return CHECKS[TheoremId(tid)](ff)


# -- campaigns ---------------------------------------------------------------

PRECOND_INDEP = "INDEP_ASSOC_EQ_CI"
PRECOND_FRESH = "EPS_NI_IMPLIES_EPS_CI"


@dataclass
class TrialResult:
    config: int
    trial: int
    seed: int
    verdicts: dict[str, Verdict]
    precondition: list[tuple[str, dict]] = field(default_factory=list)
    dilution: bool = False
    eps_indep_nonfresh: bool | None = None


def trial_seed(cfg: GenConfig, trial: int) -> int:
    rng = SplitMix64(cfg.seed ^ ((trial + 1) * SplitMix64.GAMMA & MASK64))
    return rng.next_u64()


def run_trial(cfg: GenConfig, config_index: int, trial: int) -> TrialResult:
    seed = trial_seed(cfg, trial)
    f = generate_frame(replace(cfg, seed=seed))
    ff = FrameFacts(f, rng=SplitMix64(seed ^ 0xA5A5A5A5A5A5A5A5))
    verdicts = {t.value: CHECKS[t](ff) for t in TheoremId}
    res = TrialResult(config_index, trial, seed, verdicts)
    if not ff.x_indep_a and ff.assoc != ff.causal:
        res.precondition.append((PRECOND_INDEP, {"assoc": ratio_text(ff.assoc), "causal": ratio_text(ff.causal)}))
    if not ff.fresh and not within(ff.causal, ff.ni):
        res.precondition.append((PRECOND_FRESH, {"causal": ratio_text(ff.causal), "ni": ratio_text(ff.ni)}))
    res.dilution = within(ff.assoc_x, ff.assoc) and ff.assoc_x != ff.assoc
    if not ff.fresh and ff.x_indep_a and ff.x_positive:
        res.eps_indep_nonfresh = ff.assoc == ff.causal
    return res


@dataclass
class CampaignReport:
    prng: str
    configs: list[dict]
    trials: int = 0
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    precondition_counterexamples: list[dict] = field(default_factory=list)
    precondition_counts: dict[str, int] = field(default_factory=dict)
    dilution_seed: int | None = None
    dilution_count: int = 0
    eps_indep_nonfresh: dict[str, int] = field(default_factory=lambda: {"holds": 0, "fails": 0})

    MAX_EXAMPLES = 3

    @property
    def expectations_met(self) -> bool:
        return (self.precondition_counts.get(PRECOND_INDEP, 0) > 0
                and self.precondition_counts.get(PRECOND_FRESH, 0) > 0
                and self.dilution_count > 0)

    @property
    def ok(self) -> bool:
        return not self.violations and self.expectations_met

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        lines = [f"prng: {self.prng}", f"trials: {self.trials}", "configs:"]
        lines += [f"  {c['label']} seed={c['seed']}" for c in self.configs]
        lines.append("theorems:")
        for t, c in self.counts.items():
            lines.append(f"  {t:22s} holds={c[HOLDS]:5d} skipped={c[SKIPPED]:5d} violated={c[VIOLATED]:3d}")
        lines.append(f"violations: {len(self.violations)}")
        for v in self.violations:
            lines.append(f"  [{self.configs[v['config']]['label']}] seed={v['seed']} {v['theorem']}: "
                         f"{v['reason']} {v['witness']}")
        lines.append("precondition counterexamples:")
        for kind in (PRECOND_INDEP, PRECOND_FRESH):
            lines.append(f"  {kind}: {self.precondition_counts.get(kind, 0)} found")
        for p in self.precondition_counterexamples:
            label = self.configs[p["config"]]["label"]
            lines.append(f"    [{label}] seed={p['seed']} {p['theorem']} {p['witness']}")
        lines.append(f"dilution (assoc-x < assoc): {self.dilution_count} found"
                     + (f", first seed={self.dilution_seed}" if self.dilution_seed is not None else ""))
        e = self.eps_indep_nonfresh
        lines.append(f"EPS_INDEP_ASSOC_EQ_CI without freshness (data only): holds={e['holds']} fails={e['fails']}")
        lines.append(f"result: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def default_grid(seed: int = 0) -> list[GenConfig]:
    rng = SplitMix64(seed)
    shapes = [
        dict(),
        dict(correlate_x_a=True),
        dict(randomized=True),
        dict(randomized=True, correlate_x_a=True),
        dict(randomized=True, fresh_r=False),
        dict(randomized=True, fresh_r=False, correlate_x_a=True),
    ]
    return [GenConfig(seed=rng.next_u64(), **s) for s in shapes]


def full_grid(seed: int = 0) -> list[GenConfig]:
    rng = SplitMix64(seed)
    out = []
    for corr, rand, fresh, size in itertools.product((False, True), (False, True), (True, False),
                                                     ((2, 2), (2, 4), (4, 4))):
        if not rand and not fresh:
            continue
        out.append(GenConfig(seed=rng.next_u64(), correlate_x_a=corr, randomized=rand, fresh_r=fresh,
                             domain_size_range=size))
    return out


def _run_chunk(args):
    cfg, idx, trials = args
    return [run_trial(cfg, idx, t) for t in trials]


def run_campaign(cfg_space: list[GenConfig], trials_per_cfg: int | list[int], jobs: int = 1) -> CampaignReport:
    """Run trials for every config; the report does not depend on ``jobs``."""
    counts_per = [trials_per_cfg] * len(cfg_space) if isinstance(trials_per_cfg, int) else list(trials_per_cfg)
    if any(n < 0 for n in counts_per) or len(counts_per) != len(cfg_space):
        raise InvalidConfig("trial counts must be nonnegative, one per config")
    for c in cfg_space:
        c.validate()
    tasks = []
    for i, (cfg, n) in enumerate(zip(cfg_space, counts_per)):
        for start in range(0, n, 25):
            tasks.append((cfg, i, list(range(start, min(n, start + 25)))))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_run_chunk, tasks))
    else:
        chunks = [_run_chunk(t) for t in tasks]
    results = sorted((r for ch in chunks for r in ch), key=lambda r: (r.config, r.trial))

    report = CampaignReport(SplitMix64.NAME,
                            [{"label": c.label, **asdict(c)} for c in cfg_space],
                            counts={t.value: {HOLDS: 0, SKIPPED: 0, VIOLATED: 0} for t in TheoremId})
    for r in results:
        report.trials += 1
        for t, v in r.verdicts.items():
            report.counts[t][v.status] += 1
            if v.status == VIOLATED:
                report.violations.append({"config": r.config, "seed": r.seed, "theorem": t,
                                          "reason": v.reason, "witness": v.witness})
        for kind, w in r.precondition:
            n = report.precondition_counts.get(kind, 0)
            if n < report.MAX_EXAMPLES:
                report.precondition_counterexamples.append({"config": r.config, "seed": r.seed, "theorem": kind,
                                                            "witness": w})
            report.precondition_counts[kind] = n + 1
        if r.dilution:
            report.dilution_count += 1
            if report.dilution_seed is None:
                report.dilution_seed = r.seed
        if r.eps_indep_nonfresh is not None:
            report.eps_indep_nonfresh["holds" if r.eps_indep_nonfresh else "fails"] += 1
    return report


def split_trials(total: int, n_configs: int) -> list[int]:
    """Spread ``total`` trials over configs, earlier configs taking the remainder."""
    base, extra = divmod(total, n_configs)
    return [base + (i < extra) for i in range(n_configs)]
