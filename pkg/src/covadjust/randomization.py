"""Monte Carlo audit of baseline imbalance in randomized two-arm trials.

Each simulated trial draws subjects from a `CovarianceSpec` whose first
variable is the outcome and the rest are baseline covariates, then assigns
exactly half of them to treatment by random permutation. Covariates are
compared between arms with a pooled two-sample t-test. Because assignment
is random, every rejection is a false positive, so the rejection rate sits
at alpha.

`replication_study` adds a treatment effect to the outcome and estimates
it under one of three covariate policies, to show how reacting to chance
imbalance changes the fitted model from one replication to the next.

Replication ``i`` is seeded with ``seed + i``. Summaries are computed from
the collected per-replication records, so they do not depend on the order
replications were run in.
"""

import enum
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import ConfigError
from .regression import DesignSpec, fit_ols
from .simulate import CovarianceSpec, UINT64_MASK, draw_mvn, make_rng
from .ttest import two_sample_ttest

ARM = "arm"
OUTCOME = "outcome"


class Policy(enum.Enum):
    NEVER = "never"
    ALWAYS = "always"
    REACTIVE = "reactive"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "never": cls.NEVER, "neveradjust": cls.NEVER,
            "always": cls.ALWAYS, "alwaysadjust": cls.ALWAYS,
            "reactive": cls.REACTIVE, "adjustifimbalanced": cls.REACTIVE,
        }
        try:
            return aliases[key.replace("_", "").replace("-", "")]
        except KeyError:
            raise ConfigError(
                f"unknown policy {value!r}; choose never, always or reactive"
            ) from None


@dataclass(frozen=True)
class TrialConfig:
    n_subjects: int
    covariate_spec: CovarianceSpec
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        n = self.n_subjects
        if int(n) != n or n < 4 or n % 2:
            raise ConfigError(f"n_subjects must be an even integer >= 4, got {n}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= int(self.seed) <= UINT64_MASK:
            raise ConfigError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")
        if self.covariate_spec.dim < 2:
            raise ConfigError("covariate_spec needs an outcome plus at least one covariate")
        clash = {ARM, OUTCOME} & set(self.covariates)
        if clash:
            raise ConfigError(f"covariate names {sorted(clash)} are reserved")

    @property
    def covariates(self):
        return self.covariate_spec.variable_names[1:]

    def replication_seed(self, index):
        return (int(self.seed) + index) & UINT64_MASK


@dataclass(frozen=True)
class ImbalanceResult:
    per_covariate_p: dict
    any_rejected: bool
    group_mean_diff: dict

    def rejected(self, alpha):
        return {nm: p < alpha for nm, p in self.per_covariate_p.items()}


@dataclass(frozen=True)
class RejectionRates:
    replications: int
    per_covariate: dict
    family_wise: float
    mean_abs_imbalance: float


@dataclass(frozen=True)
class ReplicationRecord:
    index: int
    estimate: float
    selected: tuple
    pvalues: dict


@dataclass(frozen=True)
class ReplicationSummary:
    replications: int
    rejection_rate: float
    policy: Policy
    estimate_mean: float
    estimate_sd: float
    mean_abs_imbalance: float
    effect: float
    distinct_models: int
    composition_variability: float
    records: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self):
        return {
            "replications": self.replications,
            "rejection_rate": self.rejection_rate,
            "policy": self.policy.value,
            "effect": self.effect,
            "estimate_mean": self.estimate_mean,
            "estimate_sd": self.estimate_sd,
            "mean_abs_imbalance": self.mean_abs_imbalance,
            "distinct_models": self.distinct_models,
            "composition_variability": self.composition_variability,
        }


def _draw(cfg, rng):
    n = cfg.n_subjects
    data = draw_mvn(cfg.covariate_spec, n, rng)
    arm = np.zeros(n)
    arm[rng.permutation(n)[: n // 2]] = 1.0
    treated = arm == 1.0
    pvals, diffs = {}, {}
    for j, name in enumerate(cfg.covariates, start=1):
        res = two_sample_ttest(data[treated, j], data[~treated, j])
        pvals[name] = res.pvalue
        diffs[name] = res.mean_diff
    result = ImbalanceResult(
        per_covariate_p=pvals,
        any_rejected=any(p < cfg.alpha for p in pvals.values()),
        group_mean_diff=diffs,
    )
    return data, arm, result


def simulate_trial(cfg):
    """One randomized trial: baseline t-tests of every covariate by arm."""
    return _draw(cfg, make_rng(cfg.seed))[2]


def _mean_abs(result):
    return float(np.mean([abs(v) for v in result.group_mean_diff.values()]))


def imbalance_rejection_rate(cfg, replications):
    """Per-covariate and family-wise baseline rejection rates at ``cfg.alpha``."""
    if replications < 100:
        raise ConfigError("replications must be at least 100")
    results = [
        _draw(cfg, make_rng(cfg.replication_seed(i)))[2] for i in range(replications)
    ]
    per = {
        nm: float(np.mean([r.per_covariate_p[nm] < cfg.alpha for r in results]))
        for nm in cfg.covariates
    }
    return RejectionRates(
        replications=replications,
        per_covariate=per,
        family_wise=float(np.mean([r.any_rejected for r in results])),
        mean_abs_imbalance=float(np.mean([_mean_abs(r) for r in results])),
    )


def _one_replication(cfg, effect, policy, index):
    data, arm, imb = _draw(cfg, make_rng(cfg.replication_seed(index)))
    covs = cfg.covariates
    if policy is Policy.NEVER:
        selected = ()
    elif policy is Policy.ALWAYS:
        selected = tuple(covs)
    else:
        selected = tuple(nm for nm in covs if imb.per_covariate_p[nm] < cfg.alpha)
    outcome = effect * arm + data[:, 0]
    columns = {OUTCOME: outcome, ARM: arm}
    for nm in selected:
        columns[nm] = data[:, 1 + covs.index(nm)]
    fit = fit_ols(Dataset.from_columns(columns), DesignSpec(OUTCOME, (ARM, *selected)))
    record = ReplicationRecord(
        index=index,
        estimate=fit.coefficients[ARM],
        selected=selected,
        pvalues=dict(imb.per_covariate_p),
    )
    return record, imb


def _run_block(cfg, effect, policy, indices):
    return [_one_replication(cfg, effect, policy, i) for i in indices]


def replication_study(cfg, effect, policy, replications, workers=None):
    """Estimate the arm effect across independent replications under `policy`.

    The outcome is ``effect * arm`` plus the first variable of `covariate_spec`, so
    the covariates enter through its outcome row. Under ``REACTIVE``
    a covariate joins the model only when its baseline test rejected.
    With ``workers > 1`` replications are split across processes; the
    result is identical to a serial run.
    """
    policy = Policy.parse(policy)
    if replications < 100:
        raise ConfigError("replications must be at least 100")
    if not workers or workers <= 1:
        pairs = _run_block(cfg, effect, policy, range(replications))
    else:
        blocks = np.array_split(np.arange(replications), workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, cfg, effect, policy, [int(i) for i in blk])
                for blk in blocks if blk.size
            ]
            pairs = [pr for fut in futures for pr in fut.result()]
    return summarize(effect, policy, pairs)


def summarize(effect, policy, pairs):
    """Aggregate ``(ReplicationRecord, ImbalanceResult)`` pairs, order-free."""
    pairs = sorted(pairs, key=lambda pr: pr[0].index)
    records = tuple(rec for rec, _ in pairs)
    estimates = np.array([rec.estimate for rec in records])
    models = Counter(rec.selected for rec in records)
    modal_share = models.most_common(1)[0][1] / len(records)
    return ReplicationSummary(
        replications=len(records),
        rejection_rate=float(np.mean([imb.any_rejected for _, imb in pairs])),
        policy=policy,
        estimate_mean=float(estimates.mean()),
        estimate_sd=float(estimates.std(ddof=1)),
        mean_abs_imbalance=float(np.mean([_mean_abs(imb) for _, imb in pairs])),
        effect=float(effect),
        distinct_models=len(models),
        composition_variability=1.0 - modal_share,
        records=records,
    )
