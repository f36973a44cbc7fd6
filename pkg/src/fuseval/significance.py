"""Paired significance tests over per-topic metric values.

Both tests are two-sided. The Wilcoxon signed-rank test is computed exactly
(full null distribution over sign assignments, honouring tied average ranks)
up to 25 nonzero differences, and by a tie-corrected, continuity-corrected
normal approximation beyond that. Note the IR literature documents doubts
about Wilcoxon's suitability for retrieval experiments; callers should
surface that caveat alongside its output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betainc, ndtr

from .errors import MisalignedTopics, TooFewPairs

WILCOXON_EXACT_LIMIT = 25
WILCOXON_CAVEAT = (
    "the Wilcoxon signed-rank test has been argued to be unsuitable for IR evaluation"
)


@dataclass(frozen=True)
class PairedSample:
    """Topic-aligned (baseline, treatment) value pairs for one metric."""

    metric_id: str
    topics: tuple[str, ...]
    baseline: tuple[float, ...]
    treatment: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.topics) == len(self.baseline) == len(self.treatment)):
            raise MisalignedTopics("topics, baseline and treatment must align")
        if len(set(self.topics)) != len(self.topics):
            raise MisalignedTopics("duplicate topic ids in sample")
        if len(self.topics) < 2:
            raise TooFewPairs("need at least 2 pairs")

    def diffs(self) -> list[float]:
        return [t - b for b, t in zip(self.baseline, self.treatment)]

    @classmethod
    def from_reports(cls, metric_id, baseline_values, treatment_values):
        """Build from two topic -> value maps, intersected on shared topics."""
        topics = tuple(sorted(set(baseline_values) & set(treatment_values)))
        return cls(
            metric_id=metric_id,
            topics=topics,
            baseline=tuple(baseline_values[t] for t in topics),
            treatment=tuple(treatment_values[t] for t in topics),
        )


@dataclass(frozen=True)
class TestResult:
    test_id: str
    statistic: float
    p_value: float
    n_effective: int
    degenerate: bool = False
    caveat: str = ""

    def as_dict(self) -> dict:
        return {
            "test_id": self.test_id,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_effective": self.n_effective,
            "degenerate": self.degenerate,
            "caveat": self.caveat,
        }


def paired_t_test(sample: PairedSample) -> TestResult:
    """Two-tailed paired t-test on treatment - baseline differences."""
    d = sample.diffs()
    n = len(d)
    mean = sum(d) / n
    if max(d) == min(d):  # zero variance, regardless of rounding in `mean`
        if d[0] == 0.0:
            return TestResult("t_test", 0.0, 1.0, n, degenerate=True)
        stat = math.inf if d[0] > 0 else -math.inf
        return TestResult("t_test", stat, 0.0, n, degenerate=True)
    var = sum((x - mean) ** 2 for x in d) / (n - 1)
    sd = math.sqrt(var)
    t = mean / (sd / math.sqrt(n))
    nu = n - 1
    p = float(betainc(nu / 2.0, 0.5, nu / (nu + t * t)))
    return TestResult("t_test", t, min(max(p, 0.0), 1.0), n)


def _exact_wilcoxon_p(ranks: list[float], w_plus: float) -> float:
    """Two-sided p by enumerating the null distribution of W+ over sign patterns.

    Works on doubled ranks so tied average ranks stay integral; a dynamic
    program over achievable sums is equivalent to the full 2^n enumeration.
    """
    doubled = [round(2 * r) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total - r, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
    n_patterns = 1 << len(ranks)
    w2 = round(2 * w_plus)
    ge = sum(counts[w2:])
    le = sum(counts[: w2 + 1])
    p = 2 * min(ge, le) / n_patterns
    return min(p, 1.0)


def wilcoxon_signed_rank(sample: PairedSample) -> TestResult:
    """Two-sided Wilcoxon signed-rank test with zero-difference removal."""
    d = [x for x in sample.diffs() if x != 0.0]
    n = len(d)
    if n == 0:
        return TestResult("wilcoxon", 0.0, 1.0, 0, degenerate=True, caveat=WILCOXON_CAVEAT)
    # average ranks of |d| with ties sharing the mean rank
    order = sorted(range(n), key=lambda i: abs(d[i]))
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(d[order[j + 1]]) == abs(d[order[i]]):
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    w_plus = sum(r for r, x in zip(ranks, d) if x > 0)
    if n <= WILCOXON_EXACT_LIMIT:
        p = _exact_wilcoxon_p(ranks, w_plus)
    else:
        mean = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        # tie correction over groups of equal |d|
        i = 0
        sorted_abs = sorted(abs(x) for x in d)
        while i < n:
            j = i
            while j + 1 < n and sorted_abs[j + 1] == sorted_abs[i]:
                j += 1
            t = j - i + 1
            var -= (t ** 3 - t) / 48.0
            i = j + 1
        sd = math.sqrt(var)
        if sd == 0.0:
            return TestResult("wilcoxon", w_plus, 1.0, n, degenerate=True, caveat=WILCOXON_CAVEAT)
        # continuity correction of 0.5 toward the mean
        delta = w_plus - mean
        if delta > 0:
            z = (delta - 0.5) / sd
        elif delta < 0:
            z = (delta + 0.5) / sd
        else:
            z = 0.0
        p = float(2 * (1 - ndtr(abs(z))))
        p = min(p, 1.0)
    return TestResult("wilcoxon", w_plus, p, n, caveat=WILCOXON_CAVEAT)


TESTS = {
    "t_test": paired_t_test,
    "wilcoxon": wilcoxon_signed_rank,
}


def significance_marker(p_value: float) -> str:
    """Publication marker: dagger below 0.05, double dagger below 0.01."""
    if p_value < 0.01:
        return "‡"
    if p_value < 0.05:
        return "†"
    return ""
