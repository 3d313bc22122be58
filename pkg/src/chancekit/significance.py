"""Significance statistics for contingency tables.

Two families of chi-squared style statistics are provided next to the
classical full-table tests.  The single-row (or single-column) goodness-of-fit
statistic sums squared margin-expected deviations over the positive
prediction (or positive real class) only.  The evenness-scaled family turns
the chance-corrected association measures directly into test statistics:

    K * n * B^2 * evenness_r        (informedness based)
    K * n * M^2 * evenness_p        (markedness based)
    K * n * B * M * evenness_g      (combined)

their (K-1)-scaled variants, and the margin-free conventional forms
(K-1) * n * {B^2, M^2, B*M}.  These are deliberately conservative relative to
the full-table statistic; for a 2x2 table the full statistic is exactly
n * B * M.

Exact inference is available through the 2x2 hypergeometric test and a
fixed-margin permutation sampler for K x K tables.  Tail probabilities of the
chi-squared family come from the regularized incomplete gamma function, which
is evaluated by series expansion for small arguments and by continued
fraction for large ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaincc, gammaln

from .contingency import ContingencyTable, margins, normalize, require_positive_margins
from .errors import DataError, UsageError
from .multiclass import (
    bookmaker_informedness,
    evenness_variants,
    multiclass_markedness,
    mutual_information,
)

__all__ = [
    "SignificanceReport",
    "PosthocCalibration",
    "FAMILY_KINDS",
    "chi2_sf",
    "chi2_positive",
    "g2_positive",
    "chi2_bookmaker_family",
    "full_table_tests",
    "cramers_v",
    "fisher_exact_2x2",
    "fisher_montecarlo_kxk",
    "williams_correction",
    "posthoc_calibration",
]

FAMILY_KINDS = (
    "kb", "km", "kbm",
    "xb", "xm", "xbm",
    "conv_b", "conv_m", "conv_bm",
)

_POSITIVE_TARGETS = ("predicted_positive", "real_positive")
_WILLIAMS_MODES = ("goodness_of_fit", "independence")


@dataclass(frozen=True)
class SignificanceReport:
    """One test statistic with the dual degree-of-freedom bookkeeping.

    df is the degree count actually used for p_value.  df_alpha carries the
    full-table (K-1)^2 reading and df_beta the single-margin K-1 reading so a
    caller can re-derive the tail probability under either convention.  For
    the exact tests value is the p-value itself and df bookkeeping is moot.
    """

    kind: str
    value: float
    df: int
    p_value: float
    n: int
    df_alpha: int
    df_beta: int
    corrections: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PosthocCalibration:
    """Posterior error bounds implied by an observed p-value."""

    p: float
    l_bound: float
    alpha_post: float
    beta_post: float


def chi2_sf(x: float, r: int) -> float:
    """Survival function of the chi-squared distribution with r degrees.

    Equals the regularized upper incomplete gamma function Q(r/2, x/2);
    absolute error stays below 1e-10 across the supported range.
    """
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise UsageError(f"degrees of freedom must be a positive integer, got {r!r}")
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise UsageError(f"statistic must be finite and non-negative, got {x}")
    return float(gammaincc(r / 2.0, x / 2.0))


def _report(kind: str, value: float, df: int, n: int, k: int,
            corrections: frozenset[str] = frozenset()) -> SignificanceReport:
    return SignificanceReport(
        kind=kind,
        value=float(value),
        df=df,
        p_value=chi2_sf(max(float(value), 0.0), df),
        n=n,
        df_alpha=(k - 1) ** 2,
        df_beta=k - 1,
        corrections=corrections,
    )


def _positive_cells(t: ContingencyTable, target: str):
    """Observed and expected counts along the positive row or column."""
    if t.k != 2:
        raise UsageError("single-margin statistics are defined for 2x2 tables")
    if target not in _POSITIVE_TARGETS:
        raise UsageError(f"unknown target '{target}'")
    require_positive_margins(t)
    c = t.counts.astype(float)
    n = t.n
    m = margins(t)
    expected = n * np.outer(m.bias, m.prevalence)
    if target == "predicted_positive":
        observed = c[0, :]
        exp = expected[0, :]
    else:
        observed = c[:, 0]
        exp = expected[:, 0]
    return observed, exp, n


def chi2_positive(
    t: ContingencyTable, target: str = "predicted_positive", yates: bool = False
) -> SignificanceReport:
    """Goodness-of-fit statistic over the positive prediction row (or the
    positive real-class column), df = 1.

    With yates=True the absolute deviation of any cell whose expectation
    falls below 5 is shrunk by 0.5 before squaring (a continuity correction,
    off by default).
    """
    observed, expected, n = _positive_cells(t, target)
    value = 0.0
    corrected = False
    for o, e in zip(observed, expected):
        dev = abs(o - e)
        if yates and e < 5.0:
            dev = max(dev - 0.5, 0.0)
            corrected = True
        value += dev * dev / e
    kind = "chi2_plus_p" if target == "predicted_positive" else "chi2_plus_r"
    corrections = frozenset({"yates"}) if corrected else frozenset()
    return _report(kind, value, 1, n, t.k, corrections)


def g2_positive(
    t: ContingencyTable, target: str = "predicted_positive"
) -> SignificanceReport:
    """Log-likelihood twin of chi2_positive (0 * log 0 counts as 0), df = 1."""
    observed, expected, n = _positive_cells(t, target)
    total = 0.0
    for o, e in zip(observed, expected):
        if o > 0.0:
            total += o * math.log(o / e)
    kind = "g2_plus_p" if target == "predicted_positive" else "g2_plus_r"
    return _report(kind, 2.0 * total, 1, n, t.k, frozenset())


def chi2_bookmaker_family(t: ContingencyTable, kind: str) -> SignificanceReport:
    """Evenness-scaled significance statistics of the chance-corrected
    association measures (see the module docstring for the forms).

    The kb/km/kbm statistics use df = K-1 for the p-value; their xb/xm/xbm
    variants are (K-1) times larger and use df = (K-1)^2; the conv forms drop
    the evenness factor and use df = K-1.  The combined (b*m) statistics can
    go negative when informedness and markedness disagree in sign for K > 2;
    the tail probability is then 1 by construction.
    """
    kind = kind.lower()
    if kind not in FAMILY_KINDS:
        raise UsageError(f"unknown family kind '{kind}'")
    require_positive_margins(t)
    k = t.k
    n = t.n
    b = bookmaker_informedness(t)
    m = multiclass_markedness(t)
    ev = evenness_variants(t)
    base = {
        "b": b * b * ev.r_minus,
        "m": m * m * ev.p_minus,
        "bm": b * m * ev.g_minus,
    }
    conv = {
        "b": b * b,
        "m": m * m,
        "bm": b * m,
    }
    if kind.startswith("conv_"):
        value = (k - 1) * n * conv[kind.split("_", 1)[1]]
        df = k - 1
    elif kind.startswith("x"):
        value = (k - 1) * k * n * base[kind[1:]]
        df = (k - 1) ** 2
    else:
        value = k * n * base[kind[1:]]
        df = k - 1
    return _report(kind, value, df, n, k)


def full_table_tests(t: ContingencyTable) -> tuple[SignificanceReport, SignificanceReport]:
    """Classical full-table statistics, df = (K-1)^2 for both.

    The squared-deviation statistic sums (observed - expected)^2 / expected
    over all cells; the log-likelihood statistic equals 2n times the mutual
    information in nats.
    """
    require_positive_margins(t)
    c = t.counts.astype(float)
    n = t.n
    m = margins(t)
    expected = n * np.outer(m.bias, m.prevalence)
    chi2_value = float(((c - expected) ** 2 / expected).sum())
    g2_value = 2.0 * n * mutual_information(t)
    df = (t.k - 1) ** 2
    return (
        _report("full_chi2", chi2_value, df, n, t.k),
        _report("full_g2", g2_value, df, n, t.k),
    )


def cramers_v(chi2_value: float, n: int, k: int) -> float:
    """Association strength sqrt(chi2 / (n (K-1))) on the 0..1 scale."""
    if n <= 0 or k < 2:
        raise UsageError("need n > 0 and k >= 2")
    if chi2_value < 0.0:
        raise UsageError("chi-squared value must be non-negative")
    return math.sqrt(chi2_value / (n * (k - 1)))


def _hypergeom_numerators(rp: int, rn: int, pp: int):
    """Integer weights of every table that shares the given 2x2 margins.

    The weight of true-positive count a is C(rp, a) * C(rn, pp - a); dividing
    by C(rp + rn, pp) turns it into the exact table probability.  Working in
    integers keeps tie comparisons exact.
    """
    lo = max(0, pp - rn)
    hi = min(rp, pp)
    return {a: math.comb(rp, a) * math.comb(rn, pp - a) for a in range(lo, hi + 1)}


def fisher_exact_2x2(t: ContingencyTable, sidedness: str = "two") -> SignificanceReport:
    """Exact fixed-margin test for a 2x2 table.

    One-sided sums the tables at least as associated in the observed
    direction; two-sided sums every table whose probability does not exceed
    the observed one.  Degenerate margins leave a single admissible table and
    give p = 1.
    """
    if sidedness not in ("one", "two"):
        raise UsageError(f"sidedness must be 'one' or 'two', got '{sidedness}'")
    if t.k != 2:
        raise UsageError("the exact 2x2 test needs a 2x2 table")
    a, b, c, d = (int(x) for x in t.counts.ravel())
    rp, rn = a + c, b + d
    pp = a + b
    n = a + b + c + d
    if n == 0:
        raise DataError("cannot test an empty table")
    numerators = _hypergeom_numerators(rp, rn, pp)
    denom = math.comb(n, pp)
    obs = numerators[a]
    if sidedness == "one":
        positive_direction = a * d - b * c >= 0
        if positive_direction:
            total = sum(w for aa, w in numerators.items() if aa >= a)
        else:
            total = sum(w for aa, w in numerators.items() if aa <= a)
    else:
        total = sum(w for w in numerators.values() if w <= obs)
    p = total / denom
    kind = "fisher_one" if sidedness == "one" else "fisher_two"
    return SignificanceReport(
        kind=kind, value=p, df=1, p_value=p, n=n,
        df_alpha=(t.k - 1) ** 2, df_beta=t.k - 1,
    )


def fisher_montecarlo_kxk(
    t: ContingencyTable, samples: int = 100_000, seed: int = 0
) -> SignificanceReport:
    """Fixed-margin permutation estimate of the exact test for K x K tables.

    Tables are sampled by pairing the row-label multiset against a uniformly
    permuted column-label multiset, which realizes the fixed-margin null
    exactly.  The p estimate is the fraction of sampled tables whose
    probability under that null is at most the observed table's, compared on
    log scale with a tie tolerance.  Deterministic for a given seed.
    """
    if samples < 1_000:
        raise UsageError(f"need at least 1000 samples, got {samples}")
    n = t.n
    if n == 0:
        raise DataError("cannot test an empty table")
    k = t.k
    rows = np.asarray(t.row_totals)
    cols = np.asarray(t.col_totals)
    rows_vec = np.repeat(np.arange(k), rows)
    cols_vec = np.repeat(np.arange(k), cols)
    # Fixed margins make the factorial terms of the margins constant, so the
    # log-probability ordering reduces to comparing -sum(lgamma(cell + 1)).
    s_obs = float(gammaln(t.counts + 1.0).sum())
    rng = np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 128) - 1)))
    hits = 0
    done = 0
    chunk = max(1, (1 << 20) // max(n, 1))
    codes_base = rows_vec * k
    while done < samples:
        m = min(chunk, samples - done)
        u = rng.random((m, n))
        perm = np.argsort(u, axis=1)
        shuffled = cols_vec[perm]
        codes = codes_base[None, :] + shuffled
        offsets = (np.arange(m) * (k * k))[:, None]
        tallies = np.bincount((codes + offsets).ravel(), minlength=m * k * k)
        s = gammaln(tallies.reshape(m, k * k) + 1.0).sum(axis=1)
        hits += int((s >= s_obs - 1e-9).sum())
        done += m
    p = hits / samples
    return SignificanceReport(
        kind="fisher_mc", value=p, df=1, p_value=p, n=n,
        df_alpha=(k - 1) ** 2, df_beta=k - 1,
    )


def williams_correction(
    report: SignificanceReport, t: ContingencyTable, mode: str = "independence"
) -> SignificanceReport:
    """Shrink a log-likelihood statistic by the small-sample factor
    q = 1 + (a^2 - 1) / (6 n r).

    Goodness-of-fit mode uses a = K over r = K - 1 degrees.  Independence
    mode derives a^2 - 1 = (K/prev_h - 1)(K/bias_h - 1) from the harmonic
    mean margins over r = (K-1)^2 degrees.  The corrected statistic is
    re-tested at the report's own df.
    """
    if mode not in _WILLIAMS_MODES:
        raise UsageError(f"unknown correction mode '{mode}'")
    require_positive_margins(t)
    k = t.k
    n = t.n
    if mode == "goodness_of_fit":
        a2_minus_1 = k * k - 1.0
        r = k - 1
    else:
        m = margins(t)
        prev_h = k / float(np.sum(1.0 / m.prevalence))
        bias_h = k / float(np.sum(1.0 / m.bias))
        a2_minus_1 = (k / prev_h - 1.0) * (k / bias_h - 1.0)
        r = (k - 1) ** 2
    q = 1.0 + a2_minus_1 / (6.0 * n * r)
    value = report.value / q
    return replace(
        report,
        value=value,
        p_value=chi2_sf(max(value, 0.0), report.df),
        corrections=report.corrections | {"williams"},
    )


def posthoc_calibration(p: float) -> PosthocCalibration:
    """Posterior error bounds from an observed p-value.

    The bound L = -e p ln p calibrates how strongly the data favor a real
    effect; it is defined only for p below 1/e.  alpha_post = 1/(1 + 1/L) is
    the implied lower bound on the false-positive risk and beta_post its
    complement 1/(1 + L).
    """
    if not (0.0 < p < 1.0 / math.e):
        raise DataError(f"calibration is defined for 0 < p < 1/e, got {p}")
    l_bound = -math.e * p * math.log(p)
    alpha_post = 1.0 / (1.0 + 1.0 / l_bound)
    beta_post = 1.0 / (1.0 + l_bound)
    return PosthocCalibration(p=p, l_bound=l_bound, alpha_post=alpha_post, beta_post=beta_post)
