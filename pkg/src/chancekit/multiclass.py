"""Multiclass generalizations of the chance-corrected association measures.

The K-class informedness is the prevalence-weighted mean of the one-vs-rest
dichotomous informedness values, so it stays the probability that a
prediction is informed relative to chance; markedness is its bias-weighted
twin over the predictions.  Further generalizations work through the
determinant of the joint probability matrix and through evenness summaries of
the margins, plus information-theoretic measures in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contingency import (
    ContingencyTable,
    dichotomize,
    margins,
    normalize,
    expectation_delta,
    require_positive_margins,
)
from .dichotomous import binary_stats
from .errors import UsageError

__all__ = [
    "EvennessVariants",
    "MulticlassStats",
    "bookmaker_informedness",
    "multiclass_markedness",
    "correlation_bmg",
    "mutual_information",
    "conditional_entropy",
    "det_estimates",
    "evenness_variants",
    "multiclass_kappa",
    "macro_averages",
    "multiclass_stats",
]

EXPONENT_RULES = ("two_over_k", "inverse_3k_minus_2")


@dataclass(frozen=True)
class EvennessVariants:
    """Evenness summaries of the real (r), predicted (p), and geometric-mean
    (g) margins.

    plus: squared geometric mean of the margin vector, (prod m)^(2/K)
    minus: arithmetic mean of the per-label dichotomous products m(1-m)
    hash: harmonic mean of the same products
    Each g form is the geometric mean of the matching r and p forms.  For
    K = 2 all three coincide at m(1-m) and plus = minus * hash holds exactly;
    for K > 2 the three means genuinely differ.
    """

    r_plus: float
    p_plus: float
    g_plus: float
    r_minus: float
    p_minus: float
    g_minus: float
    r_hash: float
    p_hash: float
    g_hash: float


@dataclass(frozen=True)
class MulticlassStats:
    """Chance-corrected summary of a K x K table."""

    informedness: float
    markedness: float
    correlation: float
    kappa: float
    mutual_information: float
    conditional_entropy: float
    det: float
    evenness: EvennessVariants
    label_informedness: tuple[float, ...]
    class_markedness: tuple[float, ...]
    wav: float
    gav: float
    fav: float


def _per_label_stats(t: ContingencyTable):
    return [binary_stats(dichotomize(t, i)) for i in range(t.k)]


def bookmaker_informedness(t: ContingencyTable, *, weights: str = "prevalence") -> float:
    """Prevalence-weighted mean of the one-vs-rest informedness values.

    weights="bias" switches to bias weighting, kept as an explicit variant
    because the two weightings coincide only when margins match.
    """
    if weights not in ("prevalence", "bias"):
        raise UsageError(f"unknown weighting '{weights}'")
    require_positive_margins(t)
    m = margins(t)
    w = m.prevalence if weights == "prevalence" else m.bias
    per_label = _per_label_stats(t)
    return float(sum(w[i] * per_label[i].informedness for i in range(t.k)))


def multiclass_markedness(t: ContingencyTable, *, weights: str = "bias") -> float:
    """Bias-weighted mean of the one-vs-rest markedness values."""
    if weights not in ("prevalence", "bias"):
        raise UsageError(f"unknown weighting '{weights}'")
    require_positive_margins(t)
    m = margins(t)
    w = m.bias if weights == "bias" else m.prevalence
    per_label = _per_label_stats(t)
    return float(sum(w[i] * per_label[i].markedness for i in range(t.k)))


def correlation_bmg(t: ContingencyTable) -> float:
    """Signed geometric mean of multiclass informedness and markedness.

    For K > 2 the two factors can take strictly opposite signs, in which
    case the correlation is undefined and nan is returned.
    """
    b = bookmaker_informedness(t)
    m = multiclass_markedness(t)
    if (b > 0.0 > m) or (b < 0.0 < m):
        return math.nan
    return math.copysign(math.sqrt(max(b * m, 0.0)), b)


def mutual_information(t: ContingencyTable) -> float:
    """Mutual information between prediction and real class, in nats."""
    require_positive_margins(t)
    probs = normalize(t).probs
    bias = probs.sum(axis=1)
    prevalence = probs.sum(axis=0)
    total = 0.0
    for i in range(t.k):
        for j in range(t.k):
            p = probs[i, j]
            if p > 0.0:
                total += p * math.log(p / (bias[i] * prevalence[j]))
    return total


def conditional_entropy(t: ContingencyTable) -> float:
    """Entropy of the real class left once the prediction is known, in nats."""
    require_positive_margins(t)
    probs = normalize(t).probs
    bias = probs.sum(axis=1)
    total = 0.0
    for i in range(t.k):
        for j in range(t.k):
            p = probs[i, j]
            if p > 0.0:
                total -= p * math.log(p / bias[i])
    return total


def det_estimates(
    t: ContingencyTable, exponent_rule: str = "two_over_k"
) -> tuple[float, float, float]:
    """Estimate (markedness, informedness, correlation) from the determinant
    of the joint probability matrix.

    Each estimate is sign(det) * (|det| / margin product)^e where the margin
    product is over biases for markedness, prevalences for informedness, and
    their geometric mean for the correlation.  The exponent e is 2/K under
    rule "two_over_k" and 4/(3K-2) under rule "inverse_3k_minus_2", which
    rescales by marginal degrees of freedom instead of dimensions.  Both
    rules give e = 1 at K = 2, where the estimates are exact; both keep a
    perfect diagonal table at exactly 1.
    """
    if exponent_rule not in EXPONENT_RULES:
        raise UsageError(f"unknown exponent rule '{exponent_rule}'")
    require_positive_margins(t)
    nt = normalize(t)
    _, _, det = expectation_delta(nt)
    k = t.k
    e = 2.0 / k if exponent_rule == "two_over_k" else 4.0 / (3.0 * k - 2.0)
    m = margins(t)
    prod_prev = float(np.prod(m.prevalence))
    prod_bias = float(np.prod(m.bias))
    mag = abs(det)

    def scaled(denominator: float) -> float:
        if mag == 0.0:
            return 0.0
        return math.copysign((mag / denominator) ** e, det)

    m_est = scaled(prod_bias)
    b_est = scaled(prod_prev)
    bmg_est = scaled(math.sqrt(prod_prev * prod_bias))
    return m_est, b_est, bmg_est


def _dichotomous_products(values: np.ndarray) -> np.ndarray:
    return values * (1.0 - values)


def evenness_variants(t: ContingencyTable) -> EvennessVariants:
    """All nine evenness summaries of the margins (see EvennessVariants)."""
    require_positive_margins(t)
    m = margins(t)
    k = t.k
    prev = np.asarray(m.prevalence, dtype=float)
    bias = np.asarray(m.bias, dtype=float)

    r_plus = float(np.prod(prev)) ** (2.0 / k)
    p_plus = float(np.prod(bias)) ** (2.0 / k)
    e_r = _dichotomous_products(prev)
    e_p = _dichotomous_products(bias)
    r_minus = float(np.mean(e_r))
    p_minus = float(np.mean(e_p))
    r_hash = k / float(np.sum(1.0 / e_r))
    p_hash = k / float(np.sum(1.0 / e_p))
    return EvennessVariants(
        r_plus=r_plus,
        p_plus=p_plus,
        g_plus=math.sqrt(r_plus * p_plus),
        r_minus=r_minus,
        p_minus=p_minus,
        g_minus=math.sqrt(r_minus * p_minus),
        r_hash=r_hash,
        p_hash=p_hash,
        g_hash=math.sqrt(r_hash * p_hash),
    )


def multiclass_kappa(t: ContingencyTable) -> float:
    """Chance-corrected agreement (observed vs margin-expected diagonal)."""
    require_positive_margins(t)
    probs = normalize(t).probs
    bias = probs.sum(axis=1)
    prevalence = probs.sum(axis=0)
    po = float(np.trace(probs))
    pe = float(np.dot(bias, prevalence))
    return (po - pe) / (1.0 - pe)


def macro_averages(t: ContingencyTable) -> tuple[float, float, float]:
    """Prevalence-weighted one-vs-rest recall, g-measure, and f-measure.

    The weighted recall always collapses to the diagonal accuracy; it is kept
    as an explicit average so the trio stays comparable.
    """
    require_positive_margins(t)
    m = margins(t)
    per_label = _per_label_stats(t)
    w = m.prevalence
    wav = float(sum(w[i] * per_label[i].recall for i in range(t.k)))
    gav = float(sum(w[i] * per_label[i].g_measure for i in range(t.k)))
    fav = float(sum(w[i] * per_label[i].f1 for i in range(t.k)))
    return wav, gav, fav


def multiclass_stats(t: ContingencyTable) -> MulticlassStats:
    """Bundle every multiclass measure of one table."""
    require_positive_margins(t)
    m = margins(t)
    per_label = _per_label_stats(t)
    label_b = tuple(s.informedness for s in per_label)
    class_m = tuple(s.markedness for s in per_label)
    b = float(np.dot(m.prevalence, label_b))
    mk = float(np.dot(m.bias, class_m))
    if (b > 0.0 > mk) or (b < 0.0 < mk):
        corr = math.nan
    else:
        corr = math.copysign(math.sqrt(max(b * mk, 0.0)), b)
    _, _, det = expectation_delta(normalize(t))
    wav, gav, fav = macro_averages(t)
    return MulticlassStats(
        informedness=b,
        markedness=mk,
        correlation=corr,
        kappa=multiclass_kappa(t),
        mutual_information=mutual_information(t),
        conditional_entropy=conditional_entropy(t),
        det=det,
        evenness=evenness_variants(t),
        label_informedness=label_b,
        class_markedness=class_m,
        wav=wav,
        gav=gav,
        fav=fav,
    )
