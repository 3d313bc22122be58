#!/usr/bin/env python3
"""Print the full evaluation report for one or more contingency tables.

Given table CSVs (rows = predicted label, columns = real class) this prints
the chance-corrected metrics, the significance battery, and the confidence
intervals side by side.  With no arguments it reports on two built-in demo
classifiers over the same 100 items: one with skewed predictions and decent
recall, one close to chance.  With exactly two tables it also runs the
interval-overlap comparison between them.

Examples:
    python3 scripts/fixture_report.py
    python3 scripts/fixture_report.py results/run1.csv results/run2.csv --x 2.5758
"""

from __future__ import annotations

import argparse
import math
import sys

from chancekit import (
    ContingencyTable,
    binary_stats,
    chi2_bookmaker_family,
    compare_systems,
    confidence_interval,
    evenness_factor,
    fisher_exact_2x2,
    fisher_montecarlo_kxk,
    from_counts,
    full_table_tests,
    load_table_csv,
    margins,
    multiclass_stats,
    posthoc_calibration,
)

DEMO_TABLES = {
    "demo_skewed": ((56, 20), (12, 12)),
    "demo_nearchance": ((30, 12), (30, 28)),
}

DICHOTOMOUS_ROWS = (
    "recall", "inverse_recall", "precision", "inverse_precision",
    "rand_accuracy", "f1", "g_measure", "jaccard", "wracc", "auc",
    "informedness", "markedness", "correlation", "kappa",
)


def fmt(value: float) -> str:
    if value != value:
        return "     nan"
    if math.isinf(value):
        return "     inf"
    return f"{value:8.4f}"


def metric_rows(table: ContingencyTable) -> dict[str, float]:
    stats = multiclass_stats(table)
    rows = {
        "informedness": stats.informedness,
        "markedness": stats.markedness,
        "correlation": stats.correlation,
        "kappa": stats.kappa,
        "mutual_information": stats.mutual_information,
        "evenness_r_minus": stats.evenness.r_minus,
        "rand_accuracy (wav)": stats.wav,
    }
    if table.k == 2:
        b = binary_stats(table)
        rows.update({name: getattr(b, name) for name in DICHOTOMOUS_ROWS})
    return rows


def significance_rows(table: ContingencyTable, fisher_samples: int, seed: int) -> dict[str, tuple[float, float]]:
    """kind -> (statistic, p-value); exact tests report the p twice."""
    rows: dict[str, tuple[float, float]] = {}
    for kind in ("kb", "km", "kbm"):
        rep = chi2_bookmaker_family(table, kind)
        rows[kind] = (rep.value, rep.p_value)
    chi2, g2 = full_table_tests(table)
    rows["full_chi2"] = (chi2.value, chi2.p_value)
    rows["full_g2"] = (g2.value, g2.p_value)
    if table.k == 2:
        f = fisher_exact_2x2(table, "two")
    else:
        f = fisher_montecarlo_kxk(table, fisher_samples, seed)
    rows["fisher_two"] = (f.value, f.p_value)
    return rows


def interval_rows(table: ContingencyTable, x: float) -> dict[str, tuple[float, float]]:
    b = multiclass_stats(table).informedness
    e = evenness_factor(table)
    out = {}
    for variant in ("null", "empirical", "full"):
        center = 0.0 if variant == "null" else b
        ci = confidence_interval(center, table.n, e, x=x, variant=variant)
        out[variant] = (ci.lo, ci.hi)
    return out


def load(source: str) -> tuple[str, ContingencyTable]:
    if source in DEMO_TABLES:
        return source, from_counts(DEMO_TABLES[source])
    return source, load_table_csv(source)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("tables", nargs="*", help="table CSV paths (default: built-in demos)")
    parser.add_argument("--x", type=float, default=1.96, help="interval multiplier")
    parser.add_argument("--fisher-samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0, help="seed for the sampled exact test")
    args = parser.parse_args()

    specs = args.tables or list(DEMO_TABLES)
    named = [load(s) for s in specs]

    for name, table in named:
        m = margins(table)
        print(f"\n{name}: k={table.k} n={table.n} labels={list(table.labels)}")
        for i, label in enumerate(table.labels):
            cells = "  ".join(f"{c:>5}" for c in table.counts[i])
            print(f"  {label:>8} | {cells}")
        print(f"  prevalence {[round(float(p), 4) for p in m.prevalence]}")
        print(f"  bias       {[round(float(b), 4) for b in m.bias]}")

    print("\nmetrics")
    all_metrics = [metric_rows(t) for _, t in named]
    keys = list(all_metrics[0])
    header = "  ".join(f"{name[:16]:>16}" for name, _ in named)
    print(f"  {'':22} {header}")
    for key in keys:
        if any(key not in m for m in all_metrics):
            continue
        cells = "  ".join(f"{fmt(m[key]):>16}" for m in all_metrics)
        print(f"  {key:22} {cells}")

    print("\nsignificance (statistic, p)")
    all_sig = [significance_rows(t, args.fisher_samples, args.seed) for _, t in named]
    for key in all_sig[0]:
        cells = "  ".join(f"{fmt(v)} {p:8.6f}" for v, p in (s[key] for s in all_sig))
        print(f"  {key:22} {cells}")

    print(f"\nconfidence intervals (x = {args.x})")
    all_ci = [interval_rows(t, args.x) for _, t in named]
    for variant in ("null", "empirical", "full"):
        cells = "  ".join(f"[{lo:+.4f}, {hi:+.4f}]" for lo, hi in (c[variant] for c in all_ci))
        print(f"  {variant:22} {cells}")

    for name, table in named:
        if table.k != 2:
            continue
        p = fisher_exact_2x2(table, "two").p_value
        if not 0.0 < p < 1.0 / math.e:
            continue
        cal = posthoc_calibration(p)
        print(f"\n  {name}: p={p:.4f} implies false-positive risk >= {cal.alpha_post:.4f}"
              f" (bound {cal.l_bound:.4f})")

    if len(named) == 2 and all(t.k == 2 for _, t in named):
        (name_a, ta), (name_b, tb) = named
        cmp = compare_systems(
            (multiclass_stats(ta).informedness, ta.n, evenness_factor(ta)),
            (multiclass_stats(tb).informedness, tb.n, evenness_factor(tb)),
            x=args.x,
        )
        print(f"\ncomparison {name_a} vs {name_b}")
        print(f"  a in b: {cmp.a_in_b}   b in a: {cmp.b_in_a}"
              f"   significantly different: {cmp.mutually_exclusive}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
