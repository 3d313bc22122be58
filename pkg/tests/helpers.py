"""Shared table builders for the test suite."""

import numpy as np

from chancekit.contingency import ContingencyTable, from_counts

TABLE_A_COUNTS = ((56, 20), (12, 12))
TABLE_B_COUNTS = ((30, 12), (30, 28))


def table_a() -> ContingencyTable:
    return from_counts(TABLE_A_COUNTS)


def table_b() -> ContingencyTable:
    return from_counts(TABLE_B_COUNTS)


def random_valid_table(rng: np.random.Generator, k: int = 2, cell_max: int = 60) -> ContingencyTable:
    """Random k x k count table with every row and column margin positive."""
    while True:
        counts = rng.integers(0, cell_max, size=(k, k))
        t = from_counts(counts)
        if (t.row_totals > 0).all() and (t.col_totals > 0).all():
            return t


def random_valid_tables(seed: int, count: int, k: int = 2, cell_max: int = 60) -> list[ContingencyTable]:
    rng = np.random.default_rng(seed)
    return [random_valid_table(rng, k, cell_max) for _ in range(count)]
