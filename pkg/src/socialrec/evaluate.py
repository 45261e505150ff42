"""Train/test splitting, MAE and accuracy metrics, and side-by-side runs.

The split removes a rectangle of (test user x test item) cells from the
rating matrix; everything left, plus the untouched graph and category
tables, is the training data.  Both engines are scored on the same split.
MAE is reported on rounded integer predictions (the raw-real MAE is kept
as a secondary diagnostic) and accuracy counts exact integer matches.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .cf import CfConfig, CfPredictor, ColdStartError
from .model import Dataset, RatingMatrix, SocialRecError, item_label, round_rating, user_label
from .snrs import SnrsConfig, SnrsPredictor

METHOD_CF = "cf"
METHOD_SNRS = "snrs"

FIRST_HALF_ITEMS = (0, 1, 2, 3, 4)
SECOND_HALF_ITEMS = (5, 6, 7, 8, 9)

DETAIL_HEADER = ["method", "user", "item", "actual", "pred_real", "pred_rounded"]
SUMMARY_HEADER = ["method", "n", "mae_rounded", "mae_real", "accuracy_percent"]


class MissingCellError(SocialRecError):
    """A designated test cell has no rating in the source dataset."""


@dataclass(frozen=True)
class SplitSpec:
    """Which (user, item) cells form the held-out test rectangle.

    Defaults hold out the second half of a 100-user population on the first
    five items: 50 users x 5 items = 250 observations.
    """

    test_users: tuple[int, ...] = tuple(range(50, 100))
    test_items: tuple[int, ...] = FIRST_HALF_ITEMS

    def __post_init__(self):
        object.__setattr__(self, "test_users", tuple(self.test_users))
        object.__setattr__(self, "test_items", tuple(self.test_items))
        if len(set(self.test_users)) != len(self.test_users):
            raise ValueError("test_users contains duplicates")
        if len(set(self.test_items)) != len(self.test_items):
            raise ValueError("test_items contains duplicates")


def split(dataset: Dataset, spec: SplitSpec,
          ) -> tuple[Dataset, list[tuple[int, int, int]]]:
    """Partition a dataset into training data and held-out test cells.

    Returns (train, test) where train is the dataset with every test cell
    removed from its rating matrix (graph and categories untouched) and
    test is a (user, item, actual) list sorted by (user, item).  Together
    they reconstruct the original ratings exactly.

    Raises MissingCellError if a designated test cell is unrated.
    """
    ratings = dataset.ratings
    for u in spec.test_users:
        if not 0 <= u < ratings.n_users:
            raise ValueError(f"test user index {u} out of bounds "
                             f"(dataset has {ratings.n_users} users)")
    for i in spec.test_items:
        if not 0 <= i < ratings.n_items:
            raise ValueError(f"test item index {i} out of bounds "
                             f"(dataset has {ratings.n_items} items)")

    test_keys = {(u, i) for u in spec.test_users for i in spec.test_items}
    test: list[tuple[int, int, int]] = []
    for u, i in sorted(test_keys):
        actual = ratings.get(u, i)
        if actual is None:
            raise MissingCellError(
                f"test cell ({user_label(u)}, {item_label(i)}) is not rated")
        test.append((u, i, actual))

    train_cells = {(u, i): r for u, i, r in ratings.cells() if (u, i) not in test_keys}
    train = Dataset(
        graph=dataset.graph,
        ratings=RatingMatrix(ratings.n_users, ratings.n_items, train_cells),
        categories=dataset.categories,
        meta=dict(dataset.meta),
    )
    return train, test


def mae(pred: Sequence[float], actual: Sequence[float]) -> float:
    """Mean absolute error between two equal-length rating lists."""
    if len(pred) != len(actual):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs "
                         f"{len(actual)} actuals")
    if not pred:
        raise ValueError("cannot compute MAE of empty lists")
    return sum(abs(p - a) for p, a in zip(pred, actual)) / len(pred)


def accuracy(pred: Sequence[int], actual: Sequence[int]) -> float:
    """Percentage of predictions exactly equal to the actual rating."""
    if len(pred) != len(actual):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs "
                         f"{len(actual)} actuals")
    if not pred:
        raise ValueError("cannot compute accuracy of empty lists")
    hits = sum(1 for p, a in zip(pred, actual) if p == a)
    return 100.0 * hits / len(pred)


@dataclass(frozen=True)
class CellRecord:
    user: int
    item: int
    actual: int
    pred_real: float
    pred_rounded: int
    fallback: str | None = None  # "user-mean", "global-mean", or None


@dataclass(frozen=True)
class EvaluationReport:
    """Per-method evaluation results; header numbers are always recomputable
    from the per-cell records."""

    method: str
    records: tuple[CellRecord, ...]
    n_observations: int
    mae_rounded: float
    mae_real: float
    accuracy_percent: float
    n_fallback: int

    @classmethod
    def from_records(cls, method: str, records: Iterable[CellRecord],
                     ) -> "EvaluationReport":
        records = tuple(records)
        actuals = [r.actual for r in records]
        return cls(
            method=method,
            records=records,
            n_observations=len(records),
            mae_rounded=mae([r.pred_rounded for r in records], actuals),
            mae_real=mae([r.pred_real for r in records], actuals),
            accuracy_percent=accuracy([r.pred_rounded for r in records], actuals),
            n_fallback=sum(1 for r in records if r.fallback is not None),
        )

    def summary_line(self) -> str:
        return (f"{self.method:<6} n={self.n_observations:<4} "
                f"mae={self.mae_rounded:.4f} mae_real={self.mae_real:.4f} "
                f"accuracy={self.accuracy_percent:.1f}% "
                f"fallbacks={self.n_fallback}")


def evaluate_method(dataset: Dataset, spec: SplitSpec, method: str,
                    cf_cfg: CfConfig = CfConfig(),
                    snrs_cfg: SnrsConfig = SnrsConfig()) -> EvaluationReport:
    """Train one engine on the split's training data and score every test cell.

    Collaborative filtering cold starts (a test user with no training
    ratings) fall back to the training global mean and are flagged in the
    record rather than silently blended in.
    """
    train, test = split(dataset, spec)
    records = []
    if method == METHOD_CF:
        predictor = CfPredictor(train, cf_cfg)
        global_mean = train.ratings.global_mean()
        for u, i, actual in test:
            try:
                detail = predictor.predict_detailed(u, i)
                value, fallback = detail.value, detail.fallback
            except ColdStartError:
                if global_mean is None:
                    raise
                value, fallback = global_mean, "global-mean"
            records.append(CellRecord(u, i, actual, value, round_rating(value), fallback))
    elif method == METHOD_SNRS:
        predictor = SnrsPredictor(train, snrs_cfg)
        for u, i, actual in test:
            value = predictor.predict(u, i)
            records.append(CellRecord(u, i, actual, value, round_rating(value)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return EvaluationReport.from_records(method, records)


def run_comparison(dataset: Dataset, spec: SplitSpec = SplitSpec(),
                   cf_cfg: CfConfig = CfConfig(),
                   snrs_cfg: SnrsConfig = SnrsConfig(),
                   ) -> tuple[EvaluationReport, EvaluationReport]:
    """Score both engines on the same train/test split."""
    return (
        evaluate_method(dataset, spec, METHOD_CF, cf_cfg, snrs_cfg),
        evaluate_method(dataset, spec, METHOD_SNRS, cf_cfg, snrs_cfg),
    )


def write_detail_csv(reports: Iterable[EvaluationReport], path: str | Path) -> None:
    """One row per (method, test cell): method,user,item,actual,pred_real,pred_rounded."""
    with open(Path(path), "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(DETAIL_HEADER)
        for report in reports:
            for r in report.records:
                writer.writerow([report.method, user_label(r.user), item_label(r.item),
                                 r.actual, repr(r.pred_real), r.pred_rounded])


def write_summary_csv(reports: Iterable[EvaluationReport], path: str | Path) -> None:
    """One row per method: method,n,mae_rounded,mae_real,accuracy_percent."""
    with open(Path(path), "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for report in reports:
            writer.writerow([report.method, report.n_observations,
                             repr(report.mae_rounded), repr(report.mae_real),
                             repr(report.accuracy_percent)])
