"""Human-study aggregation: precision/recall/F1 of attribute placement and
inter-rater agreement (Krippendorff's alpha, nominal data)."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

YES, NO = "yes", "no"
INTENDED, UNINTENDED = "intended", "unintended"


class AgreementError(ValueError):
    pass


@dataclass(frozen=True)
class EvalResponse:
    """One questionnaire answer: did attribute X appear on garment Y?"""

    image_id: str
    garment: str
    attribute: str
    answer: str  # yes | no
    rater: str
    role: str  # intended | unintended

    def __post_init__(self):
        if self.answer not in (YES, NO):
            raise AgreementError(f"answer must be yes/no, got {self.answer!r}")
        if self.role not in (INTENDED, UNINTENDED):
            raise AgreementError(f"role must be intended/unintended, got {self.role!r}")


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def attribute_scores(responses: Iterable[EvalResponse]) -> dict[str, float]:
    """TP: attribute seen on the intended garment; FN: missed there;
    FP: attribute reported on a garment it was not assigned to."""
    tp = fn = fp = 0
    for r in responses:
        if r.role == INTENDED:
            if r.answer == YES:
                tp += 1
            else:
                fn += 1
        elif r.answer == YES:
            fp += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return {"precision": precision, "recall": recall, "f1": f1_score(precision, recall)}


def responses_by_unit(responses: Iterable[EvalResponse]) -> dict[tuple, list[str]]:
    """Group answers by rated unit (image, garment, attribute)."""
    units: dict[tuple, list[str]] = defaultdict(list)
    for r in responses:
        units[(r.image_id, r.garment, r.attribute)].append(r.answer)
    return units


def krippendorff_alpha(units: dict | Sequence[Sequence[str]]) -> float | None:
    """Nominal-data alpha from the coincidence matrix.

    `units` maps each rated unit to its list of values (or is a plain list of
    such lists).  Units with fewer than two ratings contribute nothing; if no
    unit has two, agreement is undefined and None is returned."""
    value_lists = list(units.values()) if isinstance(units, dict) else [list(u) for u in units]
    pairable = [vals for vals in value_lists if len(vals) >= 2]
    if not pairable:
        return None

    coincidence: Counter[tuple[str, str]] = Counter()
    totals: Counter[str] = Counter()
    for vals in pairable:
        m = len(vals)
        for i, a in enumerate(vals):
            for j, b in enumerate(vals):
                if i != j:
                    coincidence[(a, b)] += 1.0 / (m - 1)
    for (a, _), count in coincidence.items():
        totals[a] += count
    n = sum(totals.values())

    observed = sum(count for (a, b), count in coincidence.items() if a != b)
    expected = sum(totals[a] * totals[b] for a in totals for b in totals if a != b) / (n - 1)
    if expected == 0.0:
        return 1.0 if observed == 0.0 else None
    return 1.0 - observed / expected


def read_responses_csv(path: str | Path) -> list[EvalResponse]:
    """Columns: image_id, garment, attribute, answer, rater, role."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"image_id", "garment", "attribute", "answer", "rater", "role"}
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise AgreementError(f"response CSV missing columns: {sorted(missing)}")
        for row in reader:
            rows.append(
                EvalResponse(
                    image_id=row["image_id"].strip(),
                    garment=row["garment"].strip(),
                    attribute=row["attribute"].strip(),
                    answer=row["answer"].strip().lower(),
                    rater=row["rater"].strip(),
                    role=row["role"].strip().lower(),
                )
            )
    return rows
