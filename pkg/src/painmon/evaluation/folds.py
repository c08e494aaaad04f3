"""Leave-one-participant-out fold planning."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

from ..errors import TooFewSubjects
from ..ingest.epochs import EpochSet


@dataclass(frozen=True)
class Fold:
    held_out: str
    train_subjects: tuple[str, ...]


@dataclass
class FoldPlan:
    folds: list[Fold]

    def __len__(self) -> int:
        return len(self.folds)


def plan_lopo(epoch_set: EpochSet) -> FoldPlan:
    """One fold per subject, deterministic order (sorted ids). Subjects
    whose epochs are single-class stay in the plan with a warning."""
    subjects = sorted(epoch_set.subjects)
    if len(subjects) < 3:
        raise TooFewSubjects(f"need >= 3 subjects, got {len(subjects)}")
    per_subject = epoch_set.counts_by_subject()
    for s in subjects:
        if min(per_subject[s].values()) == 0:
            warnings.warn(f"subject {s} has single-class epochs; "
                          "its fold is retained", stacklevel=2)
    return FoldPlan([
        Fold(held_out=s, train_subjects=tuple(t for t in subjects if t != s))
        for s in subjects
    ])
