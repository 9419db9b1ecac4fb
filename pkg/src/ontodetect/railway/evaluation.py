"""Scoring predicted annotations against a ground-truth KB."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..kb import KnowledgeBase
from .taxonomy import most_specific

MATCH_RADIUS = 1.0


@dataclass(frozen=True)
class ClassScore:
    cls: str
    n_pred: int
    n_truth: int
    true_positives: int

    @property
    def precision(self) -> float:
        return self.true_positives / self.n_pred if self.n_pred else 1.0

    @property
    def recall(self) -> float:
        return self.true_positives / self.n_truth if self.n_truth else 1.0

    @property
    def no_predictions(self) -> bool:
        return self.n_pred == 0


@dataclass
class EvalResult:
    scores: dict = field(default_factory=dict)
    matches: list = field(default_factory=list)

    @property
    def precision(self) -> dict:
        return {c: s.precision for c, s in self.scores.items()}

    @property
    def recall(self) -> dict:
        return {c: s.recall for c, s in self.scores.items()}

    def table(self) -> str:
        rows = [f"{'class':<20} {'pred':>5} {'truth':>5} {'tp':>4} {'precision':>9} {'recall':>6}"]
        for c in sorted(self.scores):
            s = self.scores[c]
            flag = " *" if s.no_predictions else ""
            rows.append(f"{c:<20} {s.n_pred:>5} {s.n_truth:>5} {s.true_positives:>4} "
                        f"{s.precision:>9.2f} {s.recall:>6.2f}{flag}")
        if any(s.no_predictions for s in self.scores.values()):
            rows.append("* no predictions for this class; precision reported as 1.00")
        return "\n".join(rows) + "\n"


def _located(kb: KnowledgeBase):
    out = []
    for ind in kb.individuals_of("DomainConcept"):
        x, y = kb.value(ind, "cx"), kb.value(ind, "cy")
        labels = most_specific(kb, ind)
        if isinstance(x, float) and isinstance(y, float) and labels:
            out.append((ind, x, y, labels))
    return out


def evaluate(pred: KnowledgeBase, truth: KnowledgeBase, radius: float = MATCH_RADIUS) -> EvalResult:
    """Greedy nearest-centroid matching in the ground plane, then per-class scores.

    A prediction may only match a truth object whose class is among the
    prediction's most specific labels.
    """
    preds, truths = _located(pred), _located(truth)
    candidates = []
    for i, (pn, px, py, plabels) in enumerate(preds):
        for j, (tn, tx, ty, tlabels) in enumerate(truths):
            d = math.hypot(px - tx, py - ty)
            if d <= radius and tlabels[0] in plabels:
                candidates.append((d, pn, tn, i, j))
    candidates.sort()
    used_p, used_t, matches = set(), set(), []
    for d, pn, tn, i, j in candidates:
        if i in used_p or j in used_t:
            continue
        used_p.add(i)
        used_t.add(j)
        matches.append((pn, tn, truths[j][3][0], d))

    n_pred, n_truth, tp = {}, {}, {}
    for _, _, _, labels in preds:
        for c in labels:
            n_pred[c] = n_pred.get(c, 0) + 1
    for _, _, _, labels in truths:
        n_truth[labels[0]] = n_truth.get(labels[0], 0) + 1
    for _, _, cls, _ in matches:
        tp[cls] = tp.get(cls, 0) + 1
    classes = sorted(set(n_pred) | set(n_truth))
    scores = {c: ClassScore(c, n_pred.get(c, 0), n_truth.get(c, 0), tp.get(c, 0)) for c in classes}
    return EvalResult(scores, sorted(matches))
