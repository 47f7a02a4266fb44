"""Adaptive decision-tree measurement plans built from anti-commutation structure.

A tree node holds one full correlation index; after a "big" outcome
(|value| >= threshold) the walk continues along the big branch, otherwise
along the small branch. Every node commutes with all the big-outcome
ancestors on its path: once some |T_a| is large, trade-off relations force
every anti-commuting partner of a to be small, so only commuting candidates
remain worth measuring.

Child selection among the allowed candidates is deterministic:

1. skip candidates c for which a commuting (big, small) ancestor pair
   multiplies to c -- near a joint eigenstate those products force |T_c| to
   be small as well;
2. prefer candidates commuting with the small-outcome ancestors (fewer
   spent trade-off budgets);
3. break ties by the cyclic letter distance from the parent index,
   position by position, with the axis cycle z -> y -> x.

On tree exhaustion the run continues with a priority-ordered queue over the
unmeasured indices (lowest spent trade-off budget first).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .correlations import (
    CorrelationRecord,
    CriterionState,
    Index,
    all_full_indices,
    criterion_add,
    format_index,
    is_full,
    parse_index,
    propagated_error,
)
from .errors import DimensionMismatch, DomainError, NonFullCorrelation

_AXIS_POS = {"z": 0, "y": 1, "x": 2}


def anticommute(a: Index, b: Index) -> bool:
    """True when the product operators anti-commute.

    Counts positions where both labels are non-identity and differ; an odd
    count means anti-commutation.
    """
    if len(a) != len(b):
        raise DimensionMismatch(f"index lengths differ: {len(a)} vs {len(b)}")
    differing = sum(1 for x, y in zip(a, b) if x != "0" and y != "0" and x != y)
    return differing % 2 == 1


def _pauli_product(a: Index, b: Index) -> Index:
    """Index of the operator product, phases ignored ("0" where they cancel)."""
    out = []
    for x, y in zip(a, b):
        if x == y:
            out.append("0")
        elif x == "0":
            out.append(y)
        elif y == "0":
            out.append(x)
        else:
            out.append(next(c for c in "xyz" if c not in (x, y)))
    return tuple(out)


@dataclass
class TreeNode:
    index: Index
    big: Optional["TreeNode"] = None
    small: Optional["TreeNode"] = None


@dataclass
class DecisionTree:
    root: TreeNode
    n_qubits: int
    threshold: float = 0.5
    max_steps: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise DomainError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.max_steps is None:
            self.max_steps = 3**self.n_qubits


def _candidate_key(candidate: Index, parent: Index, big_anc, small_anc):
    forced_small = 0
    for a in big_anc:
        for b in small_anc:
            if not anticommute(a, b) and _pauli_product(a, b) == candidate:
                forced_small += 1
    spent = sum(1 for s in small_anc if anticommute(candidate, s))
    dkey = tuple((_AXIS_POS[c] - _AXIS_POS[p]) % 3 for c, p in zip(candidate, parent))
    return (forced_small, spent, dkey)


def _best_child(path, remaining) -> Optional[Index]:
    parent = path[-1][0]
    big_anc = [idx for idx, big in path if big]
    small_anc = [idx for idx, big in path if not big]
    allowed = [c for c in remaining if all(not anticommute(c, a) for a in big_anc)]
    if not allowed:
        return None
    return min(allowed, key=lambda c: _candidate_key(c, parent, big_anc, small_anc))


def _grow(path, remaining, depth_left) -> tuple[Optional[TreeNode], Optional[TreeNode]]:
    """Children for the node at the end of `path` (big branch, small branch)."""
    children = []
    for outcome_big in (True, False):
        extended = path[:-1] + [(path[-1][0], outcome_big)]
        choice = None if depth_left <= 0 else _best_child(extended, remaining)
        if choice is None:
            children.append(None)
            continue
        node = TreeNode(choice)
        node.big, node.small = _grow(
            extended + [(choice, True)], remaining - {choice}, depth_left - 1
        )
        children.append(node)
    return children[0], children[1]


def generate_tree(
    n: int, root: Index, *, threshold: float = 0.5, max_depth: Optional[int] = None
) -> DecisionTree:
    """Build the full measurement plan rooted at a given full index.

    max_depth bounds the path length; the default is the full 3^n for one or
    two qubits and 8 for more (the run continues with the priority queue
    past the leaves, so a capped tree loses no coverage).
    """
    root = tuple(root)
    if len(root) != n:
        raise DimensionMismatch(f"root index length {len(root)} does not match n={n}")
    if not is_full(root):
        raise NonFullCorrelation("tree root must be a full correlation")
    if max_depth is None:
        max_depth = 3**n if n <= 2 else 8
    node = TreeNode(root)
    remaining = set(all_full_indices(n)) - {root}
    node.big, node.small = _grow([(root, True)], remaining, max_depth - 1)
    return DecisionTree(node, n, threshold)


def default_tree_2q(threshold: float = 0.5) -> DecisionTree:
    """The two-qubit plan rooted at zz (big branch continues with yy)."""
    return generate_tree(2, ("z", "z"), threshold=threshold)


def priority_order(
    measured: Iterable[CorrelationRecord], remaining: Sequence[Index]
) -> list[Index]:
    """Order unmeasured indices by the spent trade-off budget.

    The priority of an index is the sum of squared measured values over the
    measured correlations that anti-commute with it (at two qubits these are
    exactly the row and column partners). Lower priority values are measured
    first; ties break lexicographically (x < y < z).
    """
    measured = list(measured)

    def spent(idx: Index) -> float:
        return sum(r.value**2 for r in measured if anticommute(r.index, idx))

    return sorted(remaining, key=lambda idx: (spent(idx), idx))


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Transcript and verdict of one detection run.

    records holds every measured correlation in order (local records appear
    for calibration stages); steps counts the full-correlation measurements
    that feed the criterion. In shot mode the verdict subtracts
    error_multiplier * propagated_error from the running sum before
    comparing against 1.
    """

    records: Tuple[CorrelationRecord, ...]
    sum_of_squares: float
    detected: bool
    steps: int
    strategy: str
    propagated_error: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "detected" if self.detected else "not-detected"

    @property
    def full_records(self) -> Tuple[CorrelationRecord, ...]:
        return tuple(r for r in self.records if is_full(r.index))


def _result(transcript, crit, detected, strategy, details) -> DetectionResult:
    return DetectionResult(
        records=tuple(transcript),
        sum_of_squares=crit.running_sum,
        detected=detected,
        steps=len(crit.records),
        strategy=strategy,
        propagated_error=propagated_error(crit.records),
        details=details,
    )


def run_tree(
    source,
    tree: DecisionTree,
    *,
    error_multiplier: float = 1.0,
    max_steps: Optional[int] = None,
) -> DetectionResult:
    """Walk the tree, then the priority queue, until detection or exhaustion.

    Branching uses the central value against the threshold; in shot mode the
    detection verdict additionally subtracts the propagated error.
    """
    if source.n_qubits != tree.n_qubits:
        raise DimensionMismatch(
            f"source has {source.n_qubits} qubits, tree expects {tree.n_qubits}"
        )
    limit = tree.max_steps if max_steps is None else max_steps
    crit = CriterionState()
    transcript = []
    strategy = "tree"
    node = tree.root
    while node is not None and len(crit.records) < limit:
        rec = source.measure_index(node.index)
        transcript.append(rec)
        crit, verdict = criterion_add(crit, rec, error_multiplier)
        if verdict == "detected":
            return _result(transcript, crit, True, strategy, {})
        node = node.big if abs(rec.value) >= tree.threshold else node.small
    measured = set(crit.measured_indices)
    queue = priority_order(crit.records, [i for i in all_full_indices(tree.n_qubits) if i not in measured])
    if queue:
        strategy = "tree+priority"
    for index in queue:
        if len(crit.records) >= limit:
            break
        rec = source.measure_index(index)
        transcript.append(rec)
        crit, verdict = criterion_add(crit, rec, error_multiplier)
        if verdict == "detected":
            return _result(transcript, crit, True, strategy, {})
    return _result(transcript, crit, False, strategy, {})


_RENAME_SHIFT = {"x": 0, "z": 1, "y": 2}


def starting_index_from_bloch(
    blochs: Sequence[np.ndarray], *, dominance_threshold: float = 0.2
) -> tuple[Index, tuple[dict, ...]]:
    """Root index suggested by the local Bloch vectors.

    Each party contributes its dominant axis (largest |component| when it
    reaches the dominance threshold, else the default z). Also returns, per
    party, the cyclic axis renaming that carries a canonical x-rooted plan
    onto the suggested one.
    """
    dominant = []
    for b in blochs:
        b = np.asarray(b, dtype=float)
        if b.shape != (3,):
            raise DimensionMismatch("each Bloch vector must have 3 components")
        k = int(np.argmax(np.abs(b)))
        dominant.append("xyz"[k] if abs(b[k]) >= dominance_threshold else "z")
    renamings = []
    for axis in dominant:
        shift = _RENAME_SHIFT[axis]
        renamings.append(
            {a: "zyx"[(_AXIS_POS[a] + shift) % 3] for a in "xyz"}
        )
    return tuple(dominant), tuple(renamings)


def run_with_bloch_start(
    source,
    *,
    threshold: float = 0.5,
    max_depth: Optional[int] = None,
    dominance_threshold: float = 0.2,
    error_multiplier: float = 1.0,
    max_steps: Optional[int] = None,
) -> DetectionResult:
    """Measure the local Bloch vectors, root a tree at the suggested index,
    and run it. The 3n local measurements appear in the transcript but do
    not count as criterion steps."""
    n = source.n_qubits
    blochs = []
    local_records = []
    for party in range(n):
        comps = []
        for axis in ("x", "y", "z"):
            idx = tuple(axis if q == party else "0" for q in range(n))
            rec = source.measure_index(idx)
            local_records.append(rec)
            comps.append(rec.value)
        blochs.append(np.array(comps))
    root, renamings = starting_index_from_bloch(blochs, dominance_threshold=dominance_threshold)
    tree = generate_tree(n, root, threshold=threshold, max_depth=max_depth)
    result = run_tree(source, tree, error_multiplier=error_multiplier, max_steps=max_steps)
    details = dict(result.details)
    details.update(
        {
            "bloch_vectors": [list(map(float, b)) for b in blochs],
            "root": format_index(root),
            "axis_renamings": list(renamings),
        }
    )
    return DetectionResult(
        records=tuple(local_records) + result.records,
        sum_of_squares=result.sum_of_squares,
        detected=result.detected,
        steps=result.steps,
        strategy="bloch+" + result.strategy,
        propagated_error=result.propagated_error,
        details=details,
    )


def iter_paths(tree: DecisionTree):
    """Yield every root-to-leaf path as a list of (index, outcome_big) pairs."""

    def walk(node, path):
        leaf = True
        for outcome_big, child in ((True, node.big), (False, node.small)):
            if child is not None:
                leaf = False
                yield from walk(child, path + [(node.index, outcome_big)])
        if leaf:
            yield path + [(node.index, None)]

    yield from walk(tree.root, [])


def validate_tree(tree: DecisionTree) -> None:
    """Check the path invariants: no repeats, and every node commutes with
    all big-outcome ancestors on its path. Raises DomainError on violation."""
    for path in iter_paths(tree):
        seen = []
        big_anc = []
        for index, outcome in path:
            if not is_full(index) or len(index) != tree.n_qubits:
                raise DomainError(f"node {format_index(index)} is not a full index")
            if index in seen:
                raise DomainError(f"index {format_index(index)} repeats along a path")
            if any(anticommute(index, a) for a in big_anc):
                raise DomainError(
                    f"node {format_index(index)} anti-commutes with a big-outcome ancestor"
                )
            seen.append(index)
            if outcome:
                big_anc.append(index)


def _node_to_dict(node: Optional[TreeNode]):
    if node is None:
        return None
    return {
        "index": format_index(node.index),
        "big": _node_to_dict(node.big),
        "small": _node_to_dict(node.small),
    }


def tree_to_dict(tree: DecisionTree) -> dict:
    return {"threshold": tree.threshold, "root": _node_to_dict(tree.root)}


def _node_from_dict(data) -> Optional[TreeNode]:
    if data is None:
        return None
    return TreeNode(
        parse_index(data["index"]),
        _node_from_dict(data.get("big")),
        _node_from_dict(data.get("small")),
    )


def tree_from_dict(data: dict) -> DecisionTree:
    root = _node_from_dict(data["root"])
    if root is None:
        raise DomainError("tree has no root")
    tree = DecisionTree(root, len(root.index), float(data.get("threshold", 0.5)))
    validate_tree(tree)
    return tree


def save_tree(tree: DecisionTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tree_to_dict(tree), fh)


def load_tree(path) -> DecisionTree:
    with open(path, encoding="utf-8") as fh:
        return tree_from_dict(json.load(fh))
