"""Hypernym taxonomy and the semantic-relatedness verdict.

A predicted free-text label counts as related to a reference label when it
is the same label or names a broader semantic category of it (the default
criterion).  Optional policy switches additionally accept the reference
being broader than the prediction, or the two labels sharing a nearby
common ancestor (sibling terms such as mug/cup).

The taxonomy ships as a TSV file: one node per line with columns
``node_id``, pipe-separated lemmas, pipe-separated hypernym node ids.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import unicodedata
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import LoadError, ValidationError

__all__ = [
    "TaxonomyNode",
    "Taxonomy",
    "RelatednessPolicy",
    "RelatednessReason",
    "Relatedness",
    "normalize_label",
    "load_taxonomy",
    "load_bundled_taxonomy",
    "is_broader",
    "semantically_related",
]


def normalize_label(raw: str) -> str:
    """Canonicalize a free-text label for lemma lookup.

    Lowercases, trims, folds diacritics, and collapses runs of whitespace
    or underscores into a single underscore.
    """
    if not raw or not raw.strip():
        raise ValidationError("label must be a non-empty string")
    folded = unicodedata.normalize("NFKD", raw)
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    parts = folded.lower().replace("_", " ").split()
    return "_".join(parts)


@dataclass(frozen=True)
class TaxonomyNode:
    node_id: str
    lemmas: frozenset[str]
    hypernym_ids: frozenset[str]


class Taxonomy:
    """Immutable hypernym graph with a lemma index.

    Validated on construction: hypernym ids must resolve, the graph must be
    acyclic, and every node must reach a root (a node with no hypernyms).
    All queries are pure and safe for concurrent use.
    """

    def __init__(self, nodes: dict[str, TaxonomyNode]):
        self.nodes = dict(nodes)
        self.lemma_index: dict[str, frozenset[str]] = {}
        index: dict[str, set[str]] = {}
        for node in self.nodes.values():
            for hid in node.hypernym_ids:
                if hid not in self.nodes:
                    raise LoadError(
                        f"node {node.node_id!r} references unknown hypernym {hid!r}"
                    )
            for lemma in node.lemmas:
                index.setdefault(lemma, set()).add(node.node_id)
        self.lemma_index = {k: frozenset(v) for k, v in index.items()}
        self.roots = frozenset(
            n.node_id for n in self.nodes.values() if not n.hypernym_ids
        )
        self._check_acyclic()
        self._closure_cache: dict[str, frozenset[str]] = {}

    def _check_acyclic(self) -> None:
        WHITE, GREY, BLACK = 0, 1, 2
        color = dict.fromkeys(self.nodes, WHITE)
        for start in self.nodes:
            if color[start] != WHITE:
                continue
            stack: list[tuple[str, object]] = [(start, None)]
            while stack:
                node_id, it = stack[-1]
                if it is None:
                    color[node_id] = GREY
                    it = iter(self.nodes[node_id].hypernym_ids)
                    stack[-1] = (node_id, it)
                advanced = False
                for nxt in it:  # type: ignore[union-attr]
                    if color[nxt] == GREY:
                        raise LoadError(
                            f"hypernym cycle involving {node_id!r} -> {nxt!r}"
                        )
                    if color[nxt] == WHITE:
                        stack.append((nxt, None))
                        advanced = True
                        break
                if not advanced:
                    color[node_id] = BLACK
                    stack.pop()

    def hypernym_closure(self, node_id: str) -> frozenset[str]:
        """All strict ancestors of ``node_id`` (never includes the node)."""
        cached = self._closure_cache.get(node_id)
        if cached is not None:
            return cached
        seen: set[str] = set()
        frontier = deque(self.nodes[node_id].hypernym_ids)
        while frontier:
            nid = frontier.popleft()
            if nid in seen:
                continue
            seen.add(nid)
            frontier.extend(self.nodes[nid].hypernym_ids)
        closure = frozenset(seen)
        self._closure_cache[node_id] = closure
        return closure

    def ancestor_distances(self, node_id: str) -> dict[str, int]:
        """Hop distance to every ancestor, with the node itself at 0."""
        dist = {node_id: 0}
        frontier = deque([node_id])
        while frontier:
            nid = frontier.popleft()
            for hid in self.nodes[nid].hypernym_ids:
                if hid not in dist or dist[nid] + 1 < dist[hid]:
                    dist[hid] = dist[nid] + 1
                    frontier.append(hid)
        return dist

    def contains_label(self, canonical: str) -> bool:
        return canonical in self.lemma_index

    def nodes_for_label(self, canonical: str) -> frozenset[str]:
        from .errors import UnknownLabelError

        try:
            return self.lemma_index[canonical]
        except KeyError:
            raise UnknownLabelError(canonical) from None

    def __len__(self) -> int:
        return len(self.nodes)


def load_taxonomy(path: str | Path) -> Taxonomy:
    path = Path(path)
    if not path.exists():
        raise LoadError(f"taxonomy file not found: {path}")
    nodes: dict[str, TaxonomyNode] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise LoadError(f"{path}:{lineno}: expected 3 tab-separated columns")
            node_id, lemma_col, hyper_col = cols
            node_id = node_id.strip()
            if not node_id:
                raise LoadError(f"{path}:{lineno}: empty node_id")
            if node_id in nodes:
                raise LoadError(f"{path}:{lineno}: duplicate node_id {node_id!r}")
            lemmas = frozenset(
                normalize_label(l) for l in lemma_col.split("|") if l.strip()
            )
            hypernyms = frozenset(h.strip() for h in hyper_col.split("|") if h.strip())
            nodes[node_id] = TaxonomyNode(node_id, lemmas, hypernyms)
    return Taxonomy(nodes)


def load_bundled_taxonomy() -> Taxonomy:
    """Load the taxonomy data file that ships with the package."""
    ref = resources.files("advsem.data").joinpath("taxonomy.tsv")
    with resources.as_file(ref) as path:
        return load_taxonomy(path)


@dataclass(frozen=True)
class RelatednessPolicy:
    """Switches controlling which relations count as "related".

    The defaults encode the strict criterion: equality, or the prediction
    being a broader category of the reference.  ``lca_distance_threshold``
    of 0 disables the common-ancestor rule entirely; a positive value
    accepts label pairs whose nearest shared ancestor is within that many
    hops of both.
    """

    allow_equal: bool = True
    allow_pred_broader: bool = True
    allow_gt_broader: bool = False
    lca_distance_threshold: int = 0

    def __post_init__(self):
        if self.lca_distance_threshold < 0:
            raise ValidationError("lca_distance_threshold must be >= 0")


class RelatednessReason(str, Enum):
    EXACT_MATCH = "exact_match"
    PRED_IS_BROADER = "pred_is_broader"
    GT_IS_BROADER = "gt_is_broader"
    CLOSE_LCA = "close_lca"
    HUMAN_OVERRIDE = "human_override"
    UNRELATED = "unrelated"


@dataclass(frozen=True)
class Relatedness:
    related: bool
    reason: RelatednessReason
    # Labels missing from the taxonomy; non-empty flags the pair for human
    # adjudication instead of failing the run.
    unknown_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.reason is RelatednessReason.UNRELATED and self.related:
            raise ValidationError("reason=unrelated requires related=False")
        if self.reason not in (
            RelatednessReason.UNRELATED,
            RelatednessReason.HUMAN_OVERRIDE,
        ) and not self.related:
            raise ValidationError(f"reason={self.reason.value} requires related=True")


def is_broader(taxonomy: Taxonomy, broader: str, narrower: str) -> bool:
    """True iff some node of ``broader`` is a strict ancestor of some node
    of ``narrower``.  Irreflexive: a label is never broader than itself
    through the same node.  Raises UnknownLabelError for labels absent from
    the lemma index.
    """
    broader_nodes = taxonomy.nodes_for_label(broader)
    narrower_nodes = taxonomy.nodes_for_label(narrower)
    for nar in narrower_nodes:
        closure = taxonomy.hypernym_closure(nar)
        if closure & broader_nodes:
            return True
    return False


def _close_lca(taxonomy: Taxonomy, a: str, b: str, threshold: int) -> bool:
    a_nodes = taxonomy.nodes_for_label(a)
    b_nodes = taxonomy.nodes_for_label(b)
    for an in a_nodes:
        da = taxonomy.ancestor_distances(an)
        near_a = {nid for nid, d in da.items() if d <= threshold}
        for bn in b_nodes:
            db = taxonomy.ancestor_distances(bn)
            if any(d <= threshold and nid in near_a for nid, d in db.items()):
                return True
    return False


def semantically_related(
    taxonomy: Taxonomy,
    policy: RelatednessPolicy,
    reference: str,
    predicted: str,
) -> Relatedness:
    """Apply the relatedness policy to a (reference, predicted) label pair.

    Both labels must be canonical (see :func:`normalize_label`).  Rules are
    tried in a fixed order — equality, prediction-is-broader,
    reference-is-broader, close common ancestor — and ``reason`` records
    the first rule that fired.  Unknown labels yield an unrelated verdict
    flagged for adjudication rather than an exception.
    """
    unknown = tuple(
        lab for lab in (reference, predicted) if not taxonomy.contains_label(lab)
    )
    if policy.allow_equal and reference == predicted:
        # Equality needs no taxonomy lookup; an unknown-but-identical label
        # still matches itself.
        return Relatedness(True, RelatednessReason.EXACT_MATCH, unknown)
    if unknown:
        return Relatedness(False, RelatednessReason.UNRELATED, unknown)
    if policy.allow_pred_broader and is_broader(taxonomy, predicted, reference):
        return Relatedness(True, RelatednessReason.PRED_IS_BROADER)
    if policy.allow_gt_broader and is_broader(taxonomy, reference, predicted):
        return Relatedness(True, RelatednessReason.GT_IS_BROADER)
    if policy.lca_distance_threshold > 0 and _close_lca(
        taxonomy, reference, predicted, policy.lca_distance_threshold
    ):
        return Relatedness(True, RelatednessReason.CLOSE_LCA)
    return Relatedness(False, RelatednessReason.UNRELATED)
