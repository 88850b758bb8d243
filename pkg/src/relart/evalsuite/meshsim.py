"""MeSH-based similarity between two indexed documents."""

from __future__ import annotations

from typing import Sequence

from ..corpus import Document, MeshAnnotation

__all__ = ["mesh_similarity_score"]


def _annotations(doc) -> Sequence[MeshAnnotation]:
    return doc.mesh if isinstance(doc, Document) else doc


def mesh_similarity_score(d, c) -> int:
    """Query-centric integer score.

    For each descriptor of D also present in C (exact label match): +1;
    +3 more when D flags it as a major topic; +1 per qualifier label the
    two documents share under that descriptor.
    """
    d_mesh = _annotations(d)
    c_mesh = _annotations(c)
    if not d_mesh:
        raise ValueError("query document has no MeSH annotations")
    c_by_label: dict[str, MeshAnnotation] = {}
    for ann in c_mesh:
        c_by_label.setdefault(ann.descriptor, ann)
    score = 0
    seen: set[str] = set()
    for ann in d_mesh:
        if ann.descriptor in seen:
            continue
        seen.add(ann.descriptor)
        other = c_by_label.get(ann.descriptor)
        if other is None:
            continue
        score += 1
        if ann.major_topic:
            score += 3
        shared = set(ann.qualifier_labels()) & set(other.qualifier_labels())
        score += len(shared)
    return score
