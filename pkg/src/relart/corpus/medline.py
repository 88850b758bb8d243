"""Streaming MEDLINE/PubMed citation XML parsing.

Consumed elements: PMID, ArticleTitle, Abstract/AbstractText,
MeshHeadingList/MeshHeading/DescriptorName (MajorTopicYN attribute) and
QualifierName (MajorTopicYN attribute). Everything else is ignored.
Gzip-compressed input is detected by magic bytes and decompressed
transparently.
"""

from __future__ import annotations

import gzip
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import IO, Iterator

from relart.textproc import tokenize

__all__ = [
    "MeshAnnotation",
    "Document",
    "IngestCounts",
    "MedlineParseError",
    "parse_medline",
    "filter_eligible",
    "normalize_document",
]


@dataclass(frozen=True)
class MeshAnnotation:
    """One MeSH heading: descriptor label, major-topic flag, qualifier labels
    each with their own major-topic flag."""

    descriptor: str
    major_topic: bool = False
    qualifiers: tuple[tuple[str, bool], ...] = ()

    def __post_init__(self):
        if not self.descriptor:
            raise ValueError("descriptor must be non-empty")
        labels = [q for q, _ in self.qualifiers]
        if len(labels) != len(set(labels)):
            raise ValueError(f"duplicate qualifier labels in {self.descriptor!r}")

    def qualifier_labels(self) -> set[str]:
        return {q for q, _ in self.qualifiers}


@dataclass
class Document:
    pmid: int
    title: str
    abstract: str
    mesh: list[MeshAnnotation] = field(default_factory=list)

    def descriptor_labels(self) -> set[str]:
        return {m.descriptor for m in self.mesh}


@dataclass
class IngestCounts:
    parsed: int = 0
    skipped_no_pmid: int = 0
    eligible: int = 0
    duplicates: int = 0

    def as_dict(self) -> dict:
        return {
            "parsed": self.parsed,
            "skipped": self.skipped_no_pmid,
            "eligible": self.eligible,
            "duplicates": self.duplicates,
        }


class MedlineParseError(Exception):
    """Malformed citation XML. Carries the approximate byte offset reached."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (at byte offset ~{byte_offset})")
        self.byte_offset = byte_offset


class _CountingReader(io.RawIOBase):
    """Wraps a binary stream and tracks how many bytes were consumed."""

    def __init__(self, raw: IO[bytes]):
        self._raw = raw
        self.bytes_read = 0

    def readable(self) -> bool:
        return True

    def readinto(self, buffer) -> int:
        data = self._raw.read(len(buffer))
        n = len(data)
        buffer[:n] = data
        self.bytes_read += n
        return n


_GZIP_MAGIC = b"\x1f\x8b"


def _element_text(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    return " ".join("".join(elem.itertext()).split())


def parse_medline(source, counts: IngestCounts | None = None) -> Iterator[Document]:
    """Yield one Document per PubmedArticle element of a citation XML stream.

    ``source`` is a path or a binary file object. Multi-part AbstractText
    sections are joined with single spaces in document order; their labels
    are discarded. Records without a PMID are skipped and counted.
    Documents already yielded survive a parse error on a truncated stream.
    """
    if counts is None:
        counts = IngestCounts()
    if hasattr(source, "read"):
        yield from _parse_stream(source, counts)
    else:
        with open(source, "rb") as fh:
            yield from _parse_stream(fh, counts)


def _parse_stream(raw: IO[bytes], counts: IngestCounts) -> Iterator[Document]:
    counting = _CountingReader(raw)
    buffered = io.BufferedReader(counting)
    head = buffered.peek(2)[:2]
    stream: IO[bytes] = gzip.GzipFile(fileobj=buffered) if head == _GZIP_MAGIC else buffered

    try:
        for event, elem in ET.iterparse(stream, events=("end",)):
            if elem.tag != "PubmedArticle":
                continue
            counts.parsed += 1
            doc = _extract_document(elem)
            elem.clear()
            if doc is None:
                counts.skipped_no_pmid += 1
                continue
            yield doc
    except ET.ParseError as exc:
        raise MedlineParseError(str(exc), counting.bytes_read) from exc
    except (EOFError, gzip.BadGzipFile) as exc:
        raise MedlineParseError(str(exc), counting.bytes_read) from exc


def _extract_document(article: ET.Element) -> Document | None:
    pmid_text = _element_text(article.find("./MedlineCitation/PMID"))
    if not pmid_text or not pmid_text.isdigit():
        return None

    citation = article.find("./MedlineCitation")
    title = _element_text(citation.find("./Article/ArticleTitle"))
    parts = [
        _element_text(part)
        for part in citation.findall("./Article/Abstract/AbstractText")
    ]
    abstract = " ".join(p for p in parts if p)

    mesh: list[MeshAnnotation] = []
    for heading in citation.findall("./MeshHeadingList/MeshHeading"):
        descriptor = heading.find("./DescriptorName")
        label = _element_text(descriptor)
        if not label:
            continue
        major = (descriptor.get("MajorTopicYN", "N") == "Y")
        seen: dict[str, bool] = {}
        for qual in heading.findall("./QualifierName"):
            qlabel = _element_text(qual)
            if not qlabel:
                continue
            qmajor = qual.get("MajorTopicYN", "N") == "Y"
            # duplicate qualifier labels inside one heading: keep the first
            seen.setdefault(qlabel, qmajor)
        mesh.append(MeshAnnotation(label, major, tuple(seen.items())))

    return Document(int(pmid_text), title, abstract, mesh)


def filter_eligible(docs) -> Iterator[Document]:
    """Keep documents with a non-empty abstract and at least one MeSH heading.

    Order-preserving and idempotent.
    """
    for doc in docs:
        if doc.abstract and doc.mesh:
            yield doc


def normalize_document(doc: Document) -> list[str]:
    """Lowercased title tokens followed by abstract tokens."""
    return tokenize(doc.title) + tokenize(doc.abstract)
