"""File-backed document store: append-only record file plus a PMID index.

One store directory per corpus snapshot. Layout:

    records.jsonl   one JSON document per line, append-only
    index.tsv       pmid <tab> byte offset of the current record
    meta.json       ingest counts

Writes go through a single StoreWriter; any number of readers may operate
concurrently on a finished store. Duplicate PMIDs across inputs resolve to
the last written record and are counted.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterable, Iterator

from relart.corpus.medline import (
    Document,
    IngestCounts,
    MeshAnnotation,
    filter_eligible,
    parse_medline,
)

__all__ = ["StoreWriter", "DocumentStore", "ingest_files"]

_RECORDS = "records.jsonl"
_INDEX = "index.tsv"
_META = "meta.json"


def _doc_to_record(doc: Document) -> dict:
    return {
        "pmid": doc.pmid,
        "title": doc.title,
        "abstract": doc.abstract,
        "mesh": [
            {
                "descriptor": m.descriptor,
                "major": m.major_topic,
                "qualifiers": [[q, qm] for q, qm in m.qualifiers],
            }
            for m in doc.mesh
        ],
    }


def _record_to_doc(record: dict) -> Document:
    mesh = [
        MeshAnnotation(
            m["descriptor"],
            bool(m["major"]),
            tuple((q, bool(qm)) for q, qm in m["qualifiers"]),
        )
        for m in record["mesh"]
    ]
    return Document(int(record["pmid"]), record["title"], record["abstract"], mesh)


class StoreWriter:
    """Single-writer append channel for a store directory."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._records = open(self.directory / _RECORDS, "ab")
        self._offsets: dict[int, int] = {}
        self.counts = IngestCounts()
        self._closed = False

    def add(self, doc: Document) -> None:
        if self._closed:
            raise ValueError("writer already closed")
        offset = self._records.tell()
        line = json.dumps(_doc_to_record(doc), ensure_ascii=False, sort_keys=True)
        self._records.write(line.encode("utf-8") + b"\n")
        if doc.pmid in self._offsets:
            self.counts.duplicates += 1
        else:
            self.counts.eligible += 1
        self._offsets[doc.pmid] = offset

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self._records.flush()
        os.fsync(self._records.fileno())
        self._records.close()
        with open(self.directory / _INDEX, "w", encoding="utf-8") as fh:
            for pmid, offset in sorted(self._offsets.items(), key=lambda kv: kv[1]):
                fh.write(f"{pmid}\t{offset}\n")
        with open(self.directory / _META, "w", encoding="utf-8") as fh:
            json.dump(self.counts.as_dict(), fh, sort_keys=True)
            fh.write("\n")

    def __enter__(self) -> "StoreWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class DocumentStore:
    """Read-only view over a finished store directory.

    Iteration follows record-file order (duplicates suppressed in favour of
    the replacement), which keeps training reads sequential.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        index_path = self.directory / _INDEX
        if not index_path.exists():
            raise FileNotFoundError(f"not a document store: {self.directory}")
        self._offsets: dict[int, int] = {}
        with open(index_path, encoding="utf-8") as fh:
            for line in fh:
                pmid, offset = line.split("\t")
                self._offsets[int(pmid)] = int(offset)
        self._ordered = sorted(self._offsets, key=self._offsets.__getitem__)

    def __len__(self) -> int:
        return len(self._offsets)

    def __contains__(self, pmid: int) -> bool:
        return pmid in self._offsets

    def pmids(self) -> list[int]:
        return list(self._ordered)

    def get(self, pmid: int) -> Document:
        offset = self._offsets.get(pmid)
        if offset is None:
            raise KeyError(pmid)
        with open(self.directory / _RECORDS, "rb") as fh:
            fh.seek(offset)
            return _record_to_doc(json.loads(fh.readline()))

    def __iter__(self) -> Iterator[Document]:
        current = set(self._offsets.values())
        with open(self.directory / _RECORDS, "rb") as fh:
            offset = 0
            for line in fh:
                if offset in current:
                    yield _record_to_doc(json.loads(line))
                offset += len(line)

    def counts(self) -> dict:
        meta = self.directory / _META
        if meta.exists():
            return json.loads(meta.read_text("utf-8"))
        return {}


def ingest_files(paths: Iterable, store_dir) -> list[dict]:
    """Parse citation files into a new store, keeping eligible documents only.

    Returns one report dict per input file plus a total line; the same dicts
    the CLI prints line-delimited.
    """
    reports = []
    with StoreWriter(store_dir) as writer:
        for path in paths:
            counts = IngestCounts()
            before_eligible = writer.counts.eligible + writer.counts.duplicates
            for doc in filter_eligible(parse_medline(path, counts)):
                writer.add(doc)
            stored = writer.counts.eligible + writer.counts.duplicates - before_eligible
            reports.append({"file": str(path), **counts.as_dict(), "eligible": stored})
            writer.counts.parsed += counts.parsed
            writer.counts.skipped_no_pmid += counts.skipped_no_pmid
        total = writer.counts.as_dict()
    reports.append({"file": "TOTAL", **total})
    return reports
