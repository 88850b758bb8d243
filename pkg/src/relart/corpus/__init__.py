"""MEDLINE corpus ingestion: XML parsing, document store, train/test splits."""

from relart.corpus.medline import (
    Document,
    IngestCounts,
    MedlineParseError,
    MeshAnnotation,
    filter_eligible,
    normalize_document,
    parse_medline,
)
from relart.corpus.split import CorpusSplit, load_split, save_split, split_corpus
from relart.corpus.store import DocumentStore, StoreWriter, ingest_files

__all__ = [
    "Document",
    "MeshAnnotation",
    "MedlineParseError",
    "IngestCounts",
    "parse_medline",
    "filter_eligible",
    "normalize_document",
    "DocumentStore",
    "StoreWriter",
    "ingest_files",
    "CorpusSplit",
    "split_corpus",
    "save_split",
    "load_split",
]
