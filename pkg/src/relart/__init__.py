"""relart: related-articles engine for biomedical abstracts.

Trains paragraph-vector document embeddings on MEDLINE abstracts, compares
retrieval behaviour against PubMed's own neighbor service, and ships the
evaluation and blind-rating machinery used to judge both.
"""

__version__ = "0.1.0"
