"""Paragraph-vector document embeddings trained from scratch.

Two architectures: distributed-memory (dm=1) averages a document vector
with context word vectors to predict the target word; distributed
bag-of-words (dm=0) predicts each word from the document vector alone.
Output layer is either a Huffman-tree hierarchical softmax (hs=1) or
negative sampling against a unigram^0.75 noise distribution (hs=0).
"""

from relart.embedding.params import HyperParams
from relart.embedding.vocab import Vocabulary, build_vocabulary, subsample_keep_prob
from relart.embedding.model import EmbeddingModel, load_model, save_model
from relart.embedding.train import infer_vector, train
from relart.embedding.similarity import NeighborList, cosine_similarity, top_k_neighbors

__all__ = [
    "HyperParams",
    "Vocabulary",
    "build_vocabulary",
    "subsample_keep_prob",
    "EmbeddingModel",
    "save_model",
    "load_model",
    "train",
    "infer_vector",
    "NeighborList",
    "cosine_similarity",
    "top_k_neighbors",
]
