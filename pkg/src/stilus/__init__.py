"""Stylometric analysis toolkit.

Embeds labeled text corpora into vector space, clusters the vectors by
author, derives author-to-author similarity networks from the cluster
centroids, and ranks candidate authors for anonymous documents.
"""

from .clustering import AccuracyReport, KMeansFit, accuracy, hungarian, kmeans
from .corpus import AuthorId, Corpus, Document, Granularity, LabelVector, label_vector, load_corpus
from .embedding import (
    EmbeddingMatrix,
    ProviderConfig,
    embed_documents,
    embed_sentences,
    hash_embed,
    load_embeddings,
    write_embeddings,
)
from .errors import (
    DegenerateDataError,
    FormatError,
    LoadError,
    MetricError,
    ProviderError,
    StilusError,
    ValidationError,
)
from .network import AuthorGraph, author_similarity, build_graph, export_graph, load_graph_json
from .pipeline import (
    RunConfig,
    load_config,
    run_attribution,
    run_clustering,
    run_embed,
    run_network,
    run_preprocess,
)
from .preprocess import CleanMode, Sentence, clean, segment_sentences
from .projection import Projection2D, export_scatter, pca2
from .similarity import (
    SimilarityMatrix,
    cosine,
    euclidean,
    minmax_rescale,
    similarity_matrix,
    write_matrix_csv,
)

__version__ = "0.1.0"
