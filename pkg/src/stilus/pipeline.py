"""End-to-end runs: cluster a corpus by author, build the author network,
and rank attribution candidates for a query author.

Every run is driven by a JSON RunConfig and owns its output directory.
All randomness flows from the single config seed, so identical
(manifest bytes, config) pairs produce byte-identical artifacts.
"""

import json
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .clustering import AccuracyReport, KMeansFit, accuracy, kmeans
from .corpus import Corpus, Granularity, LabelVector, label_vector, load_corpus
from .embedding import (
    EmbeddingMatrix,
    ProviderConfig,
    embed_documents,
    embed_sentences,
    write_embeddings,
)
from .errors import FormatError, LoadError, StilusError, ValidationError
from .network import GRAPH_FORMATS, AuthorGraph, author_similarity, build_graph, export_graph
from .preprocess import CleanMode, Sentence, clean, segment_sentences
from .projection import export_scatter, pca2
from .similarity import cosine, minmax_rescale, write_matrix_csv

__all__ = [
    "RunConfig",
    "PreparedUnits",
    "load_config",
    "prepare_units",
    "run_clustering",
    "run_network",
    "run_attribution",
    "run_embed",
    "run_preprocess",
]


@dataclass(frozen=True)
class RunConfig:
    manifest: str
    provider: ProviderConfig
    granularity: Granularity = Granularity.SENTENCE
    k: int | None = None  # None means "auto": the corpus author count
    seed: int = 0
    threshold: float = 0.7
    lexicon: str | None = None
    out: str = "out"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.k is not None and self.k < 1:
            raise ValidationError("k must be at least 1")


_CONFIG_KEYS = frozenset(
    {"manifest", "provider", "granularity", "k", "seed", "threshold", "lexicon", "out"}
)
_PROVIDER_KEYS = frozenset({"kind", "dim", "ngram", "path", "command"})


def _provider_from_dict(raw: dict) -> ProviderConfig:
    if not isinstance(raw, dict):
        raise ValidationError("config field 'provider' must be an object")
    unknown = set(raw) - _PROVIDER_KEYS
    if unknown:
        raise ValidationError(f"unknown provider keys: {sorted(unknown)}")
    if "kind" not in raw:
        raise ValidationError("provider needs a 'kind'")
    command = raw.get("command", ())
    if isinstance(command, str):
        raise ValidationError("provider 'command' must be an argv list, not a string")
    return ProviderConfig(
        kind=raw["kind"],
        dim=int(raw.get("dim", 768)),
        ngram=int(raw.get("ngram", 3)),
        path=raw.get("path"),
        command=tuple(str(part) for part in command),
    )


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON RunConfig. Unknown keys are rejected so
    typos fail loudly instead of silently running defaults."""
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"config not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config {path} must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    for key in ("manifest", "provider"):
        if key not in raw:
            raise ValidationError(f"config is missing required key {key!r}")

    granularity_raw = raw.get("granularity", "sentence")
    try:
        granularity = Granularity(granularity_raw)
    except ValueError:
        raise ValidationError(
            f"granularity must be 'sentence' or 'document', got {granularity_raw!r}"
        ) from None

    k_raw = raw.get("k", "auto")
    if k_raw == "auto":
        k = None
    elif isinstance(k_raw, int) and not isinstance(k_raw, bool):
        k = k_raw
    else:
        raise ValidationError(f"k must be an integer or \"auto\", got {k_raw!r}")

    return RunConfig(
        manifest=str(raw["manifest"]),
        provider=_provider_from_dict(raw["provider"]),
        granularity=granularity,
        k=k,
        seed=int(raw.get("seed", 0)),
        threshold=float(raw.get("threshold", 0.7)),
        lexicon=raw.get("lexicon"),
        out=str(raw.get("out", "out")),
    )


@contextmanager
def _stage(name: str):
    """Tag errors with the pipeline stage they escaped from."""
    try:
        yield
    except StilusError as exc:
        message = exc.args[0] if exc.args else exc.__class__.__name__
        exc.args = (f"[{name}] {message}",)
        raise


@dataclass
class PreparedUnits:
    """Cleaned text units ready for embedding, plus label bookkeeping."""

    granularity: Granularity
    sentences: list[Sentence]  # sentence granularity: one unit per element
    docs: list[tuple[str, list[Sentence]]]  # document granularity
    unit_counts: list[tuple[str, int]]  # (doc_id, embedded unit count)


def _load_lexicon(path: str) -> set[str]:
    lex_path = Path(path)
    if not lex_path.is_file():
        raise LoadError(f"lexicon not found: {lex_path}")
    words = set()
    for line in lex_path.read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word:
            words.add(word)
    return words


def prepare_units(
    corpus: Corpus, granularity: Granularity, lexicon: set[str] | None
) -> PreparedUnits:
    """Segment and clean every document.

    Sentence granularity keeps punctuation ({. , ! ? ; :}); document
    granularity strips it. Units whose cleaned text is empty are dropped
    without renumbering, so (doc_id, index) names the same segment either
    way. A document with no surviving sentences cannot be embedded at
    document granularity and fails validation.
    """
    mode = CleanMode.SENTENCE if granularity is Granularity.SENTENCE else CleanMode.DOCUMENT
    sentences: list[Sentence] = []
    docs: list[tuple[str, list[Sentence]]] = []
    unit_counts: list[tuple[str, int]] = []

    for doc in corpus.documents:
        kept: list[Sentence] = []
        for index, segment in enumerate(segment_sentences(doc.raw_text)):
            cleaned = clean(segment, mode, lexicon)
            if cleaned:
                kept.append(Sentence(doc_id=doc.doc_id, index=index, text=cleaned))
        if granularity is Granularity.SENTENCE:
            sentences.extend(kept)
            unit_counts.append((doc.doc_id, len(kept)))
        else:
            if not kept:
                raise ValidationError(
                    f"document {doc.doc_id!r} has no embeddable sentences after cleaning"
                )
            docs.append((doc.doc_id, kept))
            unit_counts.append((doc.doc_id, 1))

    return PreparedUnits(
        granularity=granularity, sentences=sentences, docs=docs, unit_counts=unit_counts
    )


def _embed_units(provider: ProviderConfig, units: PreparedUnits) -> EmbeddingMatrix:
    if units.granularity is Granularity.SENTENCE:
        return embed_sentences(provider, units.sentences)
    return embed_documents(provider, units.docs)


def _resolve_k(config: RunConfig, corpus: Corpus) -> int:
    if corpus.author_count < 2:
        raise ValidationError(
            f"clustering needs at least 2 authors, corpus has {corpus.author_count}"
        )
    return corpus.author_count if config.k is None else config.k


def _write_json(payload, path: Path) -> None:
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8", newline="\n")


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fit_payload(fit: KMeansFit, report: AccuracyReport) -> dict:
    k = fit.centroids.shape[0]
    return {
        "k": k,
        "seed": fit.seed,
        "iterations": fit.iterations,
        "inertia": fit.inertia,
        "accuracy": report.accuracy,
        "mapping": {str(c): a for c, a in sorted(report.mapping.items())},
        "cluster_sizes": np.bincount(fit.assignments, minlength=k).tolist(),
    }


def _load_inputs(config: RunConfig) -> tuple[Corpus, set[str] | None]:
    with _stage("load"):
        corpus = load_corpus(config.manifest)
        lexicon = _load_lexicon(config.lexicon) if config.lexicon else None
    return corpus, lexicon


def _fit_corpus(
    config: RunConfig, granularity: Granularity
) -> tuple[Corpus, EmbeddingMatrix, LabelVector, KMeansFit, AccuracyReport]:
    corpus, lexicon = _load_inputs(config)
    with _stage("cluster"):
        k = _resolve_k(config, corpus)
    with _stage("preprocess"):
        units = prepare_units(corpus, granularity, lexicon)
    with _stage("embed"):
        matrix = _embed_units(config.provider, units)
    with _stage("cluster"):
        labels = label_vector(corpus, units.unit_counts, granularity)
        fit = kmeans(matrix, k, config.seed)
        report = accuracy(fit.assignments, labels)
    return corpus, matrix, labels, fit, report


def run_clustering(config: RunConfig) -> tuple[AccuracyReport, KMeansFit, dict[str, Path]]:
    """Cluster the corpus with k = author count and score label agreement.

    Artifacts: embeddings.emb1, fit.json, scatter.csv in the output dir.
    """
    corpus, matrix, labels, fit, report = _fit_corpus(config, config.granularity)
    out = _out_dir(config)
    paths = {
        "embeddings": out / "embeddings.emb1",
        "fit": out / "fit.json",
        "scatter": out / "scatter.csv",
    }
    with _stage("report"):
        write_embeddings(matrix, paths["embeddings"])
        _write_json(_fit_payload(fit, report), paths["fit"])
    with _stage("project"):
        proj = pca2(matrix, labels)
        export_scatter(proj, [a.name for a in corpus.authors], paths["scatter"])
    return report, fit, paths


def _author_ordered_centroids(fit: KMeansFit, report: AccuracyReport) -> np.ndarray:
    """Centroid rows reordered so row a belongs to author index a."""
    inverse = {author: cluster for cluster, author in report.mapping.items()}
    return np.array([fit.centroids[inverse[a]] for a in range(len(inverse))])


def run_network(config: RunConfig) -> tuple[AuthorGraph, dict[str, Path]]:
    """Build the author-relationship network.

    Exports the raw centroid cosine matrix (CSV) plus the full and
    thresholded graphs in every supported format. Graph weights are the
    min-max rescaled similarities.
    """
    corpus, _, _, fit, report = _fit_corpus(config, config.granularity)
    names = [a.name for a in corpus.authors]
    with _stage("similarity"):
        centroids = _author_ordered_centroids(fit, report)
        raw = author_similarity(centroids, names)
        rescaled = minmax_rescale(raw)
    with _stage("network"):
        full = build_graph(rescaled, threshold=None)
        thresholded = build_graph(rescaled, threshold=config.threshold)

    out = _out_dir(config)
    paths: dict[str, Path] = {"similarity": out / "author_similarity.csv"}
    with _stage("report"):
        write_matrix_csv(raw, paths["similarity"])
        for fmt in GRAPH_FORMATS:
            full_path = out / f"graph_full.{fmt}"
            thr_path = out / f"graph_thresholded.{fmt}"
            export_graph(full, fmt, full_path)
            export_graph(thresholded, fmt, thr_path)
            paths[f"full_{fmt}"] = full_path
            paths[f"thresholded_{fmt}"] = thr_path
    return thresholded, paths


def run_attribution(config: RunConfig, query: str) -> dict:
    """Rank candidate authors for a query author by centroid similarity.

    Always fits sentence-level vectors. Units are sorted by
    (doc_id, index) before fitting, so the ranking does not depend on
    manifest order; ranking ties break on the author name.
    """
    corpus, lexicon = _load_inputs(config)
    query_author = corpus.author_by_name(query)
    if query_author is None:
        raise ValidationError(f"unknown query author {query!r}")
    with _stage("cluster"):
        k = _resolve_k(config, corpus)
    with _stage("preprocess"):
        units = prepare_units(corpus, Granularity.SENTENCE, lexicon)
        units.sentences.sort(key=lambda s: (s.doc_id, s.index))
    with _stage("embed"):
        matrix = _embed_units(config.provider, units)
    with _stage("cluster"):
        author_of = {doc.doc_id: doc.author.index for doc in corpus.documents}
        labels = LabelVector(
            labels=np.array([author_of[s.doc_id] for s in units.sentences], dtype=np.int64),
            granularity=Granularity.SENTENCE,
        )
        fit = kmeans(matrix, k, config.seed)
        report = accuracy(fit.assignments, labels)

    with _stage("similarity"):
        centroids = _author_ordered_centroids(fit, report)
        ranking = []
        for author in corpus.authors:
            if author.index == query_author.index:
                continue
            sim = cosine(centroids[query_author.index], centroids[author.index])
            ranking.append({"author": author.name, "similarity": sim})
        ranking.sort(key=lambda entry: (-entry["similarity"], entry["author"]))

    payload = {
        "query": query,
        "granularity": "sentence",
        "accuracy": report.accuracy,
        "ranking": ranking,
    }
    out = _out_dir(config)
    with _stage("report"):
        _write_json(payload, out / "attribution.json")
    return payload


def run_embed(config: RunConfig) -> dict[str, Path]:
    """Embed the corpus and write the vectors plus aligned labels."""
    corpus, lexicon = _load_inputs(config)
    with _stage("preprocess"):
        units = prepare_units(corpus, config.granularity, lexicon)
    with _stage("embed"):
        matrix = _embed_units(config.provider, units)
    labels = label_vector(corpus, units.unit_counts, config.granularity)

    out = _out_dir(config)
    paths = {"embeddings": out / "embeddings.emb1", "labels": out / "labels.json"}
    with _stage("report"):
        write_embeddings(matrix, paths["embeddings"])
        _write_json(
            {
                "granularity": config.granularity.value,
                "authors": [a.name for a in corpus.authors],
                "labels": labels.labels.tolist(),
                "units": [f"{doc_id}#{index}" for doc_id, index in matrix.unit_ids],
            },
            paths["labels"],
        )
    return paths


def run_preprocess(config: RunConfig) -> Path:
    """Write the cleaned units as JSON without embedding them."""
    corpus, lexicon = _load_inputs(config)
    with _stage("preprocess"):
        units = prepare_units(corpus, config.granularity, lexicon)
    listed = units.sentences if config.granularity is Granularity.SENTENCE else [
        s for _, kept in units.docs for s in kept
    ]
    out = _out_dir(config)
    path = out / "units.json"
    with _stage("report"):
        _write_json(
            {
                "granularity": config.granularity.value,
                "units": [
                    {"doc_id": s.doc_id, "index": s.index, "text": s.text} for s in listed
                ],
            },
            path,
        )
    return path


def with_overrides(config: RunConfig, seed: int | None = None, out: str | None = None) -> RunConfig:
    """CLI override hook for --seed and --out."""
    if seed is not None:
        config = replace(config, seed=seed)
    if out is not None:
        config = replace(config, out=out)
    return config
