"""End-to-end experiment orchestration.

One configuration drives the whole pipeline: ingest the corpus, build the
temporal snapshots, embed papers with every requested method, train an MLP
scorer per method on pre-cutoff co-citations, rank candidates for every
query-year paper, and report relevance plus novelty/diversity metrics with
bootstrap dispersion and pairwise effect sizes.

Every random step derives its seed from the global seed plus a fixed stage
label, so a rerun with the same configuration is byte-identical. Stages
write their artifacts as they finish; a failing stage aborts with its name
while completed artifacts stay on disk.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import evalmetrics as em
from .corpus import (Corpus, CorpusError, extract_cocitations, load_corpus,
                     relevant_set, snapshot)
from .embeddings.deepwalk import DeepWalkConfig, deepwalk_fold_in, train_deepwalk
from .embeddings.gnn import (GnnConfig, GnnTrainConfig, gnn_infer, gnn_train,
                             save_gnn)
from .embeddings.tfidf import fit_tfidf
from .matrix import (EmbeddingFormatError, EmbeddingMatrix,
                     load_embedding_matrix, save_embedding_matrix)
from .recommender import (ScorerTrainConfig, build_training_pairs,
                          load_recommendations, load_scorer, recommend_topk,
                          save_recommendations, save_scorer, train_scorer)

log = logging.getLogger("citerec.experiment")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration (exit code 2)."""


class DataError(ValueError):
    """Unusable input data or missing on-disk artifact (exit code 3)."""


class MissingArtifactError(DataError):
    """A stage needs an artifact an earlier stage has not produced."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name (exit code 4)."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage


GNN_METHODS = ("sage-mean", "combsage")
BUILTIN_METHODS = ("tfidf", "deepwalk") + GNN_METHODS


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: str
    out_dir: str
    embed_cutoff_year: int = 2016
    scorer_cutoff_year: int = 2017
    query_year: int = 2017
    relevance_start_year: int = 2017
    k_values: tuple[int, ...] = (10, 20, 30)
    methods: tuple[str, ...] = ("tfidf",)
    seed: int = 0
    workers: int = 1
    bootstrap_resamples: int = 1000
    content_matrices: dict[str, str] = field(default_factory=dict)
    content_reference: str | None = None
    method_params: dict[str, dict[str, str]] = field(default_factory=dict)
    graphref_params: dict[str, str] = field(default_factory=dict)
    scorer_params: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if self.embed_cutoff_year > self.scorer_cutoff_year:
            raise ConfigError("embed cutoff must not exceed scorer cutoff")
        if self.query_year <= self.embed_cutoff_year:
            raise ConfigError("query year must be after the embed cutoff")
        if not self.k_values or list(self.k_values) != sorted(self.k_values) \
                or self.k_values[0] < 1:
            raise ConfigError("k values must be positive and ascending")
        if not self.methods:
            raise ConfigError("no methods configured")
        for m in self.methods:
            if m not in BUILTIN_METHODS and m not in self.content_matrices:
                raise ConfigError(
                    f"unknown method {m!r}: not built in and no "
                    f"content.{m} matrix configured")
        if self.content_reference is not None \
                and self.content_reference not in self.content_matrices:
            raise ConfigError(
                f"content reference {self.content_reference!r} has no "
                f"content.<name> path")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.bootstrap_resamples < 100:
            raise ConfigError("bootstrap resamples must be >= 100")


def derive_seed(global_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{global_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


# --- flat key-value configuration files ----------------------------------------

def parse_config_file(path: str) -> dict[str, str]:
    """Flat ``section.key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path!r}: {e}") from e
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            out[key.strip()] = value.strip()
    return out


def apply_overrides(mapping: dict[str, str], overrides) -> dict[str, str]:
    out = dict(mapping)
    for item in overrides or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} must be key=value")
        out[key.strip()] = value.strip()
    return out


def _get_int(mapping, key, default):
    if key not in mapping:
        return default
    try:
        return int(mapping[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {mapping[key]!r}") from None


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    if "corpus.path" not in mapping:
        raise ConfigError("corpus.path is required")
    if "run.out" not in mapping:
        raise ConfigError("run.out is required")
    ks = mapping.get("eval.k", "10,20,30")
    try:
        k_values = tuple(int(x) for x in ks.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"eval.k must be a comma list of integers: {ks!r}") from None
    methods = tuple(x.strip() for x in
                    mapping.get("run.methods", "tfidf").split(",") if x.strip())
    content = {key.split(".", 1)[1]: value
               for key, value in mapping.items() if key.startswith("content.")}
    method_params: dict[str, dict[str, str]] = {}
    graphref: dict[str, str] = {}
    scorer: dict[str, str] = {}
    for key, value in mapping.items():
        if key.startswith("embed.method."):
            rest = key[len("embed.method."):]
            name, sep, param = rest.partition(".")
            if not sep:
                raise ConfigError(f"bad method parameter key {key!r}")
            method_params.setdefault(name, {})[param] = value
        elif key.startswith("graphref."):
            graphref[key.split(".", 1)[1]] = value
        elif key.startswith("scorer."):
            scorer[key.split(".", 1)[1]] = value
    cfg = ExperimentConfig(
        corpus_path=mapping["corpus.path"],
        out_dir=mapping["run.out"],
        embed_cutoff_year=_get_int(mapping, "years.embed_cutoff", 2016),
        scorer_cutoff_year=_get_int(mapping, "years.scorer_cutoff", 2017),
        query_year=_get_int(mapping, "years.query", 2017),
        relevance_start_year=_get_int(mapping, "years.relevance_start", 2017),
        k_values=k_values,
        methods=methods,
        seed=_get_int(mapping, "run.seed", 0),
        workers=_get_int(mapping, "run.workers", 1),
        bootstrap_resamples=_get_int(mapping, "eval.bootstrap", 1000),
        content_matrices=content,
        content_reference=mapping.get("eval.content_reference"),
        method_params=method_params,
        graphref_params=graphref,
        scorer_params=scorer,
    )
    cfg.validate()
    return cfg


def _params_as(cls, params: dict[str, str], rename: dict[str, str] | None = None,
               **fixed):
    """Build a (frozen) dataclass from string-valued config parameters."""
    rename = rename or {}
    kwargs = dict(fixed)
    valid = {f.name: f.type for f in fields(cls)}
    for key, value in params.items():
        name = rename.get(key, key)
        if name in fixed or name not in valid:
            continue
        current = getattr(cls, name, None)
        try:
            if isinstance(current, bool):
                kwargs[name] = value.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                kwargs[name] = int(value)
            elif isinstance(current, float):
                kwargs[name] = float(value)
            elif isinstance(current, tuple):
                kwargs[name] = tuple(int(x) for x in value.split(","))
            else:
                kwargs[name] = value
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {name}") from None
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


# --- shared pipeline state -------------------------------------------------------

@dataclass
class PipelineData:
    corpus: Corpus
    cocites: object
    g_embed: object
    g_eval: object
    candidates: set[str]
    queries: list[str]


def _paths(cfg: ExperimentConfig) -> dict[str, str]:
    out = cfg.out_dir
    return {
        "embeddings": os.path.join(out, "embeddings"),
        "checkpoints": os.path.join(out, "checkpoints"),
        "models": os.path.join(out, "models"),
        "recs": os.path.join(out, "recs"),
        "perquery": os.path.join(out, "perquery"),
        "report": os.path.join(out, "report.txt"),
    }


def _ensure_dirs(cfg: ExperimentConfig) -> None:
    for key, path in _paths(cfg).items():
        if key != "report":
            os.makedirs(path, exist_ok=True)


def load_pipeline_data(cfg: ExperimentConfig) -> PipelineData:
    try:
        corpus = load_corpus(cfg.corpus_path)
    except FileNotFoundError as e:
        raise DataError(f"corpus file not found: {cfg.corpus_path}") from e
    except CorpusError as e:
        raise DataError(str(e)) from e
    g_embed = snapshot(corpus, cfg.embed_cutoff_year)
    g_eval = snapshot(corpus, cfg.query_year)
    candidates = set(g_embed.nodes)
    queries = sorted(pid for pid, p in corpus.papers.items()
                     if p.year == cfg.query_year)
    if not queries:
        raise DataError(f"no papers published in query year {cfg.query_year}")
    if not candidates:
        raise DataError("candidate pool is empty at the embed cutoff")
    cocites = extract_cocitations(corpus)
    return PipelineData(corpus, cocites, g_embed, g_eval, candidates, queries)


# --- embedding stages -----------------------------------------------------------------

def _embedding_ids(data: PipelineData) -> list[str]:
    return sorted(data.candidates | set(data.queries))


def _feature_matrix(cfg: ExperimentConfig, data: PipelineData,
                    params: dict[str, str]) -> EmbeddingMatrix:
    source = params.get("features", "tfidf")
    if source == "tfidf":
        cap = int(params.get("feature_vocab_cap", "1000"))
        model = fit_tfidf(data.corpus, data.g_embed, cap)
        return model.transform(data.corpus, list(data.g_eval.nodes)).densified()
    if source.startswith("content:"):
        name = source.split(":", 1)[1]
        if name not in cfg.content_matrices:
            raise ConfigError(f"feature source {source!r} has no content path")
        matrix = load_embedding_matrix(cfg.content_matrices[name],
                                       corpus=data.corpus, method=name)
        missing = matrix.missing(data.g_eval.nodes)
        if missing:
            raise DataError(f"feature matrix {name!r} missing {len(missing)} "
                            f"nodes (e.g. {missing[0]!r})")
        return matrix.densified()
    raise ConfigError(f"unknown feature source {source!r}")


def embed_method(cfg: ExperimentConfig, data: PipelineData,
                 method: str) -> EmbeddingMatrix:
    """Embeddings covering candidates and queries for one method."""
    _ensure_dirs(cfg)
    params = cfg.method_params.get(method, {})
    ids = _embedding_ids(data)
    if method == "tfidf":
        cap = int(params.get("vocab_cap", "2000"))
        model = fit_tfidf(data.corpus, data.g_embed, cap)
        matrix = model.transform(data.corpus, ids, method="tfidf")
        return matrix
    if method == "deepwalk":
        dw_cfg = _params_as(DeepWalkConfig, params,
                            rename={"walks": "walks_per_node",
                                    "length": "walk_length",
                                    "lr": "learning_rate",
                                    "negatives": "negative_samples"},
                            seed=derive_seed(cfg.seed, "deepwalk"))
        base = train_deepwalk(data.g_embed, dw_cfg)
        folded = deepwalk_fold_in(base, data.g_eval,
                                  seed=derive_seed(cfg.seed, "deepwalk-fold"))
        full = folded.embedding_matrix("deepwalk")
        return EmbeddingMatrix("deepwalk", full.dim, ids, dense=full.take(ids))
    if method in GNN_METHODS:
        arch_cfg = _params_as(GnnConfig, params,
                              rename={"samples": "sample_sizes",
                                      "combine": "component_combine"},
                              arch=method)
        train_cfg = _params_as(GnnTrainConfig, params,
                               rename={"lr": "learning_rate",
                                       "batch": "batch_edges"},
                               seed=derive_seed(cfg.seed, f"gnn:{method}"))
        features = _feature_matrix(cfg, data, params)
        model = gnn_train(data.g_embed, features, arch_cfg, train_cfg)
        paths = _paths(cfg)
        save_gnn(model, os.path.join(paths["checkpoints"], f"{method}.gnn"))
        return gnn_infer(model, data.g_eval, features, ids)
    # externally computed content vectors used directly as the embedding
    path = cfg.content_matrices[method]
    matrix = load_embedding_matrix(path, corpus=data.corpus, method=method)
    missing = matrix.missing(ids)
    if missing:
        raise DataError(f"content matrix {method!r} missing {len(missing)} "
                        f"required ids (e.g. {missing[0]!r})")
    return EmbeddingMatrix(method, matrix.dim, ids, dense=matrix.take(ids))


def build_graph_reference(cfg: ExperimentConfig,
                          data: PipelineData) -> EmbeddingMatrix:
    """DeepWalk over the evaluation-year snapshot; the reference space for
    graph-perspective novelty and diversity."""
    dw_cfg = _params_as(DeepWalkConfig, cfg.graphref_params,
                        rename={"walks": "walks_per_node",
                                "length": "walk_length",
                                "lr": "learning_rate",
                                "negatives": "negative_samples"},
                        seed=derive_seed(cfg.seed, "graphref"))
    return train_deepwalk(data.g_eval, dw_cfg).embedding_matrix("graphref")


# --- scorer / recommendation / evaluation stages -----------------------------------------

def assert_no_temporal_leakage(cfg: ExperimentConfig, data: PipelineData,
                               pairs) -> None:
    """Hard check that no training input reaches past its cutoff."""
    for pid in data.g_embed.nodes:
        if data.corpus.papers[pid].year > cfg.embed_cutoff_year:
            raise StageError("leakage-check",
                             f"embedding node {pid!r} published after "
                             f"{cfg.embed_cutoff_year}")
    for p in pairs:
        if p.query not in data.candidates or p.candidate not in data.candidates:
            raise StageError("leakage-check",
                             f"training pair ({p.query!r}, {p.candidate!r}) "
                             "leaves the candidate pool")
        if p.label == 1:
            first = data.cocites.first_year(p.query, p.candidate)
            if first is None or first > cfg.scorer_cutoff_year:
                raise StageError("leakage-check",
                                 f"positive pair ({p.query!r}, {p.candidate!r}) "
                                 f"has first co-citation {first}, after "
                                 f"cutoff {cfg.scorer_cutoff_year}")


def scorer_for_method(cfg: ExperimentConfig, data: PipelineData, method: str,
                      emb: EmbeddingMatrix):
    params = cfg.scorer_params
    negatives = int(params.get("negatives", "5"))
    pairs = build_training_pairs(data.cocites, data.corpus,
                                 cfg.scorer_cutoff_year, data.candidates,
                                 negatives_per_positive=negatives,
                                 seed=derive_seed(cfg.seed, f"pairs:{method}"))
    max_positives = int(params.get("max_positives", "0"))
    if max_positives:
        pairs = _subsample_pairs(pairs, max_positives, negatives,
                                 derive_seed(cfg.seed, f"pairsub:{method}"))
    assert_no_temporal_leakage(cfg, data, pairs)
    train_cfg = _params_as(ScorerTrainConfig, params,
                           rename={"lr": "learning_rate",
                                   "batch": "batch_size"},
                           seed=derive_seed(cfg.seed, f"scorer:{method}"))
    return train_scorer(emb, pairs, train_cfg)


def _subsample_pairs(pairs, max_positives: int, negatives: int, seed: int):
    """Deterministically cap training size: keep ``max_positives`` positives
    plus the negatives drawn for them (build_training_pairs lists positives
    first and negatives grouped per positive, so resample by positive index)."""
    positives = [p for p in pairs if p.label == 1]
    if len(positives) <= max_positives:
        return pairs
    negs = [p for p in pairs if p.label == 0]
    rng = np.random.Generator(np.random.PCG64(seed))
    keep = sorted(rng.choice(len(positives), size=max_positives,
                             replace=False))
    kept_pairs = [positives[i] for i in keep]
    for i in keep:
        kept_pairs.extend(negs[i * negatives:(i + 1) * negatives])
    return kept_pairs


def recommend_for_method(cfg: ExperimentConfig, data: PipelineData,
                         scorer, emb: EmbeddingMatrix):
    k = max(cfg.k_values)
    return [recommend_topk(scorer, emb, q, data.candidates, k)
            for q in data.queries]


def evaluate_for_method(cfg: ExperimentConfig, data: PipelineData, recs,
                        graph_ref: EmbeddingMatrix | None,
                        content_ref: EmbeddingMatrix | None):
    evals = []
    for rec in recs:
        rel = relevant_set(data.corpus, data.cocites, rec.query,
                           cfg.relevance_start_year) & data.candidates
        evals.append(em.evaluate_query(rec.query, rec.ranked_ids(), rel,
                                       cfg.k_values, graph_ref, content_ref,
                                       data.g_eval))
    return evals


def load_content_reference(cfg: ExperimentConfig,
                           data: PipelineData) -> EmbeddingMatrix | None:
    """The named external matrix, or None (with a warning) when it is not
    configured or does not cover candidates and queries."""
    if cfg.content_reference is None:
        log.warning("no content reference configured; content-perspective "
                    "metrics disabled")
        return None
    path = cfg.content_matrices[cfg.content_reference]
    try:
        matrix = load_embedding_matrix(path, corpus=data.corpus,
                                       method=cfg.content_reference)
    except FileNotFoundError:
        raise MissingArtifactError(f"content matrix file not found: {path}")
    missing = matrix.missing(_embedding_ids(data))
    if missing:
        log.warning("content reference %r misses %d ids; content metrics "
                    "disabled", cfg.content_reference, len(missing))
        return None
    return matrix


# --- full experiment -------------------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig) -> em.EvalReport:
    cfg.validate()
    _ensure_dirs(cfg)
    paths = _paths(cfg)

    def run_stage(stage, fn, *args):
        try:
            return fn(*args)
        except (ConfigError, DataError, StageError):
            raise
        except Exception as e:
            raise StageError(stage, f"{type(e).__name__}: {e}") from e

    data = run_stage("ingest", load_pipeline_data, cfg)
    log.info("corpus: %d papers, %d edges; %d candidates, %d queries",
             len(data.corpus), len(data.corpus.citation_edges),
             len(data.candidates), len(data.queries))

    graph_ref = run_stage("graphref", build_graph_reference, cfg, data)
    save_embedding_matrix(graph_ref,
                          os.path.join(paths["embeddings"], "graphref.emb"))
    content_ref = run_stage("contentref", load_content_reference, cfg, data)

    method_reports = []
    columns = em.metric_columns(cfg.k_values, content_ref is not None)
    for method in cfg.methods:
        emb = run_stage(f"embed:{method}", embed_method, cfg, data, method)
        save_embedding_matrix(emb, os.path.join(paths["embeddings"],
                                                f"{method}.emb"))
        scorer = run_stage(f"train-scorer:{method}", scorer_for_method,
                           cfg, data, method, emb)
        save_scorer(scorer, os.path.join(paths["models"], f"{method}.scorer"))
        recs = run_stage(f"recommend:{method}", recommend_for_method,
                         cfg, data, scorer, emb)
        save_recommendations(recs, os.path.join(paths["recs"], f"{method}.tsv"))
        evals = run_stage(f"evaluate:{method}", evaluate_for_method,
                          cfg, data, recs, graph_ref, content_ref)
        em.write_per_query(evals, columns,
                           os.path.join(paths["perquery"], f"{method}.tsv"))
        method_reports.append(em.aggregate_method(
            method, evals, columns, cfg.bootstrap_resamples,
            derive_seed(cfg.seed, f"bootstrap:{method}")))

    comparisons = em.compare_methods(method_reports, columns)
    report = em.EvalReport(method_reports, comparisons, cfg.seed,
                           cfg.bootstrap_resamples, cfg.k_values)
    em.write_report(report, paths["report"])
    return report


# --- staged (artifact-driven) entry points used by the CLI ------------------------------------

def _require_artifact(path: str, hint: str) -> str:
    if not os.path.exists(path):
        raise MissingArtifactError(f"missing artifact {path!r}; run {hint} first")
    return path


def stage_embed(cfg: ExperimentConfig, method: str) -> str:
    _ensure_dirs(cfg)
    data = load_pipeline_data(cfg)
    paths = _paths(cfg)
    if method == "graphref":
        matrix = build_graph_reference(cfg, data)
    else:
        if method not in cfg.methods:
            raise ConfigError(f"method {method!r} not in run.methods")
        matrix = embed_method(cfg, data, method)
    out = os.path.join(paths["embeddings"], f"{method}.emb")
    save_embedding_matrix(matrix, out)
    return out


def stage_train_scorer(cfg: ExperimentConfig, method: str) -> str:
    _ensure_dirs(cfg)
    data = load_pipeline_data(cfg)
    paths = _paths(cfg)
    emb_path = _require_artifact(
        os.path.join(paths["embeddings"], f"{method}.emb"),
        f"`embed --method {method}`")
    emb = load_embedding_matrix(emb_path, corpus=data.corpus, method=method)
    scorer = scorer_for_method(cfg, data, method, emb)
    out = os.path.join(paths["models"], f"{method}.scorer")
    save_scorer(scorer, out)
    return out


def stage_recommend(cfg: ExperimentConfig, method: str) -> str:
    _ensure_dirs(cfg)
    data = load_pipeline_data(cfg)
    paths = _paths(cfg)
    emb_path = _require_artifact(
        os.path.join(paths["embeddings"], f"{method}.emb"),
        f"`embed --method {method}`")
    scorer_path = _require_artifact(
        os.path.join(paths["models"], f"{method}.scorer"),
        f"`train-scorer --method {method}`")
    emb = load_embedding_matrix(emb_path, corpus=data.corpus, method=method)
    scorer = load_scorer(scorer_path)
    recs = recommend_for_method(cfg, data, scorer, emb)
    out = os.path.join(paths["recs"], f"{method}.tsv")
    save_recommendations(recs, out)
    return out


def stage_evaluate(cfg: ExperimentConfig, method: str) -> str:
    _ensure_dirs(cfg)
    data = load_pipeline_data(cfg)
    paths = _paths(cfg)
    recs_path = _require_artifact(
        os.path.join(paths["recs"], f"{method}.tsv"),
        f"`recommend --method {method}`")
    graphref_path = _require_artifact(
        os.path.join(paths["embeddings"], "graphref.emb"),
        "`embed --method graphref`")
    recs = load_recommendations(recs_path)
    graph_ref = load_embedding_matrix(graphref_path, corpus=data.corpus,
                                      method="graphref")
    content_ref = load_content_reference(cfg, data)
    evals = evaluate_for_method(cfg, data, recs, graph_ref, content_ref)
    columns = em.metric_columns(cfg.k_values, content_ref is not None)
    out = os.path.join(paths["perquery"], f"{method}.tsv")
    em.write_per_query(evals, columns, out)
    return out


def stage_report(cfg: ExperimentConfig, methods=None) -> str:
    """Merge per-query metric files into one comparison report."""
    paths = _paths(cfg)
    chosen = tuple(methods) if methods else cfg.methods
    method_reports = []
    columns_seen: list[str] | None = None
    for method in chosen:
        pq = _require_artifact(
            os.path.join(paths["perquery"], f"{method}.tsv"),
            f"`evaluate --method {method}`")
        evals = em.read_per_query(pq)
        cols = [c for c in evals[0].metrics] if evals else []
        if columns_seen is None:
            columns_seen = cols
        else:
            columns_seen = [c for c in columns_seen if c in cols]
        method_reports.append((method, evals))
    columns = columns_seen or []
    reports = [em.aggregate_method(method, evals, columns,
                                   cfg.bootstrap_resamples,
                                   derive_seed(cfg.seed, f"bootstrap:{method}"))
               for method, evals in method_reports]
    comparisons = em.compare_methods(reports, columns)
    report = em.EvalReport(reports, comparisons, cfg.seed,
                           cfg.bootstrap_resamples, cfg.k_values)
    em.write_report(report, paths["report"])
    return paths["report"]
