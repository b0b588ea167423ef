"""Config-driven orchestration: stages, exports and the run manifest.

Every stage reads its inputs from the output directory (or the configured
corpus paths), writes its own files and nothing else, and the full run is
literally the stages executed in order, so per-stage runs compose to the
same bytes as one run. Files land under their final names only when
complete: content is first written to ``<name>.partial`` and then renamed.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from . import __version__
from .corpus import (
    CompanyMeta,
    build_count_matrix,
    load_acronyms,
    load_lexicon,
    load_manifest,
    read_token_cache,
    tokenize_documents,
    write_token_cache,
)
from .distinctiveness import ForestConfig, gini_importance, train_forest
from .errors import ConfigError, MissingFile, MissingUpstream
from .figures import quadrant_scatter_svg
from .representativeness import ClusterConfig, topic_representativeness
from .scoring import TfidfConfig, TopicScoreMatrix, compute_tfidf, quantile_transform
from .stats import ols_fit, render_report_text, report_to_dict
from .strategy import (
    ZONES,
    StrategicPoint,
    assign_zones,
    company_coordinates,
    esg_triples,
    rank_across_classes,
    rank_within_class,
    topic_trends,
    zone_counts,
    zone_thresholds,
)

TOP_N = 5  # rows in the within-class ranking, one screenful like Table 1

_TFIDF_KEYS = {"tf_mode", "idf_mode", "l2_normalize_docs"}
_CLUSTER_KEYS = {"k_list", "max_iters", "tol", "n_init", "seed"}
_FOREST_KEYS = {
    "n_trees",
    "max_depth",
    "min_samples_split",
    "features_per_split",
    "bootstrap",
    "seed",
}
_TOP_KEYS = {
    "manifest",
    "lexicon",
    "acronyms",
    "out_dir",
    "tfidf",
    "cluster",
    "forest",
    "label_kind",
    "threshold_mode",
    "quantile_heatmaps",
    "seed",
    "years",
}


@dataclass(frozen=True)
class PipelineConfig:
    manifest: Path
    lexicon: Path
    acronyms: Path
    out_dir: Path
    tfidf: TfidfConfig = TfidfConfig()
    cluster: ClusterConfig = ClusterConfig(seed=42)
    forest: ForestConfig = ForestConfig(seed=42)
    label_kind: str = "service_area"
    threshold_mode: str = "median"
    quantile_heatmaps: bool = False
    seed: int = 42
    years: tuple[int, int] | None = None
    svg: bool = False  # flag-only; never read from the config file
    config_hash: str = ""


def _check_keys(obj: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} config keys: {', '.join(unknown)}")


def parse_years(value: Any) -> tuple[int, int]:
    """Accept "A..B" or a two-element [A, B] list, inclusive bounds."""
    if isinstance(value, str):
        parts = value.split("..")
        if len(parts) != 2:
            raise ConfigError(f"years must look like A..B, got {value!r}")
        value = parts
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"years must be a two-element range, got {value!r}")
    try:
        lo, hi = int(value[0]), int(value[1])
    except (TypeError, ValueError):
        raise ConfigError(f"years bounds must be integers, got {value!r}") from None
    if lo > hi:
        raise ConfigError(f"years range is empty: {lo}..{hi}")
    return lo, hi


def load_config(path: str | Path, overrides: Mapping[str, Any] | None = None) -> PipelineConfig:
    """Parse a JSON config; reject unknown keys; apply CLI overrides last.

    Relative paths (including out_dir) are resolved against the config
    file's directory. The config hash covers the effective post-override
    settings with paths as written, so it is machine-independent.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "top-level")
    effective = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            effective[key] = value

    tfidf_raw = dict(effective.get("tfidf", {}))
    _check_keys(tfidf_raw, _TFIDF_KEYS, "tfidf")
    cluster_raw = dict(effective.get("cluster", {}))
    _check_keys(cluster_raw, _CLUSTER_KEYS, "cluster")
    forest_raw = dict(effective.get("forest", {}))
    _check_keys(forest_raw, _FOREST_KEYS, "forest")

    seed = int(effective.get("seed", 42))
    cluster_raw.setdefault("seed", seed)
    forest_raw.setdefault("seed", seed)
    if "k_list" in cluster_raw:
        cluster_raw["k_list"] = tuple(cluster_raw["k_list"])

    label_kind = effective.get("label_kind", "service_area")
    if label_kind not in ("service_area", "country"):
        raise ConfigError(
            f"label_kind must be service_area or country in the pipeline, got {label_kind!r}"
        )
    threshold_mode = effective.get("threshold_mode", "median")
    if threshold_mode not in ("median", "zero"):
        raise ConfigError(f"threshold_mode must be median or zero, got {threshold_mode!r}")

    hash_src = dict(effective, tfidf=tfidf_raw, cluster=cluster_raw, forest=forest_raw)
    config_hash = hashlib.sha256(
        json.dumps(hash_src, sort_keys=True, default=str).encode()
    ).hexdigest()

    base = path.parent
    try:
        tfidf = TfidfConfig(**tfidf_raw)
        cluster = ClusterConfig(**cluster_raw)
        forest = ForestConfig(**forest_raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return PipelineConfig(
        manifest=base / effective.get("manifest", "manifest.csv"),
        lexicon=base / effective.get("lexicon", "lexicon.json"),
        acronyms=base / effective.get("acronyms", "acronyms.json"),
        out_dir=base / effective.get("out_dir", "out"),
        tfidf=tfidf,
        cluster=cluster,
        forest=forest,
        label_kind=label_kind,
        threshold_mode=threshold_mode,
        quantile_heatmaps=bool(effective.get("quantile_heatmaps", False)),
        seed=seed,
        years=parse_years(effective["years"]) if effective.get("years") else None,
        svg=bool((overrides or {}).get("svg", False)),
        config_hash=config_hash,
    )


def _write_atomic(path: Path, text: str) -> None:
    partial = path.with_name(path.name + ".partial")
    partial.write_text(text, encoding="utf-8")
    partial.replace(path)


def _csv(rows: list[list[Any]]) -> str:
    def cell(v: Any) -> str:
        if isinstance(v, float):
            return repr(v)
        return "" if v is None else str(v)

    return "\n".join(",".join(cell(v) for v in row) for row in rows) + "\n"


def _need(cfg: PipelineConfig, stage: str, *names: str) -> list[Path]:
    paths = [cfg.out_dir / n for n in names]
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise MissingUpstream(stage, ", ".join(missing))
    return paths


def _load_companies(cfg: PipelineConfig, stage: str) -> list[CompanyMeta]:
    (path,) = _need(cfg, stage, "companies.json")
    return [CompanyMeta(**obj) for obj in json.loads(path.read_text(encoding="utf-8"))]


def _load_scores(cfg: PipelineConfig, stage: str) -> dict[int, TopicScoreMatrix]:
    (path,) = _need(cfg, stage, "scores.json")
    blob = json.loads(path.read_text(encoding="utf-8"))
    out: dict[int, TopicScoreMatrix] = {}
    for year_str, obj in blob.items():
        out[int(year_str)] = TopicScoreMatrix(
            row_ids=tuple(obj["companies"]),
            topic_ids=tuple(obj["topics"]),
            weights=np.asarray(obj["weights"], dtype=np.float64),
            year=int(year_str),
        )
    return dict(sorted(out.items()))


def stage_ingest(cfg: PipelineConfig) -> list[str]:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    companies, records = load_manifest(cfg.manifest)
    if cfg.years is not None:
        lo, hi = cfg.years
        records = [r for r in records if lo <= r.year <= hi]
        if not records:
            raise ConfigError(f"years filter {lo}..{hi} leaves no documents")
    acronyms = load_acronyms(cfg.acronyms)
    load_lexicon(cfg.lexicon)  # fail here, early, if the lexicon is bad
    docs = tokenize_documents(records, acronyms)
    write_token_cache(docs, records, cfg.out_dir / "corpus_tokens.jsonl.partial")
    (cfg.out_dir / "corpus_tokens.jsonl.partial").replace(cfg.out_dir / "corpus_tokens.jsonl")
    kept = {r.company_id for r in records}
    payload = [
        {
            "company_id": c.company_id,
            "display_name": c.display_name,
            "service_area": c.service_area,
            "country": c.country,
            "industry": c.industry,
        }
        for c in companies
        if c.company_id in kept
    ]
    _write_atomic(cfg.out_dir / "companies.json", json.dumps(payload, indent=2) + "\n")
    return ["corpus_tokens.jsonl", "companies.json"]


def stage_score(cfg: PipelineConfig) -> list[str]:
    _need(cfg, "score", "corpus_tokens.jsonl")
    lexicon = load_lexicon(cfg.lexicon)
    cached = read_token_cache(cfg.out_dir / "corpus_tokens.jsonl")
    by_year: dict[int, list[tuple[Any, str]]] = {}
    for doc, company_id, year in cached:
        by_year.setdefault(year, []).append((doc, company_id))
    outputs: list[str] = []
    combined: dict[str, Any] = {}
    quantiled: dict[str, Any] = {}
    for year in sorted(by_year):
        pairs = by_year[year]
        counts = build_count_matrix(
            [d for d, _ in pairs], lexicon, year=year, row_ids=[c for _, c in pairs]
        )
        scores = compute_tfidf(counts, cfg.tfidf)
        rows: list[list[Any]] = [["company_id", *scores.topic_ids]]
        for rid, weights in zip(scores.row_ids, scores.weights):
            rows.append([rid, *[float(w) for w in weights]])
        name = f"scores_{year}.csv"
        _write_atomic(cfg.out_dir / name, _csv(rows))
        outputs.append(name)
        combined[str(year)] = {
            "companies": list(scores.row_ids),
            "topics": list(scores.topic_ids),
            "weights": [[float(w) for w in row] for row in scores.weights],
        }
        if cfg.quantile_heatmaps:
            q = quantile_transform(scores)
            quantiled[str(year)] = {
                "companies": list(q.row_ids),
                "topics": list(q.topic_ids),
                "weights": [[float(w) for w in row] for row in q.weights],
            }
    _write_atomic(cfg.out_dir / "scores.json", json.dumps(combined, indent=2) + "\n")
    outputs.append("scores.json")
    if cfg.quantile_heatmaps:
        _write_atomic(
            cfg.out_dir / "scores_quantile.json", json.dumps(quantiled, indent=2) + "\n"
        )
        outputs.append("scores_quantile.json")
    return outputs


def stage_represent(cfg: PipelineConfig) -> list[str]:
    scores = _load_scores(cfg, "represent")
    outputs: list[str] = []
    heatmap = {"years": [], "topics": None, "values": []}
    for year, matrix in scores.items():
        rep = topic_representativeness(matrix, cfg.cluster)
        rows: list[list[Any]] = [["topic_id", "mean_silhouette"]]
        rows += [[t, rep[t]] for t in matrix.topic_ids]
        name = f"representativeness_{year}.csv"
        _write_atomic(cfg.out_dir / name, _csv(rows))
        outputs.append(name)
        heatmap["years"].append(year)
        heatmap["topics"] = list(matrix.topic_ids)
        heatmap["values"].append([rep[t] for t in matrix.topic_ids])
    _write_atomic(
        cfg.out_dir / "representativeness_heatmap.json", json.dumps(heatmap, indent=2) + "\n"
    )
    outputs.append("representativeness_heatmap.json")
    return outputs


def stage_distinguish(cfg: PipelineConfig) -> list[str]:
    scores = _load_scores(cfg, "distinguish")
    companies = _load_companies(cfg, "distinguish")
    labels = {
        c.company_id: (c.service_area if cfg.label_kind == "service_area" else c.country)
        for c in companies
    }
    outputs: list[str] = []
    heatmap = {
        "label_kind": cfg.label_kind,
        "years": [],
        "topics": None,
        "values": [],
        "degenerate": [],
    }
    for year, matrix in scores.items():
        forest = train_forest(matrix, labels, cfg.forest, label_kind=cfg.label_kind)
        imp = gini_importance(forest)
        rows: list[list[Any]] = [["topic_id", "importance"]]
        rows += [[t, imp.importances[t]] for t in matrix.topic_ids]
        name = f"importance_{year}_{cfg.label_kind}.csv"
        _write_atomic(cfg.out_dir / name, _csv(rows))
        outputs.append(name)
        heatmap["years"].append(year)
        heatmap["topics"] = list(matrix.topic_ids)
        heatmap["values"].append([imp.importances[t] for t in matrix.topic_ids])
        heatmap["degenerate"].append(imp.degenerate)
    _write_atomic(
        cfg.out_dir / "importance_heatmap.json", json.dumps(heatmap, indent=2) + "\n"
    )
    outputs.append("importance_heatmap.json")
    return outputs


def _read_axis_csv(path: Path) -> dict[str, float]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return {row.split(",")[0]: float(row.split(",")[1]) for row in lines[1:]}


def _strategic_points(cfg: PipelineConfig, scores: dict[int, TopicScoreMatrix]):
    for year, matrix in scores.items():
        rep_csv, imp_csv = _need(
            cfg,
            "model",
            f"representativeness_{year}.csv",
            f"importance_{year}_{cfg.label_kind}.csv",
        )
        rep = _read_axis_csv(rep_csv)
        imp = _read_axis_csv(imp_csv)
        points = company_coordinates(matrix, rep, imp)
        yield year, assign_zones(points, cfg.threshold_mode)


def stage_model(cfg: PipelineConfig) -> list[str]:
    scores = _load_scores(cfg, "model")
    lexicon = load_lexicon(cfg.lexicon)
    outputs: list[str] = []
    zone_rows: list[list[Any]] = [["year", "zone", "count"]]
    for year, points in _strategic_points(cfg, scores):
        rows: list[list[Any]] = [["company_id", "x_raw", "y_raw", "x", "y", "zone"]]
        for p in points:
            rows.append([p.company_id, p.x_raw, p.y_raw, p.x, p.y, p.zone])
        name = f"strategic_{year}.csv"
        _write_atomic(cfg.out_dir / name, _csv(rows))
        outputs.append(name)
        counts = zone_counts(points)
        for zone in ZONES:
            zone_rows.append([year, zone, counts[zone]])
        if cfg.svg:
            svg_name = f"strategic_{year}.svg"
            thresholds = zone_thresholds(points, cfg.threshold_mode)
            quadrant_scatter_svg(points, thresholds, cfg.out_dir / svg_name, year)
            outputs.append(svg_name)
    _write_atomic(cfg.out_dir / "zones_summary.csv", _csv(zone_rows))
    outputs.append("zones_summary.csv")

    if len(scores) >= 2:
        trend_rows: list[list[Any]] = [["topic_id", "year", "mean_weight", "change_rate"]]
        for series in topic_trends(scores):
            for pt in series.points:
                trend_rows.append([series.topic_id, pt.year, pt.mean_weight, pt.change_rate])
        _write_atomic(cfg.out_dir / "trends.csv", _csv(trend_rows))
        outputs.append("trends.csv")

    for year, matrix in scores.items():
        rows = [["company_id", "e", "s", "g"]]
        for t in esg_triples(matrix, lexicon):
            rows.append([t.company_id, t.e, t.s, t.g])
        name = f"esg3d_{year}.csv"
        _write_atomic(cfg.out_dir / name, _csv(rows))
        outputs.append(name)
    return outputs


def _read_strategic(cfg: PipelineConfig, stage: str) -> dict[int, list[dict[str, Any]]]:
    scores_years = sorted(_load_scores(cfg, stage))
    out: dict[int, list[dict[str, Any]]] = {}
    for year in scores_years:
        (path,) = _need(cfg, stage, f"strategic_{year}.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        header = lines[0].split(",")
        rows = []
        for line in lines[1:]:
            cells = dict(zip(header, line.split(",")))
            rows.append(
                {
                    "company_id": cells["company_id"],
                    "x": float(cells["x"]),
                    "y": float(cells["y"]),
                    "zone": cells["zone"],
                }
            )
        out[year] = rows
    return out


def stage_regress(cfg: PipelineConfig) -> list[str]:
    strategic = _read_strategic(cfg, "regress")
    xs: list[float] = []
    ys: list[float] = []
    for rows in strategic.values():
        for row in rows:
            xs.append(row["x"])
            ys.append(row["y"])
    # distinctiveness (y) explains representativeness (x): x = a + b*y
    report = ols_fit(np.asarray(ys), np.asarray(xs), x_name="Cross-Sector")
    _write_atomic(
        cfg.out_dir / "regression_report.json",
        json.dumps(report_to_dict(report), indent=2) + "\n",
    )
    _write_atomic(cfg.out_dir / "regression_report.txt", render_report_text(report))
    return ["regression_report.json", "regression_report.txt"]


def stage_rank(cfg: PipelineConfig) -> list[str]:
    strategic = _read_strategic(cfg, "rank")
    companies = _load_companies(cfg, "rank")
    labels = {c.company_id: c.service_area for c in companies}
    within: dict[str, list[dict[str, Any]]] = {}
    across: dict[str, dict[str, str]] = {}
    for year, rows in strategic.items():
        points = [
            StrategicPoint(
                company_id=r["company_id"],
                year=year,
                x_raw=0.0,
                y_raw=0.0,
                x=r["x"],
                y=r["y"],
                zone=r["zone"],
            )
            for r in rows
        ]
        within[str(year)] = [
            {"company_id": p.company_id, "x": p.x, "y": p.y, "zone": p.zone}
            for p in rank_within_class(points, top_n=TOP_N)
        ]
        across[str(year)] = {
            cls: p.company_id for cls, p in rank_across_classes(points, labels).items()
        }
    payload = {"top_n": TOP_N, "within_class": within, "across_classes": across}
    _write_atomic(cfg.out_dir / "rankings.json", json.dumps(payload, indent=2) + "\n")
    return ["rankings.json"]


STAGES: tuple[tuple[str, Callable[[PipelineConfig], list[str]]], ...] = (
    ("ingest", stage_ingest),
    ("score", stage_score),
    ("represent", stage_represent),
    ("distinguish", stage_distinguish),
    ("model", stage_model),
    ("regress", stage_regress),
    ("rank", stage_rank),
)


def run_pipeline(cfg: PipelineConfig) -> dict[str, Any]:
    """All stages in order, then the run manifest (written last)."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    stages = []
    for name, fn in STAGES:
        started = time.perf_counter()
        outputs = fn(cfg)
        stages.append(
            {
                "name": name,
                "outputs": outputs,
                "wall_clock_seconds": time.perf_counter() - started,
            }
        )
    manifest = {
        "config_hash": cfg.config_hash,
        "tool_version": __version__,
        "stages": stages,
    }
    _write_atomic(cfg.out_dir / "run_manifest.json", json.dumps(manifest, indent=2) + "\n")
    return manifest
