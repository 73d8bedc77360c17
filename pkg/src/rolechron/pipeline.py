"""Pipeline orchestration: ingest -> embed -> align -> analyze -> report.

Every stage caches its artifacts under the output directory and is resumable;
a stage run against missing prerequisites fails naming the stage to run first.
Per-subreddit failures are isolated: logged and skipped, the rest continue.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import align as align_mod
from . import drift as drift_mod
from . import plots
from .config import DatasetManifest, PipelineConfig, load_manifest
from .embedding import EmbeddingSpace, embed
from .graph_core import (TemporalSnapshot, anchor_overlap, merge_months,
                         parse_edge_list, snapshot_to_edge_lines, summarize,
                         top_k_users)
from .rng import derive_seed

logger = logging.getLogger(__name__)

STAGES = ("ingest", "embed", "align", "analyze", "report")


class StageDependencyError(RuntimeError):
    def __init__(self, needed_stage: str, missing: Path):
        super().__init__(
            f"missing artifact {missing}; run the `{needed_stage}` stage first")
        self.needed_stage = needed_stage


@dataclass
class RunManifest:
    config: dict
    stage_timings: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)  # relpath -> sha256
    skipped: dict = field(default_factory=dict)  # subreddit -> reason

    def write(self, path: Path):
        with open(path, "w") as fh:
            fh.write("# rolechron run manifest\n")
            fh.write("[config]\n")
            for key in sorted(self.config):
                fh.write(f"{key} = {self.config[key]}\n")
            fh.write("\n[stages]\n")
            for stage, seconds in self.stage_timings.items():
                fh.write(f"{stage} = {seconds:.3f}s\n")
            fh.write("\n[skipped]\n")
            for sub in sorted(self.skipped):
                fh.write(f"{sub} = {self.skipped[sub]}\n")
            fh.write("\n[artifacts]\n")
            for rel in sorted(self.artifacts):
                fh.write(f"{self.artifacts[rel]}  {rel}\n")


class Workspace:
    """Output-directory layout shared by all stages."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)

    def stage_dir(self, stage: str, subreddit: str | None = None) -> Path:
        d = self.out / stage
        if subreddit is not None:
            d = d / subreddit
        return d

    def window_edges(self, sub: str, label: str) -> Path:
        return self.stage_dir("ingest", sub) / f"{label}.edges"

    def window_meta(self, sub: str, label: str) -> Path:
        return self.stage_dir("ingest", sub) / f"{label}.meta"

    def embedding_path(self, sub: str, label: str, duplicate=False) -> Path:
        suffix = ".dup.emb" if duplicate else ".emb"
        return self.stage_dir("embed", sub) / f"{label}{suffix}"

    def anchors_path(self, sub: str) -> Path:
        return self.stage_dir("embed", sub) / "anchors.txt"

    def skip_path(self, stage: str, sub: str) -> Path:
        return self.stage_dir(stage, sub) / "skipped.txt"

    def rotation_path(self, sub: str, src: str, tgt: str) -> Path:
        return self.stage_dir("align", sub) / f"{src}_to_{tgt}.rot"

    def aligned_path(self, sub: str, src: str, tgt: str) -> Path:
        return self.stage_dir("align", sub) / f"{src}_to_{tgt}.emb"

    def eval_path(self, sub: str) -> Path:
        return self.stage_dir("align", sub) / "eval.csv"

    def drift_rows_path(self, sub: str) -> Path:
        return self.stage_dir("analyze", sub) / "rows.csv"

    def projection_path(self, sub: str, pair: str) -> Path:
        return self.stage_dir("analyze", sub) / f"proj_{pair}.csv"


# --- snapshot cache ---------------------------------------------------------

def save_window_snapshot(ws: Workspace, snapshot: TemporalSnapshot, label: str):
    d = ws.stage_dir("ingest", snapshot.subreddit)
    d.mkdir(parents=True, exist_ok=True)
    ws.window_edges(snapshot.subreddit, label).write_text(
        "\n".join(snapshot_to_edge_lines(snapshot)) + "\n")
    meta = configparser.ConfigParser()
    meta["snapshot"] = {
        "subreddit": snapshot.subreddit,
        "class_label": snapshot.class_label,
        "window_index": str(snapshot.window_index),
        "months": ",".join(snapshot.months_covered),
    }
    with open(ws.window_meta(snapshot.subreddit, label), "w") as fh:
        meta.write(fh)


def load_window_snapshot(ws: Workspace, sub: str, label: str) -> TemporalSnapshot:
    edges_path = ws.window_edges(sub, label)
    meta_path = ws.window_meta(sub, label)
    if not edges_path.exists() or not meta_path.exists():
        raise StageDependencyError("ingest", edges_path)
    meta = configparser.ConfigParser()
    meta.read(meta_path)
    info = meta["snapshot"]
    with open(edges_path) as fh:
        return parse_edge_list(
            fh, subreddit=info["subreddit"],
            window_index=int(info["window_index"]),
            months=tuple(info["months"].split(",")),
            class_label=info["class_label"])


def _is_skipped(ws: Workspace, sub: str) -> str | None:
    for stage in ("embed", "align", "analyze"):
        p = ws.skip_path(stage, sub)
        if p.exists():
            return p.read_text().strip()
    return None


def _map_subreddits(cfg: PipelineConfig, fn, subs):
    """Run fn per subreddit; concurrent unless deterministic mode is on.

    Failures are isolated: logged and reported, remaining subreddits continue.
    """
    failures = {}
    if cfg.deterministic:
        for sub in subs:
            try:
                fn(sub)
            except Exception as exc:  # noqa: BLE001 - per-subreddit isolation
                logger.exception("subreddit %s failed", sub)
                failures[sub] = str(exc)
    else:
        with ThreadPoolExecutor() as pool:
            futures = {sub: pool.submit(fn, sub) for sub in subs}
        for sub, fut in futures.items():
            exc = fut.exception()
            if exc is not None:
                logger.error("subreddit %s failed: %s", sub, exc)
                failures[sub] = str(exc)
    return failures


# --- stages -----------------------------------------------------------------

def stage_ingest(cfg: PipelineConfig, manifest: DatasetManifest,
                 force: bool = False) -> dict:
    ws = Workspace(cfg)

    def ingest_one(sub: str):
        done = all(ws.window_edges(sub, label).exists()
                   for label in manifest.window_labels)
        if done and not force:
            return
        label_class = manifest.classes[sub]
        for label in manifest.window_labels:
            index = manifest.window_index(label)
            month_snaps = []
            for month in manifest.windows[label]:
                path = cfg.data_root / sub / f"{month}.edges"
                if not path.exists():
                    raise FileNotFoundError(f"missing edge list {path}")
                with open(path) as fh:
                    month_snaps.append(parse_edge_list(
                        fh, subreddit=sub, window_index=index,
                        months=(month,), class_label=label_class))
            window = merge_months(month_snaps, window_index=index)
            save_window_snapshot(ws, window, label)

    return _map_subreddits(cfg, ingest_one, sorted(manifest.classes))


def stage_embed(cfg: PipelineConfig, manifest: DatasetManifest,
                force: bool = False) -> dict:
    ws = Workspace(cfg)
    labels = manifest.window_labels

    def embed_one(sub: str):
        out_dir = ws.stage_dir("embed", sub)
        done = ws.anchors_path(sub).exists() and all(
            ws.embedding_path(sub, label).exists() for label in labels)
        if (done or ws.skip_path("embed", sub).exists()) and not force:
            return
        snapshots = {label: load_window_snapshot(ws, sub, label) for label in labels}
        out_dir.mkdir(parents=True, exist_ok=True)

        top_sets = []
        for label in labels:
            top = top_k_users(snapshots[label], cfg.k_top)
            if top.shortfall:
                logger.warning("%s/%s: only %d users for k_top=%d", sub, label,
                               len(top.users), cfg.k_top)
            top_sets.append(top.users)
        anchors = anchor_overlap(top_sets)
        if anchors.empty_warning:
            reason = "empty anchor overlap across windows; alignment impossible"
            ws.skip_path("embed", sub).write_text(reason + "\n")
            logger.warning("skipping %s: %s", sub, reason)
            return
        ws.anchors_path(sub).write_text("\n".join(sorted(anchors.users)) + "\n")

        for label in labels:
            for duplicate in (False, True):
                # one training seed per subreddit: identical window graphs
                # yield identical embeddings, so drift reflects the data, not
                # trainer noise; the duplicate run gets an independent seed
                # to exercise alignment across stochastic retrains
                if duplicate:
                    params_seed = derive_seed(cfg.seed, sub, "embed-dup", label)
                else:
                    params_seed = derive_seed(cfg.seed, sub, "embed")
                params = replace(cfg.embed, seed=params_seed)
                space = embed(snapshots[label], params)
                space.save_text(ws.embedding_path(sub, label, duplicate))

    return _map_subreddits(cfg, embed_one, sorted(manifest.classes))


def _load_embedding(ws: Workspace, sub: str, label: str,
                    duplicate=False) -> EmbeddingSpace:
    path = ws.embedding_path(sub, label, duplicate)
    if not path.exists():
        raise StageDependencyError("embed", path)
    space = EmbeddingSpace.load_text(path)
    space.provenance["snapshot"] = f"{sub}/{label}"
    return space


def _load_anchors(ws: Workspace, sub: str) -> frozenset:
    path = ws.anchors_path(sub)
    if not path.exists():
        raise StageDependencyError("embed", path)
    return frozenset(line.strip() for line in path.read_text().splitlines()
                     if line.strip())


def save_alignment(path: Path, result: align_mod.AlignmentResult):
    """Rotation matrix (row-major text), anchor list, and residual."""
    with open(path, "w") as fh:
        d = result.rotation.shape[0]
        fh.write(f"{d} {result.source_id} {result.target_id}\n")
        for row in result.rotation:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")
        fh.write("anchors: " + " ".join(sorted(result.anchors)) + "\n")
        fh.write(f"residual: {result.anchor_residual!r}\n")


def stage_align(cfg: PipelineConfig, manifest: DatasetManifest,
                force: bool = False) -> dict:
    ws = Workspace(cfg)
    labels = manifest.window_labels
    pairs = list(zip(labels[:-1], labels[1:]))  # (target, source): align later to earlier

    def align_one(sub: str):
        if _is_skipped(ws, sub):
            return
        out_dir = ws.stage_dir("align", sub)
        done = ws.eval_path(sub).exists() and all(
            ws.aligned_path(sub, src, tgt).exists() for tgt, src in pairs)
        if done and not force:
            return
        out_dir.mkdir(parents=True, exist_ok=True)
        anchors = _load_anchors(ws, sub)

        # consecutive-pair alignment: the later window is the source
        for tgt_label, src_label in pairs:
            target = _load_embedding(ws, sub, tgt_label)
            source = _load_embedding(ws, sub, src_label)
            result = align_mod.procrustes_align(
                source, target, anchors,
                center=cfg.align_center, scale=cfg.align_scale)
            save_alignment(ws.rotation_path(sub, src_label, tgt_label), result)
            result.aligned_source.save_text(
                ws.aligned_path(sub, src_label, tgt_label))

        # duplicate-embedding evaluation per window (alignment quality check)
        with open(ws.eval_path(sub), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["subreddit", "window_pair", "baseline_mean",
                             "baseline_std", "aligned_mean", "aligned_std",
                             "n_users"])
            for label in labels:
                main = _load_embedding(ws, sub, label)
                dup = _load_embedding(ws, sub, label, duplicate=True)
                result = align_mod.procrustes_align(
                    dup, main, anchors,
                    center=cfg.align_center, scale=cfg.align_scale)
                shared = main.shared_users(dup)
                ev = align_mod.evaluate_alignment(main, dup,
                                                  result.aligned_source, shared)
                writer.writerow([sub, f"{label}-{label}dup",
                                 repr(ev.baseline_mean), repr(ev.baseline_std),
                                 repr(ev.aligned_mean), repr(ev.aligned_std),
                                 ev.n_users])

    return _map_subreddits(cfg, align_one, sorted(manifest.classes))


def _save_projection(path: Path, projection: align_mod.PcaProjection):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "window", "pc1", "pc2"])
        for (user, window), (x, y) in zip(projection.tags,
                                          projection.coordinates):
            writer.writerow([user, window, repr(float(x)), repr(float(y))])


def _load_projection(path: Path) -> align_mod.PcaProjection:
    tags, coords = [], []
    with open(path) as fh:
        reader = csv.reader(fh)
        next(reader)
        for user, window, x, y in reader:
            tags.append((user, window))
            coords.append((float(x), float(y)))
    coordinates = np.array(coords)
    return align_mod.PcaProjection(tags=tags, coordinates=coordinates,
                                   components=np.zeros((2, 2)),
                                   explained_variance_ratio=np.zeros(2))


def stage_analyze(cfg: PipelineConfig, manifest: DatasetManifest,
                  force: bool = False) -> dict:
    ws = Workspace(cfg)
    labels = manifest.window_labels
    pairs = list(zip(labels[:-1], labels[1:]))

    def analyze_one(sub: str):
        if _is_skipped(ws, sub):
            return
        rows_path = ws.drift_rows_path(sub)
        if rows_path.exists() and not force:
            return
        ws.stage_dir("analyze", sub).mkdir(parents=True, exist_ok=True)
        class_label = manifest.classes[sub]

        projections = {}
        for tgt_label, src_label in pairs:
            target = _load_embedding(ws, sub, tgt_label)
            aligned_path = ws.aligned_path(sub, src_label, tgt_label)
            if not aligned_path.exists():
                raise StageDependencyError("align", aligned_path)
            aligned = EmbeddingSpace.load_text(aligned_path)
            amalgam = align_mod.amalgamate(target, aligned,
                                           target_tag=tgt_label,
                                           source_tag=src_label)
            projections[(tgt_label, src_label)] = align_mod.pca_project(amalgam)

        # cross-space component sign agreement between consecutive projections
        ordered = [projections[p] for p in pairs]
        for i in range(1, len(ordered)):
            shared = set(ordered[i - 1].tags) & set(ordered[i].tags)
            if shared:
                ordered[i] = align_mod.sign_align(ordered[i - 1], ordered[i],
                                                  shared)
                projections[pairs[i]] = ordered[i]

        report_rows = []
        for (tgt_label, src_label), projection in projections.items():
            pair_name = f"{tgt_label}-{src_label}"
            _save_projection(ws.projection_path(sub, pair_name), projection)

            target = _load_embedding(ws, sub, tgt_label)
            aligned = EmbeddingSpace.load_text(
                ws.aligned_path(sub, src_label, tgt_label))
            shared = target.shared_users(aligned)
            drifts = drift_mod.user_drift(target, aligned, shared,
                                          window_pair=(tgt_label, src_label))
            agg = drift_mod.subreddit_drift({sub: drifts})
            if not agg:
                logger.warning("%s %s: no drift values", sub, pair_name)
                continue
            sd = agg[0]

            k_star, cent_mean, sil_t, sil_next = _cluster_pair(
                cfg, projection, tgt_label, src_label, sub)
            report_rows.append(drift_mod.DriftReportRow(
                subreddit=sub, class_label=class_label, window_pair=pair_name,
                n_users=sd.n_users, mean_cos_dist=sd.mean, std_cos_dist=sd.std,
                k_star=k_star, mean_centroid_dist=cent_mean,
                silhouette_t=sil_t, silhouette_t_next=sil_next))

        with open(rows_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(drift_mod.DriftReport.HEADER)
            for r in report_rows:
                writer.writerow([r.subreddit, r.class_label, r.window_pair,
                                 r.n_users, repr(r.mean_cos_dist),
                                 repr(r.std_cos_dist),
                                 "" if r.k_star is None else r.k_star,
                                 "" if r.mean_centroid_dist is None else repr(r.mean_centroid_dist),
                                 "" if r.silhouette_t is None else repr(r.silhouette_t),
                                 "" if r.silhouette_t_next is None else repr(r.silhouette_t_next)])

    return _map_subreddits(cfg, analyze_one, sorted(manifest.classes))


def _cluster_pair(cfg: PipelineConfig, projection, tgt_label, src_label, sub):
    """Elbow + KMeans per window side of a pair's projection, at the shared k*."""
    sides = {}
    for label in (tgt_label, src_label):
        pts = projection.coordinates[
            [i for i, t in enumerate(projection.tags) if t[1] == label]]
        sides[label] = pts

    k_lo, k_hi = cfg.k_range
    seed = derive_seed(cfg.seed, sub, "cluster", tgt_label, src_label)
    chosen = {}
    for label, pts in sides.items():
        hi = min(k_hi, len(pts) - 1)
        if hi < k_lo:
            logger.warning("%s/%s: too few points (%d) to cluster", sub, label,
                           len(pts))
            return None, None, None, None
        try:
            k_star, _ = drift_mod.elbow_k(pts, range(k_lo, hi + 1), seed=seed)
        except ValueError as exc:
            logger.warning("%s/%s: elbow failed: %s", sub, label, exc)
            return None, None, None, None
        chosen[label] = k_star

    shared_k = min(chosen.values())
    clusterings = {label: drift_mod.kmeans(pts, shared_k, seed=seed)
                   for label, pts in sides.items()}
    cent = drift_mod.centroid_drift(clusterings[tgt_label],
                                    clusterings[src_label],
                                    window_pair=(tgt_label, src_label))

    def safe_silhouette(clustering):
        try:
            return drift_mod.silhouette(clustering.points, clustering.labels)
        except ValueError:
            return None

    return (shared_k, cent.mean_distance,
            safe_silhouette(clusterings[tgt_label]),
            safe_silhouette(clusterings[src_label]))


def stage_report(cfg: PipelineConfig, manifest: DatasetManifest,
                 force: bool = False) -> dict:
    ws = Workspace(cfg)
    out = ws.out
    out.mkdir(parents=True, exist_ok=True)
    labels = manifest.window_labels
    subs = sorted(manifest.classes)

    # Table-1 analogue
    snapshots = [load_window_snapshot(ws, sub, label)
                 for sub in subs for label in labels]
    (out / "summary.csv").write_text(summarize(snapshots).to_csv())

    # Fig-3 analogue: concatenate per-subreddit duplicate evaluations
    eval_rows = []
    for sub in subs:
        if _is_skipped(ws, sub):
            continue
        path = ws.eval_path(sub)
        if not path.exists():
            raise StageDependencyError("align", path)
        with open(path) as fh:
            reader = csv.reader(fh)
            next(reader)
            eval_rows.extend(reader)
    with open(out / "alignment_eval.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subreddit", "window_pair", "baseline_mean",
                         "baseline_std", "aligned_mean", "aligned_std",
                         "n_users"])
        writer.writerows(eval_rows)

    # Fig-4/5 analogues
    report = drift_mod.DriftReport()
    for sub in subs:
        if _is_skipped(ws, sub):
            continue
        path = ws.drift_rows_path(sub)
        if not path.exists():
            raise StageDependencyError("analyze", path)
        with open(path) as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                opt = lambda v, cast: None if v == "" else cast(v)
                report.rows.append(drift_mod.DriftReportRow(
                    subreddit=row["subreddit"], class_label=row["class"],
                    window_pair=row["window_pair"],
                    n_users=int(row["n_users"]),
                    mean_cos_dist=float(row["mean_cos_dist"]),
                    std_cos_dist=float(row["std_cos_dist"]),
                    k_star=opt(row["k_star"], int),
                    mean_centroid_dist=opt(row["mean_centroid_dist"], float),
                    silhouette_t=opt(row["silhouette_t"], float),
                    silhouette_t_next=opt(row["silhouette_t_next"], float)))
    (out / "drift.csv").write_text(report.to_csv())

    plot_dir = out / "plots"
    plot_dir.mkdir(exist_ok=True)
    for sub in subs:
        if _is_skipped(ws, sub):
            continue
        for tgt_label, src_label in zip(labels[:-1], labels[1:]):
            pair_name = f"{tgt_label}-{src_label}"
            proj_path = ws.projection_path(sub, pair_name)
            if proj_path.exists():
                projection = _load_projection(proj_path)
                plots.scatter_projection(
                    projection, f"{sub} {pair_name}",
                    plot_dir / f"{sub}_{pair_name}.svg")
    if report.rows:
        ordered = sorted(report.rows, key=lambda r: (r.subreddit, r.window_pair))
        plots.drift_bars(ordered, plot_dir / "drift_bars.svg")
    return {}


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def run_pipeline(cfg: PipelineConfig) -> RunManifest:
    """Execute all stages, resuming from cached artifacts, and write the
    run manifest with digests of every emitted file."""
    manifest = load_manifest(cfg.manifest_path)
    run = RunManifest(config=_flatten_config(cfg))
    ws = Workspace(cfg)
    ws.out.mkdir(parents=True, exist_ok=True)

    stage_fns = {
        "ingest": stage_ingest,
        "embed": stage_embed,
        "align": stage_align,
        "analyze": stage_analyze,
        "report": stage_report,
    }
    for stage in STAGES:
        start = time.perf_counter()
        failures = stage_fns[stage](cfg, manifest)
        run.stage_timings[stage] = time.perf_counter() - start
        for sub, reason in (failures or {}).items():
            run.skipped[sub] = f"{stage}: {reason}"
    for sub in sorted(manifest.classes):
        reason = _is_skipped(ws, sub)
        if reason:
            run.skipped.setdefault(sub, reason)

    manifest_path = ws.out / "run_manifest"
    for path in sorted(ws.out.rglob("*")):
        if path.is_file() and path != manifest_path:
            run.artifacts[str(path.relative_to(ws.out))] = _digest(path)
    run.write(manifest_path)
    return run


def _flatten_config(cfg: PipelineConfig) -> dict:
    flat = {}
    for key, value in cfg.resolved().items():
        if isinstance(value, dict):
            for k2, v2 in value.items():
                flat[f"{key}.{k2}"] = v2
        else:
            flat[key] = value
    return flat
