"""The classifier pool: model records with data memories and their upkeep.

Each model couples a logistic classifier with the window of points it was
built from, the dense distance band of that window, and a performance score
omega. Incoming points are routed into model memories or the general memory;
drift verdicts trigger retraining and new-model generation.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DataPoint, InputError, SOURCE_CORROBORATIVE, cosine_distance
from .windows import (
    GENERALIZATION,
    INSIDE,
    DataWindow,
    DeltaBand,
    ROLE_CLASSIFIER,
    band_membership,
    centroid_distances,
    empirical_delta_band,
)

log = logging.getLogger(__name__)

DEFAULT_GENERAL_CAPACITY = 3000
LAMBDA_MARGIN = 0.05  # generalization band width beyond the delta band


class PoolError(Exception):
    """Training preconditions not met; caller should defer."""


@dataclass
class PoolConfig:
    """Knobs for routing, training, and team selection."""

    lam: float | None = None  # None: per model, band.hi + LAMBDA_MARGIN capped at 1
    delta: float = 0.6
    k: int = 5
    min_train: int = 50
    learn_rate: float = 0.1
    epochs: int = 20
    seed: int = 0

    def effective_lambda(self, band: DeltaBand) -> float:
        if self.lam is None:
            return min(band.hi + LAMBDA_MARGIN, 1.0)
        # a configured lambda below a band's hi is clamped up per model
        return min(max(self.lam, band.hi), 1.0)


@dataclass
class ModelRecord:
    """A classifier plus the memory window and band that define its region."""

    id: str
    weights: np.ndarray  # length d+1, bias last
    memory: DataWindow
    band: DeltaBand
    omega: float
    created_at: int
    last_evaluated: int

    def __post_init__(self):
        if not (0.0 <= self.omega <= 1.0):
            raise InputError(f"omega {self.omega} outside [0, 1]")


class GeneralMemory:
    """Buffer of points that fit no model's region; seeds new classifiers."""

    def __init__(self, capacity: int = DEFAULT_GENERAL_CAPACITY):
        self.capacity = capacity
        self.points: list[DataPoint] = []

    def __len__(self) -> int:
        return len(self.points)

    def append(self, point: DataPoint) -> None:
        self.points.append(point)
        if len(self.points) > self.capacity:
            del self.points[: len(self.points) - self.capacity]

    def labeled(self) -> list[DataPoint]:
        return [p for p in self.points if p.label is not None]

    def clear(self) -> None:
        self.points = []


class Pool:
    """Mutable pool of model records plus the general memory. Single writer."""

    def __init__(self, general_capacity: int = DEFAULT_GENERAL_CAPACITY):
        self.models: list[ModelRecord] = []
        self.general = GeneralMemory(general_capacity)
        self._next_model = 0

    def next_model_id(self) -> str:
        self._next_model += 1
        return f"m{self._next_model:04d}"

    def by_id(self, model_id: str) -> ModelRecord:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(model_id)

    def apply_labels(self, labels: dict[str, tuple[int, str]]) -> None:
        """Swap labeled copies of points into memories and the general memory.

        Points are immutable, so delayed labels propagate by replacement; the
        vectors are unchanged, which leaves centroids intact.
        """
        windows = [m.memory for m in self.models]
        for w in windows:
            for i, p in enumerate(w.points):
                if p.id in labels and p.label is None:
                    lab, src = labels[p.id]
                    w.replace_point(i, p.with_label(lab, src))
        gm = self.general
        for i, p in enumerate(gm.points):
            if p.id in labels and p.label is None:
                lab, src = labels[p.id]
                gm.points[i] = p.with_label(lab, src)

    def snapshot(self) -> list["ModelView"]:
        """Immutable per-model views for the concurrent prediction path."""
        return [
            ModelView(
                id=m.id,
                weights=m.weights.copy(),
                centroid=m.memory.centroid.copy(),
                band=m.band,
                omega=m.omega,
                created_at=m.created_at,
            )
            for m in self.models
        ]


@dataclass(frozen=True)
class ModelView:
    """Frozen slice of a model record: everything prediction needs."""

    id: str
    weights: np.ndarray
    centroid: np.ndarray
    band: DeltaBand
    omega: float
    created_at: int


@dataclass(frozen=True)
class RoutingOutcome:
    models_appended: tuple[str, ...]
    updated: tuple[str, ...]
    general_memory_hit: bool


@dataclass(frozen=True)
class PoolDelta:
    retrained: tuple[str, ...]
    generated: tuple[str, ...]


def f_score(y_true, y_pred) -> float:
    """Harmonic mean of precision and recall at the 0.5 threshold.

    All-correct with no positives anywhere counts as 1.0; any missed or
    spurious positive with zero true positives counts as 0.0.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    if tp + fp + fn == 0:
        return 1.0
    return 2.0 * tp / (2.0 * tp + fp + fn)


def _design_matrix(points: list[DataPoint]) -> tuple[np.ndarray, np.ndarray]:
    x = np.stack([p.vec for p in points])
    x = np.hstack([x, np.ones((len(points), 1))])  # bias column
    y = np.array([p.label for p in points], dtype=np.float64)
    return x, y


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def logistic_loss_and_grad(
    weights: np.ndarray, x: np.ndarray, y: np.ndarray, sample_weight=None
):
    """Mean negative log-likelihood of the logistic model and its gradient."""
    z = x @ weights
    p = np.clip(sigmoid(z), 1e-12, 1.0 - 1e-12)
    w = np.ones_like(y) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    loss = float(-np.sum(w * (y * np.log(p) + (1.0 - y) * np.log(1.0 - p))) / w.sum())
    grad = x.T @ (w * (p - y)) / w.sum()
    return loss, grad


def _balanced_weights(y: np.ndarray) -> np.ndarray:
    # corroborative labels arrive with arbitrary class skew; weighting each
    # class to equal mass keeps the bias from chasing the label supply
    pos = float(np.sum(y == 1))
    neg = float(len(y) - pos)
    return np.where(y == 1, 0.5 * len(y) / pos, 0.5 * len(y) / neg)


def _fit_logistic(x, y, cfg: PoolConfig, init: np.ndarray | None) -> np.ndarray:
    w = np.zeros(x.shape[1]) if init is None else init.astype(np.float64).copy()
    sample_weight = _balanced_weights(y)
    for _ in range(cfg.epochs):
        _, grad = logistic_loss_and_grad(w, x, y, sample_weight)
        w -= cfg.learn_rate * grad
    return w


def predict_raw(model: ModelRecord | ModelView, point: DataPoint) -> float:
    """Classifier probability sigmoid(w.x + b), kept strictly inside (0, 1)."""
    w = model.weights
    if len(point.vec) + 1 != len(w):
        raise InputError(f"dim mismatch: point {len(point.vec)}, weights {len(w)}")
    z = float(point.vec @ w[:-1] + w[-1])
    return float(np.clip(sigmoid(np.float64(z)), 1e-15, 1.0 - 1e-15))


def predict_raw_batch(model: ModelRecord | ModelView, vectors: np.ndarray) -> np.ndarray:
    z = vectors @ model.weights[:-1] + model.weights[-1]
    return np.clip(sigmoid(z), 1e-15, 1.0 - 1e-15)


def train_classifier(
    data: list[DataPoint],
    cfg: PoolConfig,
    model_id: str = "m0001",
    created_at: int = 0,
    init_weights: np.ndarray | None = None,
    memory_capacity: int = DEFAULT_GENERAL_CAPACITY,
) -> ModelRecord:
    """Fit a logistic model by full-batch gradient descent.

    Weights are learned on the labeled subset; all passed points form the
    memory window whose distance band defines the model's region. Omega starts
    as the f-score on the training labels.
    """
    labeled = [p for p in data if p.label is not None]
    classes = {p.label for p in labeled}
    if len(labeled) < cfg.min_train:
        raise PoolError(
            f"need at least {cfg.min_train} labeled points, got {len(labeled)}; defer generation"
        )
    if classes != {0, 1}:
        raise PoolError("single-class training data; defer generation")
    x, y = _design_matrix(labeled)
    weights = _fit_logistic(x, y, cfg, init_weights)
    memory = DataWindow(
        data, capacity=max(memory_capacity, len(data)),
        role=ROLE_CLASSIFIER, window_id=model_id,
    )
    band = empirical_delta_band(centroid_distances(memory), cfg.delta)
    preds = (predict_raw_batch_weights(weights, x) >= 0.5).astype(int)
    omega = f_score(y.astype(int), preds)
    return ModelRecord(
        id=model_id, weights=weights, memory=memory, band=band,
        omega=omega, created_at=created_at, last_evaluated=created_at,
    )


def predict_raw_batch_weights(weights: np.ndarray, x_with_bias: np.ndarray) -> np.ndarray:
    return np.clip(sigmoid(x_with_bias @ weights), 1e-15, 1.0 - 1e-15)


def fine_tune_step(model: ModelRecord, point: DataPoint, cfg: PoolConfig) -> None:
    """One gradient step at a tenth of the learning rate on a single point."""
    x = np.concatenate([point.vec, [1.0]])
    p = sigmoid(np.float64(x @ model.weights))
    model.weights = model.weights - (cfg.learn_rate / 10.0) * (float(p) - point.label) * x


def k_nearest(models: list, vec: np.ndarray, k: int) -> list:
    """The k models with memory centroids closest to ``vec``.

    Ties break toward older created_at, then lexicographic id. Works on
    ModelRecord (live centroid) and ModelView (frozen centroid) alike.
    """
    def centroid_of(m):
        return m.centroid if hasattr(m, "centroid") else m.memory.centroid

    ranked = sorted(
        models, key=lambda m: (cosine_distance(vec, centroid_of(m)), m.created_at, m.id)
    )
    return ranked[:k]


def process_point(pool: Pool, point: DataPoint, cfg: PoolConfig) -> RoutingOutcome:
    """Route one point through the k selected models.

    A point landing strictly inside a model's band joins that memory and marks
    the point as owned; a corroboratively labeled hit also fine-tunes the
    model. A point in the generalization margin joins the memory without
    claiming ownership. Unowned points fall through to the general memory.
    """
    appended: list[str] = []
    updated: list[str] = []
    owned = False
    for model in k_nearest(pool.models, point.vec, cfg.k):
        d = cosine_distance(point.vec, model.memory.centroid)
        membership = band_membership(model.band, d, cfg.effective_lambda(model.band))
        if membership == INSIDE:
            model.memory.append(point)
            appended.append(model.id)
            owned = True
            if point.label is not None and point.label_source == SOURCE_CORROBORATIVE:
                fine_tune_step(model, point, cfg)
                updated.append(model.id)
        elif membership == GENERALIZATION:
            model.memory.append(point)
            appended.append(model.id)
    if not owned:
        pool.general.append(point)
    return RoutingOutcome(tuple(appended), tuple(updated), general_memory_hit=not owned)


def on_drift(pool: Pool, verdicts: dict, cfg: PoolConfig, window_index: int = 0) -> PoolDelta:
    """React to drift verdicts: retrain drifted models, generate from general memory.

    Drifted models are refit (warm start) on their memory's labeled subset when
    both classes are present, and their bands are rebuilt either way. If the
    general memory holds enough labeled points of both classes, one new model
    is generated from it and the consumed points are cleared.
    """
    retrained: list[str] = []
    generated: list[str] = []
    for model in pool.models:
        verdict = verdicts.get(model.id)
        if verdict is None or not verdict.drifted:
            continue
        labeled = [p for p in model.memory.points if p.label is not None]
        if labeled and {p.label for p in labeled} == {0, 1}:
            x, y = _design_matrix(labeled)
            model.weights = _fit_logistic(x, y, cfg, init=model.weights)
        else:
            log.info("model %s drifted but lacks two-class labels; band rebuild only", model.id)
        model.band = empirical_delta_band(centroid_distances(model.memory), cfg.delta)
        retrained.append(model.id)

    gm_labeled = pool.general.labeled()
    if len(gm_labeled) >= cfg.min_train and {p.label for p in gm_labeled} == {0, 1}:
        model_id = pool.next_model_id()
        record = train_classifier(
            list(pool.general.points), cfg, model_id=model_id,
            created_at=window_index, memory_capacity=pool.general.capacity,
        )
        pool.models.append(record)
        pool.general.clear()
        generated.append(model_id)
    elif gm_labeled:
        log.info(
            "general memory: %d labeled points, generation deferred", len(gm_labeled)
        )
    return PoolDelta(tuple(retrained), tuple(generated))


def evaluate_models(pool: Pool, labeled: list[DataPoint], window_index: int | None = None) -> dict[str, float]:
    """Refresh omega as the f-score over labeled points inside each model's band.

    Models with no in-band labeled evidence keep their previous omega.
    """
    if not labeled:
        raise InputError("need at least one labeled point")
    omegas: dict[str, float] = {}
    for model in pool.models:
        # inside/outside does not depend on lambda, so the minimal one is fine
        in_band = []
        for p in labeled:
            d = cosine_distance(p.vec, model.memory.centroid)
            if band_membership(model.band, d, model.band.hi) == INSIDE:
                in_band.append(p)
        if in_band:
            y = np.array([p.label for p in in_band])
            preds = np.array([1 if predict_raw(model, p) >= 0.5 else 0 for p in in_band])
            model.omega = f_score(y, preds)
            if window_index is not None:
                model.last_evaluated = window_index
        omegas[model.id] = model.omega
    return omegas


# ---------------------------------------------------------------------------
# Checkpointing: JSON round-trip that restores behavior bit-exactly.
# ---------------------------------------------------------------------------

def _point_to_json(p: DataPoint) -> dict:
    return {
        "id": p.id, "ts": p.ts, "lat": p.lat, "lon": p.lon, "text": p.text,
        "label": p.label, "label_source": p.label_source, "vec": p.vec.tolist(),
    }


def _point_from_json(d: dict) -> DataPoint:
    return DataPoint(
        id=d["id"], ts=d["ts"], lat=d["lat"], lon=d["lon"], text=d["text"],
        label=d["label"], label_source=d["label_source"],
        vec=np.array(d["vec"], dtype=np.float64),
    )


def _window_to_json(w: DataWindow) -> dict:
    return {
        "capacity": w.capacity, "role": w.role, "id": w.id,
        "vec_sum": None if w._vec_sum is None else w._vec_sum.tolist(),
        "points": [_point_to_json(p) for p in w.points],
    }


def _window_from_json(d: dict) -> DataWindow:
    w = DataWindow(capacity=d["capacity"], role=d["role"], window_id=d["id"])
    w.points = [_point_from_json(p) for p in d["points"]]
    # restore the running sum verbatim so incremental state continues bit-exact
    w._vec_sum = None if d["vec_sum"] is None else np.array(d["vec_sum"], dtype=np.float64)
    return w


def save_pool(pool: Pool, path: str | Path) -> None:
    doc = {
        "next_model": pool._next_model,
        "general": {
            "capacity": pool.general.capacity,
            "points": [_point_to_json(p) for p in pool.general.points],
        },
        "models": [
            {
                "id": m.id,
                "weights": m.weights.tolist(),
                "omega": m.omega,
                "created_at": m.created_at,
                "last_evaluated": m.last_evaluated,
                "band": {
                    "delta": m.band.delta, "lo": m.band.lo, "hi": m.band.hi,
                    "kind": m.band.estimate_kind,
                },
                "memory": _window_to_json(m.memory),
            }
            for m in pool.models
        ],
    }
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")


def load_pool(path: str | Path) -> Pool:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    pool = Pool(general_capacity=doc["general"]["capacity"])
    pool._next_model = doc["next_model"]
    pool.general.points = [_point_from_json(p) for p in doc["general"]["points"]]
    for md in doc["models"]:
        band = DeltaBand(
            delta=md["band"]["delta"], lo=md["band"]["lo"], hi=md["band"]["hi"],
            estimate_kind=md["band"]["kind"],
        )
        pool.models.append(
            ModelRecord(
                id=md["id"], weights=np.array(md["weights"], dtype=np.float64),
                memory=_window_from_json(md["memory"]), band=band,
                omega=md["omega"], created_at=md["created_at"],
                last_evaluated=md["last_evaluated"],
            )
        )
    return pool
