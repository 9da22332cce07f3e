"""Latent-factor prediction of attention levels from sparse records.

Bias-augmented matrix factorization trained by SGD on observed (user, object,
level) triples with L2 shrinkage, plus mean-imputation baselines and holdout
metrics. Predicted levels are inner products in a shared semantic space,
clamped to the 1..5 level range at prediction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .records import SparseAttentionRecords

MODEL_FORMAT_VERSION = "attn-mf/1"

LEVEL_CLAMP = (1.0, 5.0)


class FitError(ValueError):
    """Model fitting is impossible (e.g. no records)."""


class EvaluationError(ValueError):
    """Metrics requested over an empty holdout mask."""


@dataclass(frozen=True)
class FitConfig:
    f: int = 6
    learning_rate: float = 0.01
    regularization: float = 0.05
    epochs: int = 200
    init_scale: float = 1.0
    seed: int = 0

    def validate(self):
        if self.f < 1:
            raise FitError("latent dimension f must be >= 1")
        if self.learning_rate <= 0:
            raise FitError("learning_rate must be positive")
        if self.regularization < 0:
            raise FitError("regularization must be non-negative")
        if self.epochs < 1:
            raise FitError("epochs must be >= 1")
        if self.init_scale <= 0:
            raise FitError("init_scale must be positive")


@dataclass(frozen=True)
class FactorModel:
    user_factors: np.ndarray   # num_users x f
    object_factors: np.ndarray  # num_objects x f
    user_bias: np.ndarray
    object_bias: np.ndarray
    mu: float
    training_curve: tuple = ()  # epoch-averaged squared error, informational

    def __post_init__(self):
        for name in ("user_factors", "object_factors", "user_bias", "object_bias"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.user_factors.shape[1] != self.object_factors.shape[1]:
            raise ValueError("user and object factors disagree on latent dimension")

    @property
    def f(self) -> int:
        return self.user_factors.shape[1]

    @property
    def num_users(self) -> int:
        return self.user_factors.shape[0]

    @property
    def num_objects(self) -> int:
        return self.object_factors.shape[0]

    def predictor(self):
        return lambda u, o: predict(self, u, o)


def fit_mf(records: SparseAttentionRecords, config: FitConfig,
           num_users: int | None = None, num_objects: int | None = None) -> FactorModel:
    """Fit the factor model by seeded SGD over the observed triples.

    Records are sorted by (user, object) and then visited in a seeded random
    order each epoch, so the result is a pure function of (records, config).
    """
    config.validate()
    if len(records) == 0:
        raise FitError("cannot fit on empty records")

    triples = records.sorted_list()
    users = np.array([t[0] for t in triples])
    objects = np.array([t[1] for t in triples])
    levels = np.array([t[2] for t in triples], dtype=np.float64)
    nu = num_users if num_users is not None else int(users.max()) + 1
    no = num_objects if num_objects is not None else int(objects.max()) + 1
    if users.max() >= nu or objects.max() >= no:
        raise FitError("record ids exceed the requested model dimensions")

    rng = np.random.default_rng(config.seed)
    f = config.f
    U = rng.uniform(-0.05, 0.05, size=(nu, f)) * config.init_scale
    V = rng.uniform(-0.05, 0.05, size=(no, f)) * config.init_scale
    bu = np.zeros(nu)
    bo = np.zeros(no)
    mu = float(levels.mean())

    lr = config.learning_rate
    # multiplicative shrinkage, floored at full shrink so huge regularization
    # stays numerically stable instead of diverging
    decay = max(0.0, 1.0 - lr * config.regularization)

    curve = []
    n = len(triples)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        sq = 0.0
        for i in order:
            u, o = users[i], objects[i]
            uf = U[u]
            vf = V[o]
            err = levels[i] - (mu + bu[u] + bo[o] + uf @ vf)
            sq += err * err
            new_u = uf * decay + lr * err * vf
            new_v = vf * decay + lr * err * uf
            U[u] = new_u
            V[o] = new_v
            bu[u] = bu[u] * decay + lr * err
            bo[o] = bo[o] * decay + lr * err
        curve.append(sq / n)

    return FactorModel(
        user_factors=U, object_factors=V, user_bias=bu, object_bias=bo,
        mu=mu, training_curve=tuple(curve),
    )


def raw_score(model: FactorModel, user: int, object_id: int) -> float:
    if not (0 <= user < model.num_users) or not (0 <= object_id < model.num_objects):
        raise IndexError(f"pair ({user}, {object_id}) outside model dimensions")
    return float(
        model.mu + model.user_bias[user] + model.object_bias[object_id]
        + model.user_factors[user] @ model.object_factors[object_id]
    )


def predict(model: FactorModel, user: int, object_id: int, clamp=LEVEL_CLAMP) -> float:
    score = raw_score(model, user, object_id)
    if clamp is None:
        return score
    lo, hi = clamp
    return float(min(max(score, lo), hi))


def predict_scene(model: FactorModel, user: int, objects) -> np.ndarray:
    """Clamped predictions for a scene's objects, in input order."""
    objects = list(objects)
    if not objects:
        raise ValueError("scene object list must be non-empty")
    return np.array([predict(model, user, o) for o in objects])


@dataclass(frozen=True)
class BaselineModel:
    """Global/user/object mean imputation with additive blending."""

    mu: float
    user_means: dict = field(default_factory=dict)
    object_means: dict = field(default_factory=dict)
    blend_rule: str = "additive-deviations"

    def predict(self, user: int, object_id: int) -> float:
        score = self.mu
        if user in self.user_means:
            score += self.user_means[user] - self.mu
        if object_id in self.object_means:
            score += self.object_means[object_id] - self.mu
        lo, hi = LEVEL_CLAMP
        return float(min(max(score, lo), hi))

    def predictor(self):
        return self.predict


def fit_baseline(records: SparseAttentionRecords) -> BaselineModel:
    if len(records) == 0:
        raise FitError("cannot fit on empty records")
    user_acc: dict = {}
    object_acc: dict = {}
    total = 0.0
    for user, object_id, level in records:
        user_acc.setdefault(user, []).append(level)
        object_acc.setdefault(object_id, []).append(level)
        total += level
    mu = total / len(records)
    return BaselineModel(
        mu=mu,
        user_means={u: float(np.mean(v)) for u, v in user_acc.items()},
        object_means={o: float(np.mean(v)) for o, v in object_acc.items()},
    )


@dataclass(frozen=True)
class Metrics:
    rmse: float
    mae: float
    count: int


def evaluate(predict_fn, truth, mask) -> Metrics:
    """RMSE/MAE of a predictor against ground-truth levels over held-out pairs."""
    pairs = sorted(mask)
    if not pairs:
        raise EvaluationError("holdout mask is empty")
    errors = np.array([predict_fn(u, o) - truth.levels[u, o] for u, o in pairs])
    return Metrics(
        rmse=float(np.sqrt(np.mean(errors ** 2))),
        mae=float(np.mean(np.abs(errors))),
        count=len(pairs),
    )


def holdout_mask(records: SparseAttentionRecords, num_users: int, num_objects: int,
                 fraction: float = 0.25, seed: int = 0) -> set:
    """Sample unobserved (user, object) pairs, stratified per user."""
    observed = records.pairs()
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(77,)))
    mask = set()
    for user in range(num_users):
        candidates = [o for o in range(num_objects) if (user, o) not in observed]
        if not candidates:
            continue
        k = max(1, round(fraction * len(candidates)))
        chosen = rng.choice(len(candidates), size=min(k, len(candidates)), replace=False)
        mask.update((user, candidates[int(i)]) for i in chosen)
    return mask


def model_to_dict(model: FactorModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "num_users": model.num_users,
        "num_objects": model.num_objects,
        "f": model.f,
        "mu": model.mu,
        "user_bias": list(model.user_bias),
        "object_bias": list(model.object_bias),
        "user_factors": [list(row) for row in model.user_factors],
        "object_factors": [list(row) for row in model.object_factors],
    }


def model_from_dict(doc: dict) -> FactorModel:
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model file version {doc.get('version')!r}")
    return FactorModel(
        user_factors=np.array(doc["user_factors"], dtype=np.float64),
        object_factors=np.array(doc["object_factors"], dtype=np.float64),
        user_bias=np.array(doc["user_bias"], dtype=np.float64),
        object_bias=np.array(doc["object_bias"], dtype=np.float64),
        mu=float(doc["mu"]),
    )


def save_model(model: FactorModel, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> FactorModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
