"""Synthetic user-object-attention world.

Generates a catalog of objects, grouped scene images with pixel compositions,
and a latent per-user interest matrix; computes ground-truth attention values
(gaze mass on an object divided by the pixels it occupies) and produces sparse
observation records by sampling service groups and image subsets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .records import SparseAttentionRecords

WORLD_FORMAT_VERSION = "uoal-sim/1"

# stream tags so gaze noise / sparsify / scene draws never share a substream
_GAZE_STREAM = 101
_SPARSIFY_STREAM = 102


class ConfigurationError(ValueError):
    """Invalid world generation parameters."""


class ObjectAbsentError(KeyError):
    """The object does not occur in any image of the requested subset."""


@dataclass(frozen=True)
class WorldConfig:
    """Knobs for synthetic world generation.

    ``latent_rank`` is the rank of the latent product behind the interest
    matrix. ``hot_fraction`` is the per-user share of objects whose interest
    saturates near 1; ``interest_exponent`` controls how sharply interest
    falls off below that plateau (higher = steeper cliff down to the flat
    ``interest_floor`` baseline). ``interest_noise`` is the half-width of the
    multiplicative noise applied after squashing.
    """

    num_users: int = 30
    num_objects: int = 96
    num_images: int = 1000
    num_groups: int = 5
    latent_rank: int = 6
    interest_noise: float = 0.1
    interest_exponent: float = 16.0
    interest_floor: float = 0.1
    hot_fraction: float = 0.15
    gaze_noise: float = 0.0
    group_bias: float = 3.0
    object_popularity_exponent: float = 2.5
    min_objects_per_image: int = 3
    max_objects_per_image: int = 12
    min_pixels_per_object: int = 200
    max_pixels_per_object: int = 5000
    max_image_pixels: int = 360 * 640

    def validate(self) -> None:
        counts = {
            "num_users": self.num_users,
            "num_objects": self.num_objects,
            "num_images": self.num_images,
            "num_groups": self.num_groups,
            "latent_rank": self.latent_rank,
        }
        for name, value in counts.items():
            if value < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {value}")
        if self.num_groups > self.num_images:
            raise ConfigurationError("num_groups cannot exceed num_images")
        if not (0.0 <= self.interest_noise < 1.0):
            raise ConfigurationError("interest_noise must be in [0, 1)")
        if not (0.0 <= self.gaze_noise < 1.0):
            raise ConfigurationError("gaze_noise must be in [0, 1)")
        if self.interest_exponent <= 0:
            raise ConfigurationError("interest_exponent must be positive")
        if not (0.0 <= self.interest_floor < 1.0):
            raise ConfigurationError("interest_floor must be in [0, 1)")
        if not (0.0 < self.hot_fraction <= 1.0):
            raise ConfigurationError("hot_fraction must be in (0, 1]")
        if self.group_bias < 1.0:
            raise ConfigurationError("group_bias must be >= 1")
        if self.object_popularity_exponent < 0:
            raise ConfigurationError("object_popularity_exponent must be >= 0")
        if not (1 <= self.min_objects_per_image <= self.max_objects_per_image):
            raise ConfigurationError("invalid objects-per-image range")
        if self.max_objects_per_image > self.num_objects:
            raise ConfigurationError("max_objects_per_image exceeds num_objects")
        if not (1 <= self.min_pixels_per_object <= self.max_pixels_per_object):
            raise ConfigurationError("invalid pixels-per-object range")
        if self.max_objects_per_image * self.max_pixels_per_object > self.max_image_pixels:
            raise ConfigurationError("pixel budget can be exceeded; shrink per-object pixels")


@dataclass(frozen=True)
class ObjectCatalog:
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ValueError("catalog must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("catalog labels must be unique")

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class SceneImage:
    image_id: int
    group_id: int
    composition: tuple  # ((object_id, pixel_count), ...)

    def __post_init__(self):
        object.__setattr__(self, "composition", tuple(map(tuple, self.composition)))
        if not self.composition:
            raise ValueError(f"image {self.image_id} has no objects")
        oids = [o for o, _ in self.composition]
        if len(set(oids)) != len(oids):
            raise ValueError(f"image {self.image_id} repeats an object id")
        if any(px < 1 for _, px in self.composition):
            raise ValueError(f"image {self.image_id} has a non-positive pixel count")

    def objects(self):
        return [o for o, _ in self.composition]

    def pixel_count(self, object_id: int):
        for o, px in self.composition:
            if o == object_id:
                return px
        return None


@dataclass(frozen=True)
class GroundTruthLevels:
    """Dense num_users x num_objects matrix of attention levels 1..5."""

    levels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.levels, dtype=np.int64)
        if arr.ndim != 2 or not ((arr >= 1) & (arr <= 5)).all():
            raise ValueError("levels must be a 2-D matrix with entries in 1..5")
        arr.setflags(write=False)
        object.__setattr__(self, "levels", arr)


@dataclass(frozen=True)
class World:
    catalog: ObjectCatalog
    images: tuple
    interest: np.ndarray  # num_users x num_objects, entries in (0, 1]
    num_users: int
    seed: int
    gaze_noise: float = 0.0

    def __post_init__(self):
        interest = np.asarray(self.interest, dtype=np.float64)
        if interest.shape != (self.num_users, len(self.catalog)):
            raise ValueError("interest matrix shape does not match users x objects")
        if (interest <= 0).any() or (interest > 1).any():
            raise ValueError("interest entries must lie in (0, 1]")
        interest.setflags(write=False)
        object.__setattr__(self, "interest", interest)
        object.__setattr__(self, "images", tuple(self.images))

    @property
    def num_objects(self) -> int:
        return len(self.catalog)

    @property
    def num_groups(self) -> int:
        return max(im.group_id for im in self.images) + 1

    def group_image_ids(self, group_id: int) -> list:
        return [im.image_id for im in self.images if im.group_id == group_id]

    def image_by_id(self, image_id: int) -> SceneImage:
        return self._image_index()[image_id]

    def _image_index(self) -> dict:
        cache = getattr(self, "_image_index_cache", None)
        if cache is None:
            cache = {im.image_id: im for im in self.images}
            object.__setattr__(self, "_image_index_cache", cache)
        return cache


def generate_world(config: WorldConfig, seed: int) -> World:
    """Build a deterministic synthetic world from a seed."""
    config.validate()
    rng = np.random.default_rng(seed)

    interest = _generate_interest(config, rng)
    images = _generate_images(config, rng)
    catalog = ObjectCatalog(tuple(f"object_{i:03d}" for i in range(config.num_objects)))

    return World(
        catalog=catalog,
        images=tuple(images),
        interest=interest,
        num_users=config.num_users,
        seed=seed,
        gaze_noise=config.gaze_noise,
    )


def _generate_interest(config: WorldConfig, rng) -> np.ndarray:
    users = rng.uniform(size=(config.num_users, config.latent_rank))
    objects = rng.uniform(size=(config.num_objects, config.latent_rank))
    raw = users @ objects.T
    # per-user squash: normalizing by an upper quantile and clipping makes the
    # hottest objects saturate near 1 while the power drives everything below
    # the quantile toward the additive floor, so each user has a hot plateau
    # over a flat cold baseline instead of vanishing ratios
    scale = np.quantile(raw, 1.0 - config.hot_fraction, axis=1, keepdims=True)
    shaped = np.clip(raw / scale, 0.0, 1.0) ** config.interest_exponent
    squashed = config.interest_floor + (1.0 - config.interest_floor) * shaped
    if config.interest_noise > 0:
        squashed = squashed * rng.uniform(
            1.0 - config.interest_noise, 1.0 + config.interest_noise, size=squashed.shape
        )
    return np.clip(squashed, 1e-9, 1.0)


def _generate_images(config: WorldConfig, rng) -> list:
    n_obj = config.num_objects
    # heavy-tailed object popularity (rare objects make the records sparse),
    # shuffled so popularity is not correlated with the group blocks
    popularity = (1.0 + np.arange(n_obj)) ** (-config.object_popularity_exponent)
    popularity = rng.permutation(popularity)
    # each group over-represents a disjoint block of objects
    blocks = np.array_split(np.arange(n_obj), config.num_groups)
    group_probs = []
    for g in range(config.num_groups):
        w = popularity.copy()
        w[blocks[g]] *= config.group_bias
        group_probs.append(w / w.sum())

    group_of = np.concatenate(
        [np.full(len(chunk), g) for g, chunk in
         enumerate(np.array_split(np.arange(config.num_images), config.num_groups))]
    )

    compositions = []
    seen = set()
    for image_id in range(config.num_images):
        g = int(group_of[image_id])
        k = int(rng.integers(config.min_objects_per_image, config.max_objects_per_image + 1))
        oids = rng.choice(n_obj, size=k, replace=False, p=group_probs[g])
        pixels = rng.integers(
            config.min_pixels_per_object, config.max_pixels_per_object + 1, size=k
        )
        comp = [(int(o), int(px)) for o, px in zip(oids, pixels)]
        seen.update(int(o) for o in oids)
        compositions.append(comp)

    # guarantee every object occurs at least once
    for missing in sorted(set(range(n_obj)) - seen):
        while True:
            idx = int(rng.integers(config.num_images))
            comp = compositions[idx]
            if any(o == missing for o, _ in comp):
                break
            px = int(rng.integers(config.min_pixels_per_object, config.max_pixels_per_object + 1))
            if sum(p for _, p in comp) + px <= config.max_image_pixels:
                comp.append((missing, px))
                break

    return [
        SceneImage(image_id=i, group_id=int(group_of[i]), composition=tuple(compositions[i]))
        for i in range(config.num_images)
    ]


def _gaze_factor(world: World, user: int, image_id: int, object_id: int) -> float:
    if world.gaze_noise <= 0:
        return 1.0
    sub = np.random.default_rng((world.seed, _GAZE_STREAM, user, image_id, object_id))
    return 1.0 + sub.uniform(-world.gaze_noise, world.gaze_noise)


def attention_from_gaze(pixel_counts, gaze_masses) -> float:
    """Attention value from observed occurrences of one object.

    The ratio of total gaze mass to total pixels occupied, capped at 1.
    """
    pixels = [float(px) for px in pixel_counts]
    masses = [float(m) for m in gaze_masses]
    if len(pixels) != len(masses) or not pixels:
        raise ValueError("need equally many pixel counts and gaze masses, at least one")
    if any(px <= 0 for px in pixels):
        raise ValueError("pixel counts must be positive")
    if any(m < 0 for m in masses):
        raise ValueError("gaze masses must be non-negative")
    return min(sum(masses) / sum(pixels), 1.0)


def raw_attention_values(world: World, user: int, image_ids) -> dict:
    """Attention value for every object occurring in the given images.

    Value = (sum of gaze mass over occurrences) / (sum of pixels over
    occurrences), gaze mass being interest * pixels * (1 + noise).
    """
    gaze_sum: dict = {}
    pixel_sum: dict = {}
    for image_id in image_ids:
        image = world.image_by_id(image_id)
        for object_id, px in image.composition:
            mass = world.interest[user, object_id] * px * _gaze_factor(world, user, image_id, object_id)
            gaze_sum[object_id] = gaze_sum.get(object_id, 0.0) + mass
            pixel_sum[object_id] = pixel_sum.get(object_id, 0.0) + px
    return {
        o: attention_from_gaze([pixel_sum[o]], [gaze_sum[o]]) for o in gaze_sum
    }


def attention_value(world: World, user: int, image_subset, object_id: int) -> float:
    """Ground-truth attention of one user to one object over an image subset."""
    values = raw_attention_values(world, user, image_subset)
    if object_id not in values:
        raise ObjectAbsentError(
            f"object {object_id} does not appear in the given image subset"
        )
    return values[object_id]


def quantize_levels(raw) -> list:
    """Equal-frequency quintile binning of (object_id, value) pairs.

    Ties break by ascending object_id; a constant list maps to level 3.
    Returns (object_id, level) pairs in the input order.
    """
    items = list(raw)
    if not items:
        return []
    for _, value in items:
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"attention value {value} outside [0, 1]")
    first = items[0][1]
    if all(v == first for _, v in items):
        return [(o, 3) for o, _ in items]
    n = len(items)
    order = sorted(range(n), key=lambda i: (items[i][1], items[i][0]))
    level_of_position = {}
    for rank, i in enumerate(order):
        level_of_position[i] = rank * 5 // n + 1
    return [(items[i][0], level_of_position[i]) for i in range(n)]


def ground_truth_levels(world: World) -> GroundTruthLevels:
    """Per-user quintile levels of attention values computed over all images."""
    all_ids = [im.image_id for im in world.images]
    levels = np.empty((world.num_users, world.num_objects), dtype=np.int64)
    for user in range(world.num_users):
        values = raw_attention_values(world, user, all_ids)
        pairs = quantize_levels(sorted(values.items()))
        for object_id, level in pairs:
            levels[user, object_id] = level
    return GroundTruthLevels(levels)


@dataclass(frozen=True)
class SparsifyInfo:
    """Diagnostics of one sparsification draw (for statistics tests)."""

    ran1: int
    ran2: int
    selected_groups: tuple
    retained_images: tuple


def sparsify_with_info(world: World, user: int, seed: int):
    """Sparse records for one user plus the draw diagnostics.

    Draws ran1 in {2,3,4} service groups and retains ran2% (integer percent in
    [30, 70]) of each selected group's images, then computes and quantizes
    attention values for the objects present. Independent substream per
    (seed, user); an empty retained subset (only possible for degenerate
    worlds) retries on the next substream.
    """
    if world.num_groups < 2:
        raise ValueError("sparsify requires a world with at least 2 groups")
    for attempt in range(100):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(_SPARSIFY_STREAM, user, attempt))
        )
        ran1 = int(rng.integers(2, 5))
        ran1 = min(ran1, world.num_groups)
        ran2 = int(rng.integers(30, 71))
        groups = sorted(int(g) for g in rng.choice(world.num_groups, size=ran1, replace=False))
        retained = []
        for g in groups:
            ids = world.group_image_ids(g)
            keep = round(ran2 * len(ids) / 100)
            if keep > 0:
                chosen = rng.choice(len(ids), size=keep, replace=False)
                retained.extend(ids[i] for i in sorted(int(c) for c in chosen))
        if not retained:
            continue
        values = raw_attention_values(world, user, retained)
        pairs = quantize_levels(sorted(values.items()))
        records = SparseAttentionRecords(
            frozenset((user, object_id, level) for object_id, level in pairs)
        )
        info = SparsifyInfo(
            ran1=ran1, ran2=ran2,
            selected_groups=tuple(groups),
            retained_images=tuple(retained),
        )
        return records, info
    raise RuntimeError("could not draw a non-empty retained image subset")


def sparsify(world: World, user: int, seed: int) -> SparseAttentionRecords:
    records, _ = sparsify_with_info(world, user, seed)
    return records


def world_to_dict(world: World) -> dict:
    return {
        "version": WORLD_FORMAT_VERSION,
        "seed": world.seed,
        "num_users": world.num_users,
        "gaze_noise": world.gaze_noise,
        "catalog": list(world.catalog.labels),
        "images": [
            {"id": im.image_id, "group": im.group_id,
             "composition": [[o, px] for o, px in im.composition]}
            for im in world.images
        ],
        "interest": [list(row) for row in world.interest],
    }


def world_from_dict(doc: dict) -> World:
    version = doc.get("version")
    if version != WORLD_FORMAT_VERSION:
        raise ValueError(f"unsupported world file version {version!r}")
    images = tuple(
        SceneImage(
            image_id=int(im["id"]), group_id=int(im["group"]),
            composition=tuple((int(o), int(px)) for o, px in im["composition"]),
        )
        for im in doc["images"]
    )
    return World(
        catalog=ObjectCatalog(tuple(doc["catalog"])),
        images=images,
        interest=np.array(doc["interest"], dtype=np.float64),
        num_users=int(doc["num_users"]),
        seed=int(doc["seed"]),
        gaze_noise=float(doc["gaze_noise"]),
    )


def save_world(world: World, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(world_to_dict(world), fh, indent=1)
        fh.write("\n")


def load_world(path) -> World:
    with open(path) as fh:
        return world_from_dict(json.load(fh))
