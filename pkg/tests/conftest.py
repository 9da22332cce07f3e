"""Shared fixtures: small worlds for unit tests and a cached default-config
pipeline runner so the slow stages (world generation, model fitting) run once
per seed across the whole session."""

import dataclasses

import pytest

from attnalloc import ExperimentConfig, ExperimentRunner, WorldConfig, generate_world

SMALL_WORLD = WorldConfig(
    num_users=4,
    num_objects=24,
    num_images=60,
    num_groups=3,
    max_objects_per_image=8,
)


@pytest.fixture(scope="session")
def small_world():
    return generate_world(SMALL_WORLD, seed=11)


@pytest.fixture(scope="session")
def default_world():
    return generate_world(WorldConfig(), seed=7)


@pytest.fixture(scope="session")
def runner_cache():
    """Factory returning a cached ExperimentRunner for a master seed."""
    cache = {}

    def get(seed: int) -> ExperimentRunner:
        if seed not in cache:
            cache[seed] = ExperimentRunner(
                dataclasses.replace(ExperimentConfig(), master_seed=seed)
            )
        return cache[seed]

    return get


@pytest.fixture(scope="session")
def default_runner(runner_cache):
    return runner_cache(7)
