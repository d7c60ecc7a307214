import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tierbayes import (
    EngineConfig,
    PriorConfig,
    default_generator_config,
    generate,
    run_engine,
)


@pytest.fixture(scope="session")
def default_data():
    """The repo's default seeded dataset and its ground truth."""
    return generate(default_generator_config())


@pytest.fixture(scope="session")
def default_timelines(default_data):
    dataset, truth = default_data
    return run_engine(dataset, list(truth.all_pairs), PriorConfig(), EngineConfig())
