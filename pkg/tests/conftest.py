import sys

import numpy as np
import pytest
import torch

from lots.config import ModelConfig
from lots.diffusion.model import LotsModel
from lots.pair_codec import ConditionPair, SketchMap, TextPrompt


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance-gate verdicts after the summary, one line per
    criterion, so they stay visible even when stdout capture is on."""
    gate = sys.modules.get("test_acceptance")
    if gate is None or not getattr(gate, "RESULTS", None):
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status, elapsed in gate.RESULTS:
        terminalreporter.write_line(f"{status}  {name}  ({elapsed:.1f}s)")


@pytest.fixture
def tiny_cfg() -> ModelConfig:
    return ModelConfig.tiny()


@pytest.fixture
def tiny_model(tiny_cfg) -> LotsModel:
    return LotsModel(tiny_cfg)


@pytest.fixture(scope="session")
def shared_model() -> LotsModel:
    """Read-only model for tests that never mutate parameters."""
    return LotsModel(ModelConfig.tiny())


def make_pair(seed: int, size: int = 16, text: str | None = None) -> ConditionPair:
    rng = np.random.default_rng(seed)
    grid = (rng.random((size, size)) < 0.2).astype(np.uint8)
    grid[0, 0] = 1  # grids are never all-zero so every pair is distinct
    return ConditionPair(
        sketch=SketchMap(grid),
        text=TextPrompt(text if text is not None else f"a garment variant {seed}"),
    )


def make_pairs(n: int, seed: int = 0, size: int = 16) -> list[ConditionPair]:
    return [make_pair(seed * 100 + i, size=size) for i in range(n)]


@pytest.fixture
def pairs3() -> list[ConditionPair]:
    return make_pairs(3, seed=1)


def seed_everything(seed: int = 0) -> None:
    torch.manual_seed(seed)
    np.random.seed(seed)
