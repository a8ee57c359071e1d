"""Checkpoint format: one flat mapping of named float arrays plus a JSON header.

The header carries a format version, the token geometry (pooled tokens per
pair, adapter width, attention block count), and the full model config so a
checkpoint alone is enough to rebuild the module tree.  Weights are stored
under their ``named_parameters`` keys; loading is strict in both directions —
unknown and missing names are both errors.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import torch

from .config import ModelConfig, _from_mapping, config_to_dict

CHECKPOINT_VERSION = 1
_META_KEY = "__meta__"


class CheckpointError(RuntimeError):
    pass


def tensor_checksum(t: torch.Tensor) -> str:
    return hashlib.sha256(t.detach().cpu().contiguous().numpy().tobytes()).hexdigest()


def state_checksums(named: Iterable[tuple[str, torch.Tensor]]) -> dict[str, str]:
    """Stable name -> sha256 digest map, for change-detection across steps."""
    return {name: tensor_checksum(t) for name, t in named}


def _model_meta(model, step: int, extra: Mapping | None) -> dict:
    cfg = model.cfg
    meta = {
        "format_version": CHECKPOINT_VERSION,
        "tokens_per_pair": cfg.pair_former.num_tokens,
        "adapter_dim": cfg.adapter_dim,
        "attention_blocks": cfg.pair_former.blocks,
        "step": step,
        "config": config_to_dict(cfg),
    }
    if extra:
        meta.update(extra)
    return meta


def save_checkpoint(path: str | Path, model, step: int = 0, extra: Mapping | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {
        name: p.detach().cpu().numpy()
        for name, p in model.named_parameters()
    }
    clashes = set(arrays) & {_META_KEY}
    if clashes:
        raise CheckpointError(f"reserved key collision: {sorted(clashes)}")
    arrays[_META_KEY] = np.frombuffer(
        json.dumps(_model_meta(model, step, extra)).encode(), dtype=np.uint8
    )
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    return path


def read_checkpoint(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    """Return (header, name -> array) without touching any model."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"no such checkpoint: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            if _META_KEY not in data:
                raise CheckpointError(f"{path} has no header entry")
            meta = json.loads(bytes(data[_META_KEY]).decode())
            arrays = {k: data[k] for k in data.files if k != _META_KEY}
    except CheckpointError:
        raise
    except Exception as exc:  # zipfile/json/np errors on corrupt input
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    version = meta.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version!r}")
    return meta, arrays


def load_model(path: str | Path):
    """Rebuild a model from a checkpoint and load every stored weight."""
    from .diffusion.model import LotsModel

    meta, arrays = read_checkpoint(path)
    cfg = _from_mapping(ModelConfig, meta["config"])
    model = LotsModel(cfg)
    load_weights(model, arrays)
    return model, meta


def load_weights(model, arrays: Mapping[str, np.ndarray]) -> None:
    params = dict(model.named_parameters())
    missing = sorted(set(params) - set(arrays))
    unknown = sorted(set(arrays) - set(params))
    if missing or unknown:
        raise CheckpointError(f"name mismatch: missing={missing[:4]} unknown={unknown[:4]}")
    with torch.no_grad():
        for name, arr in arrays.items():
            p = params[name]
            if tuple(arr.shape) != tuple(p.shape):
                raise CheckpointError(f"shape mismatch for {name}: {arr.shape} vs {tuple(p.shape)}")
            p.copy_(torch.from_numpy(np.ascontiguousarray(arr)))
