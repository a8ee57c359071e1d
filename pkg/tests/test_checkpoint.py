"""Checkpoint save/load: strictness, versioning, and full-fidelity round trips."""

import json

import numpy as np
import pytest
import torch

from conftest import make_pairs
from lots.checkpoint import (
    CHECKPOINT_VERSION,
    CheckpointError,
    load_model,
    load_weights,
    read_checkpoint,
    save_checkpoint,
    state_checksums,
    tensor_checksum,
)
from lots.config import ModelConfig, TrainConfig
from lots.diffusion.model import LotsModel
from lots.diffusion.trainer import run_training
from lots.sketchy.fixtures import make_training_samples


def test_tensor_checksum_tracks_content_not_identity():
    a = torch.arange(6, dtype=torch.float32).reshape(2, 3)
    b = a.clone()
    assert tensor_checksum(a) == tensor_checksum(b)
    b[0, 0] += 1.0
    assert tensor_checksum(a) != tensor_checksum(b)
    # layout-normalized: a transposed copy hashes its own contiguous bytes
    assert tensor_checksum(a.t()) == tensor_checksum(a.t().contiguous())


def test_state_checksums_cover_every_named_tensor(tiny_model):
    sums = state_checksums(tiny_model.named_parameters())
    assert set(sums) == {n for n, _ in tiny_model.named_parameters()}
    assert all(len(v) == 64 for v in sums.values())


def test_round_trip_restores_weights_and_samples(tiny_model, tmp_path, pairs3):
    cfg = TrainConfig(learning_rate=1e-3, batch_size=2, steps=3, cond_dropout=0.0, seed=0)
    run_training(tiny_model, make_training_samples(count=4, size=16, seed=0), cfg)
    path = save_checkpoint(tmp_path / "ckpt.npz", tiny_model, step=3, extra={"note": "test"})

    restored, meta = load_model(path)
    assert meta["step"] == 3 and meta["note"] == "test"
    assert meta["tokens_per_pair"] == tiny_model.cfg.pair_former.num_tokens
    assert meta["adapter_dim"] == tiny_model.cfg.adapter_dim
    assert meta["attention_blocks"] == tiny_model.cfg.pair_former.blocks
    assert state_checksums(restored.named_parameters()) == state_checksums(tiny_model.named_parameters())

    a = tiny_model.sample(pairs3, steps=3, seed=5)
    b = restored.sample(pairs3, steps=3, seed=5)
    assert a.image.tobytes() == b.image.tobytes()


def test_header_is_readable_without_a_model(tiny_model, tmp_path):
    path = save_checkpoint(tmp_path / "c.npz", tiny_model, step=7)
    meta, arrays = read_checkpoint(path)
    assert meta["format_version"] == CHECKPOINT_VERSION
    assert meta["step"] == 7
    assert set(arrays) == {n for n, _ in tiny_model.named_parameters()}
    assert all(isinstance(a, np.ndarray) for a in arrays.values())


def test_missing_file_and_corrupt_payload_raise(tmp_path):
    with pytest.raises(CheckpointError, match="no such checkpoint"):
        read_checkpoint(tmp_path / "absent.npz")
    bad = tmp_path / "garbage.npz"
    bad.write_bytes(b"this is not a zip archive")
    with pytest.raises(CheckpointError, match="unreadable"):
        read_checkpoint(bad)


def test_headerless_archive_rejected(tmp_path):
    path = tmp_path / "bare.npz"
    with open(path, "wb") as fh:
        np.savez(fh, weights=np.zeros(3))
    with pytest.raises(CheckpointError, match="no header"):
        read_checkpoint(path)


def test_unsupported_version_rejected(tiny_model, tmp_path):
    path = save_checkpoint(tmp_path / "v.npz", tiny_model)
    with np.load(path) as data:
        arrays = {k: data[k] for k in data.files}
    meta = json.loads(bytes(arrays["__meta__"]).decode())
    meta["format_version"] = 99
    arrays["__meta__"] = np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    with pytest.raises(CheckpointError, match="version 99"):
        read_checkpoint(path)


def test_load_weights_is_strict_both_ways(tiny_model):
    arrays = {n: p.detach().numpy() for n, p in tiny_model.named_parameters()}
    extra = dict(arrays)
    extra["unexpected.weight"] = np.zeros(2)
    with pytest.raises(CheckpointError, match="unknown="):
        load_weights(tiny_model, extra)
    short = dict(arrays)
    short.pop(next(iter(short)))
    with pytest.raises(CheckpointError, match="missing="):
        load_weights(tiny_model, short)


def test_load_weights_rejects_shape_mismatch(tiny_model):
    arrays = {n: p.detach().numpy().copy() for n, p in tiny_model.named_parameters()}
    name = next(iter(arrays))
    arrays[name] = np.zeros(np.array(arrays[name]).size + 1, dtype=np.float32)
    with pytest.raises(CheckpointError, match="shape mismatch"):
        load_weights(tiny_model, arrays)


def test_checkpoint_rebuilds_model_from_embedded_config(tmp_path):
    cfg = ModelConfig.tiny()
    cfg.pair_former.num_tokens = 3
    model = LotsModel(cfg)
    path = save_checkpoint(tmp_path / "cfg.npz", model)
    restored, _ = load_model(path)
    assert restored.cfg.pair_former.num_tokens == 3
    assert restored.cfg.backbone.channels == cfg.backbone.channels
    assert restored.cfg.sketch_encoder.input_size == cfg.sketch_encoder.input_size
