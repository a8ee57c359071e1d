"""Train the pair-conditioning adapter on the synthetic fixture and sample from it.

Runs a small end-to-end loop: builds in-memory training samples, trains only
the adapter weights, saves a checkpoint the service can autoload, and writes a
strip of samples at a few guidance strengths for a quick visual check.

Usage:
    python3 scripts/train_toy.py --out runs/toy --steps 300
"""

import argparse
import json
from pathlib import Path

import numpy as np
from PIL import Image

from lots.checkpoint import save_checkpoint
from lots.config import ModelConfig, TrainConfig
from lots.diffusion.model import LotsModel
from lots.diffusion.trainer import run_training
from lots.sketchy.fixtures import make_training_samples


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("runs/toy"))
    parser.add_argument("--steps", type=int, default=300)
    parser.add_argument("--batch-size", type=int, default=4)
    parser.add_argument("--learning-rate", type=float, default=1e-3)
    parser.add_argument("--samples", type=int, default=32, help="fixture size")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sample-steps", type=int, default=50)
    args = parser.parse_args()

    model = LotsModel(ModelConfig.tiny())
    data = make_training_samples(count=args.samples, size=model.cfg.backbone.latent_size, seed=args.seed)
    cfg = TrainConfig(
        steps=args.steps,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        seed=args.seed,
        out_dir=str(args.out),
    )
    trainer = run_training(model, data, cfg)
    print(
        f"trained {args.steps} steps: smoothed loss "
        f"{trainer.smoothed_loss(min(10, args.steps)):.4f} -> {trainer.smoothed_loss(args.steps):.4f}"
    )

    args.out.mkdir(parents=True, exist_ok=True)
    checkpoint = save_checkpoint(args.out / "toy.npz", model, step=args.steps)
    (args.out / "loss_history.json").write_text(json.dumps(trainer.loss_history))

    # strip of samples across guidance strengths, conditioned on one fixture's pairs
    pairs = data[0].pairs
    strip = []
    for alpha in (0.0, 0.5, 1.0):
        result = model.sample(pairs=pairs, alpha=alpha, steps=args.sample_steps, seed=args.seed)
        strip.append(result.to_uint8())
    Image.fromarray(np.concatenate(strip, axis=1)).save(args.out / "alpha_strip.png")
    print(f"saved {checkpoint} and {args.out / 'alpha_strip.png'}")


if __name__ == "__main__":
    main()
