"""Compare the conditioning variants (pair_former / no_pooling / mean_pooling).

Trains each variant from the same initialization on the same fixture data and
reports smoothed losses plus a fixed-seed sample digest per variant, so runs
are easy to diff across code changes.

Usage:
    python3 scripts/run_ablations.py --steps 200 --out runs/ablations.json
"""

import argparse
import hashlib
import json
from pathlib import Path

from lots.config import ModelConfig, TrainConfig
from lots.diffusion.model import LotsModel
from lots.diffusion.trainer import run_training
from lots.sketchy.fixtures import make_training_samples

VARIANTS = ("pair_former", "no_pooling", "mean_pooling")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("runs/ablations.json"))
    parser.add_argument("--steps", type=int, default=200)
    parser.add_argument("--batch-size", type=int, default=4)
    parser.add_argument("--learning-rate", type=float, default=1e-3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    report = {}
    for variant in VARIANTS:
        model = LotsModel(ModelConfig.tiny())
        data = make_training_samples(count=32, size=model.cfg.backbone.latent_size, seed=args.seed)
        cfg = TrainConfig(
            steps=args.steps,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            seed=args.seed,
            variant=variant,
        )
        trainer = run_training(model, data, cfg)
        sample = model.sample(pairs=data[0].pairs, steps=20, seed=args.seed, variant=variant)
        report[variant] = {
            "loss_start": trainer.smoothed_loss(min(10, args.steps)),
            "loss_end": trainer.smoothed_loss(args.steps),
            "sample_sha256": hashlib.sha256(sample.image.tobytes()).hexdigest(),
        }
        print(f"{variant:13s} loss {report[variant]['loss_start']:.4f} -> {report[variant]['loss_end']:.4f}")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(report, indent=2))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
