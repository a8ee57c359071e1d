"""Generate a synthetic annotation corpus and build it into a training dataset.

Writes a `sketchy build`-compatible corpus of colored-rectangle scenes, runs
the full build (part assignment, descriptions, localized sketches, manifest),
and prints the resulting corpus statistics.

Usage:
    python3 scripts/make_fixture_dataset.py --out data/fixture --scenes 24
"""

import argparse
import json
from pathlib import Path

from lots.sketchy.build import build_dataset
from lots.sketchy.fixtures import make_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("data/fixture"), help="output root")
    parser.add_argument("--scenes", type=int, default=24, help="number of synthetic scenes")
    parser.add_argument("--scene-size", type=int, default=64, help="raw scene resolution")
    parser.add_argument("--canvas-size", type=int, default=128, help="built canvas resolution")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    corpus_root = args.out / "corpus"
    ids = make_corpus(corpus_root, count=args.scenes, seed=args.seed, size=args.scene_size)
    print(f"wrote {len(ids)} scenes under {corpus_root}")

    result = build_dataset(
        corpus_root / "annotations",
        corpus_root / "images",
        args.out / "built",
        canvas_size=args.canvas_size,
    )
    print(json.dumps(result.stats, indent=2))
    print(f"manifest: {result.manifest_path}")


if __name__ == "__main__":
    main()
