"""Command-line entry points: `lots` (train / sample / eval / serve) and
`sketchy` (dataset building)."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import click

from .config import ModelConfig, TrainConfig, _from_mapping, load_config_file

log = logging.getLogger(__name__)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="debug logging")
def lots(verbose: bool) -> None:
    """Localized sketch-text conditioned generation."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@lots.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True), help="YAML/JSON run config")
@click.option("--steps", type=int, default=None, help="override train.steps")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="override train.out_dir")
def train(config_path: str, steps: int | None, out_dir: str | None) -> None:
    """Train the conditioning adapter on a manifest or the built-in fixture."""
    from .checkpoint import save_checkpoint
    from .data import samples_from_manifest
    from .diffusion.model import LotsModel
    from .diffusion.trainer import AdapterTrainer
    from .sketchy.fixtures import make_training_samples

    raw = load_config_file(config_path)
    model_cfg = _from_mapping(ModelConfig, raw.get("model", {}))
    train_cfg = _from_mapping(TrainConfig, raw.get("train", {}))
    if steps is not None:
        train_cfg.steps = steps
    if out_dir is not None:
        train_cfg.out_dir = out_dir

    data_cfg = raw.get("data", {})
    if "manifest" in data_cfg:
        samples = samples_from_manifest(data_cfg["manifest"], global_text=model_cfg.global_text_default)
    else:
        fixture = data_cfg.get("fixture", {})
        samples = make_training_samples(
            count=int(fixture.get("count", 16)),
            size=int(fixture.get("size", model_cfg.backbone.latent_size)),
            seed=int(fixture.get("seed", 0)),
        )
    click.echo(f"training on {len(samples)} samples, {train_cfg.steps} steps, variant={train_cfg.variant}")

    model = LotsModel(model_cfg)
    trainer = AdapterTrainer(model, train_cfg)
    out = Path(train_cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    import random

    order_rng = random.Random(train_cfg.seed)
    indices = list(range(len(samples)))
    for step in range(1, train_cfg.steps + 1):
        order_rng.shuffle(indices)
        batch = [samples[i] for i in indices[: train_cfg.batch_size]]
        loss = trainer.train_step(batch)
        if step % max(train_cfg.steps // 10, 1) == 0 or step == 1:
            click.echo(f"step {step:5d}  loss {loss:.6f}")
        if train_cfg.checkpoint_every and step % train_cfg.checkpoint_every == 0:
            save_checkpoint(out / f"step_{step:06d}.npz", model, step=step)
    final = save_checkpoint(out / "final.npz", model, step=train_cfg.steps)
    history = out / "loss_history.json"
    history.write_text(json.dumps(trainer.loss_history))
    click.echo(f"saved {final} and {history}")


@lots.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True), help="pairs JSON file")
@click.option("--out", "out_path", required=True, type=click.Path(), help="output PNG")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--steps", type=int, default=50, show_default=True)
@click.option("--checkpoint", "checkpoint_path", type=click.Path(exists=True), default=None)
@click.option("--variant", type=click.Choice(["pair_former", "no_pooling", "mean_pooling"]), default="pair_former")
def sample(pairs_path, out_path, alpha, seed, steps, checkpoint_path, variant) -> None:
    """Generate one image from a pairs file.

    The pairs file holds {"global_text": ..., "pairs": [{"sketch_path": ...,
    "text": ...}]} with sketch paths relative to the file."""
    from PIL import Image

    from .checkpoint import load_model
    from .diffusion.model import LotsModel
    from .pair_codec import ConditionPair, SketchMap, TextPrompt

    spec = json.loads(Path(pairs_path).read_text())
    root = Path(pairs_path).parent
    pairs = [
        ConditionPair(sketch=SketchMap.from_png(root / p["sketch_path"]), text=TextPrompt(p["text"]))
        for p in spec.get("pairs", [])
    ]
    if checkpoint_path:
        model, _ = load_model(checkpoint_path)
    else:
        log.warning("no checkpoint given; sampling from a freshly initialized small model")
        model = LotsModel(ModelConfig.tiny())
    result = model.sample(
        pairs=pairs,
        global_text=spec.get("global_text"),
        steps=steps,
        alpha=alpha,
        seed=seed,
        variant=variant,
    )
    Image.fromarray(result.to_uint8()).save(out_path)
    click.echo(f"wrote {out_path} (seed={seed}, alpha={alpha}, digest={result.condition_digest[:12]})")


@lots.command("eval")
@click.option("--gen", "gen_dir", required=True, type=click.Path(exists=True))
@click.option("--ref", "ref_dir", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", required=True, type=click.Path())
@click.option("--responses", "responses_path", type=click.Path(exists=True), default=None, help="human-study CSV")
def eval_cmd(gen_dir, ref_dir, manifest_path, report_path, responses_path) -> None:
    """Score generated images against references listed in a manifest."""
    from .evaluation.agreement import read_responses_csv
    from .evaluation.report import evaluate_directories, study_report

    report = evaluate_directories(gen_dir, ref_dir, manifest_path, report_path)
    payload = report.as_dict()
    if responses_path:
        payload["study"] = study_report(read_responses_csv(responses_path))
        Path(report_path).write_text(json.dumps(payload, indent=2))
    summary = {k: v for k, v in payload.items() if not isinstance(v, list)}
    click.echo(json.dumps(summary, indent=2))


@lots.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--checkpoint-dir", default=None)
@click.option("--data-dir", default=None)
@click.option("--workers", type=int, default=None)
@click.option("--autoload", default=None, help="checkpoint id to load at startup")
def serve(config_path, host, port, checkpoint_dir, data_dir, workers, autoload) -> None:
    """Run the generation HTTP service (config < env < flags)."""
    import uvicorn

    from .service.app import create_app
    from .service.config import load_service_config

    config = load_service_config(
        config_path,
        overrides={
            "host": host,
            "port": port,
            "checkpoint_dir": checkpoint_dir,
            "data_dir": data_dir,
            "workers": workers,
            "autoload": autoload,
        },
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="debug logging")
def sketchy(verbose: bool) -> None:
    """Dataset construction tools."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@sketchy.command()
@click.option("--annotations", "annotations_dir", required=True, type=click.Path(exists=True))
@click.option("--images", "images_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--backend", type=click.Choice(["template", "llm"]), default="template", show_default=True)
@click.option("--sketcher", type=click.Choice(["edges", "external"]), default="edges", show_default=True)
@click.option("--llm-endpoint", default=None, help="completion endpoint for --backend llm")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), default=None)
@click.option("--canvas-size", type=int, default=512, show_default=True)
def build(annotations_dir, images_dir, out_dir, backend, sketcher, llm_endpoint, taxonomy_path, canvas_size) -> None:
    """Build a dataset from annotation JSON + mask PNGs and source images."""
    from .sketchy.build import build_dataset, make_description_backend
    from .sketchy.descriptions import HttpLlmClient
    from .sketchy.sketches import EdgeSketchBackend
    from .sketchy.taxonomy import DEFAULT_TAXONOMY, load_taxonomy

    if sketcher == "external":
        raise click.UsageError("the external sketcher needs a wired backend; use the library API to inject one")
    llm_client = HttpLlmClient(llm_endpoint) if llm_endpoint else None
    result = build_dataset(
        annotations_dir,
        images_dir,
        out_dir,
        description_backend=make_description_backend(backend, llm_client),
        sketch_backend=EdgeSketchBackend(),
        taxonomy=load_taxonomy(taxonomy_path) if taxonomy_path else DEFAULT_TAXONOMY,
        canvas_size=canvas_size,
    )
    click.echo(json.dumps(result.stats, indent=2))
    click.echo(f"manifest: {result.manifest_path}")


if __name__ == "__main__":
    lots()
