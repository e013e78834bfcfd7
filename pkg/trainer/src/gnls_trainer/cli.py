"""Trainer CLI: dataset generation, training, gradient check, evaluation."""

from __future__ import annotations

import json
from pathlib import Path

import click
import torch

from .container import export_weights, import_weights
from .dataset import build_dataset, load_dataset
from .evaluate import base_rate, evaluate_precision
from .gradcheck import grad_check
from .graphs import build_training_graph
from .model import SelectorNet
from .train import CurriculumStage, TrainConfig, train


@click.group()
def main():
    """Training pipeline for the CVRP node-selector model."""


@main.command("build-data")
@click.option("--count", type=int, default=500, show_default=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=20_000, show_default=True,
              help="Unguided search iterations for the reference solution.")
@click.option("--workers", type=int, default=4, show_default=True)
@click.option("--solver-bin", default="gnls", show_default=True)
@click.option("--out", type=click.Path(), required=True)
def build_data(count, n, seed, budget, workers, solver_bin, out):
    """Generate a labeled dataset through the solver CLI."""
    dirs = build_dataset(count, n, seed, out, oracle_budget=budget,
                         workers=workers, solver_bin=solver_bin)
    click.echo(f"wrote {len(dirs)} examples under {out}")


@main.command("train")
@click.option("--data", "data_dirs", multiple=True, required=True,
              help="Stage dataset directories, ordered by instance size.")
@click.option("--mode", "modes", multiple=True,
              type=click.Choice(["full", "knn"]),
              help="Graph mode per stage (default: full for the first, knn after).")
@click.option("--knn", type=int, default=25, show_default=True)
@click.option("--epochs", type=int, default=50, show_default=True)
@click.option("--batch", type=int, default=16, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--layers", type=int, default=3, show_default=True)
@click.option("--hidden", type=int, default=32, show_default=True)
@click.option("--mlp-layers", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True,
              help="Weight container output path.")
@click.option("--history", type=click.Path(), default=None,
              help="Optional JSON file for the loss history.")
def train_cmd(data_dirs, modes, knn, epochs, batch, lr, layers, hidden,
              mlp_layers, seed, out, history):
    """Train (optionally through a curriculum) and export the weights."""
    stages = []
    for i, d in enumerate(data_dirs):
        examples = load_dataset(d)
        if not examples:
            raise click.ClickException(f"no examples under {d}")
        mode = modes[i] if i < len(modes) else ("full" if i == 0 else "knn")
        stages.append(CurriculumStage(n=examples[0].inst.n, examples=examples,
                                      mode=mode, k=knn))
    cfg = TrainConfig(epochs=epochs, batch_graphs=batch, lr=lr,
                      n_layers=layers, hidden=hidden, n_mlp_layers=mlp_layers,
                      seed=seed)
    net, hist = train(cfg, stages, log=click.echo)
    export_weights(net, out)
    click.echo(f"exported weights to {out}")
    if history:
        Path(history).write_text(json.dumps(hist.stage_losses, indent=2))


@main.command("grad-check")
@click.option("--layers", type=int, default=2, show_default=True)
@click.option("--hidden", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def grad_check_cmd(layers, hidden, seed):
    """Finite-difference check of the forward implementation."""
    from .testing import tiny_fixture_graph

    torch.manual_seed(seed)
    net = SelectorNet(n_layers=layers, hidden=hidden, n_mlp_layers=2)
    g = tiny_fixture_graph()
    err = grad_check(net, g)
    click.echo(f"max relative gradient error: {err:.3e}")
    if err >= 1e-4:
        raise click.ClickException("gradient check failed (>= 1e-4)")


@main.command("eval")
@click.option("--weights", type=click.Path(exists=True), required=True)
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--threshold", type=float, default=0.8, show_default=True)
@click.option("--mode", type=click.Choice(["full", "knn"]), default="full",
              show_default=True)
def eval_cmd(weights, data, threshold, mode):
    """Precision/recall of a weight container on a labeled dataset."""
    net = import_weights(weights)
    examples = load_dataset(data)
    precision, recall = evaluate_precision(net, examples, threshold, mode=mode)
    click.echo(json.dumps({
        "threshold": threshold,
        "precision": round(precision, 4),
        "recall": round(recall, 4),
        "all_positive_precision": round(base_rate(examples), 4),
        "examples": len(examples),
    }, indent=2))


if __name__ == "__main__":
    main()
