"""Command-line interface."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bank as bank_mod
from . import bench as bench_mod
from . import executive, serde, sim
from .config import Config
from .model import caption


def _load_config(path: str | None) -> Config:
    return Config.load(path) if path else Config()


@click.group()
def main():
    """Dual-lane instruction routing over a simulated tabletop."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="YAML config file.")
def serve(config_path):
    """Run the session HTTP service."""
    from .service import serve as run_server

    run_server(_load_config(config_path))


@main.command()
@click.option("--family", required=True, type=click.Choice(sim.FAMILIES))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--text", default=None, help="Instruction; defaults to the task's own.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def run(family, seed, text, config_path):
    """Run one seeded episode in process and print the result."""
    cfg = _load_config(config_path)
    scene, task = sim.gen_scene(seed, family)
    result, final = executive.run_episode(
        cfg.executive_config(), scene, text or task.instruction_text, task=task
    )
    from .service import _episode_to_dict

    click.echo(json.dumps(_episode_to_dict(result), indent=2, sort_keys=True))
    click.echo(f"final: {caption(final)}")
    click.echo(f"success: {result.success}")
    sys.exit(0 if result.success else 1)


@main.command()
@click.option("--families", default="all", show_default=True, help="Comma-separated families or 'all'.")
@click.option("--episodes", default=20, show_default=True, type=int)
@click.option("--base-seed", default=0, show_default=True, type=int)
@click.option("--format", "fmt", default="csv", show_default=True, type=click.Choice(["csv", "markdown"]))
@click.option("--out", type=click.Path(), default=None, help="Write the table here instead of stdout.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def bench(families, episodes, base_seed, fmt, out, config_path):
    """Benchmark: seeded episodes per family, success-rate table."""
    cfg = _load_config(config_path)
    fams = sim.FAMILIES if families == "all" else tuple(f.strip() for f in families.split(","))
    spec = bench_mod.BenchmarkSpec(
        families=fams, episodes_per_family=episodes, base_seed=base_seed, output_format=fmt
    )
    result = bench_mod.run_benchmark(spec, exec_config=cfg.executive_config())
    table = bench_mod.render_csv(result) if fmt == "csv" else bench_mod.render_markdown(result)
    if out:
        Path(out).write_text(table, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(table, nl=False)


@main.command("gen-data")
@click.option("--count", default=200, show_default=True, type=int)
@click.option("--base-seed", default=1, show_default=True, type=int)
@click.option("--out", default="dataset", show_default=True, type=click.Path())
@click.option("--families", default="all", help="Comma-separated family=weight pairs or 'all'.")
def gen_data(count, base_seed, out, families):
    """Generate the synthetic trajectory corpus plus manifest."""
    if families == "all":
        weights = tuple((f, 1.0) for f in sim.FAMILIES)
    else:
        pairs = []
        for chunk in families.split(","):
            name, _, w = chunk.partition("=")
            pairs.append((name.strip(), float(w) if w else 1.0))
        weights = tuple(pairs)
    spec = bench_mod.DatasetSpec(
        n_trajectories=count, family_weights=weights, base_seed=base_seed, out_dir=out
    )
    manifest = bench_mod.gen_dataset(spec)
    click.echo(json.dumps(manifest, indent=2, sort_keys=True))


@main.group()
def bank():
    """Think-bank operations."""


@bank.command()
@click.option("--text", required=True)
@click.option("--bank", "bank_path", type=click.Path(exists=True), default=None)
@click.option("--k", default=1, show_default=True, type=int)
def classify(text, bank_path, k):
    """Classify an instruction as FAST or SLOW."""
    b = bank_mod.load_bank(bank_path) if bank_path else bank_mod.starter_bank()
    label, neighbors = bank_mod.classify(b, text, k=k)
    click.echo(label.value)
    for eid, score in neighbors:
        click.echo(f"  {score:.4f}  #{eid}  {b.entry(eid).text}")


@bank.command()
@click.option("--iterations", default=10, show_default=True, type=int)
@click.option("--bank", "bank_path", type=click.Path(exists=True), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--cap", default=2000, show_default=True, type=int)
def augment(iterations, bank_path, out, cap):
    """Grow a bank by template paraphrasing and save it."""
    b = bank_mod.load_bank(bank_path) if bank_path else bank_mod.starter_bank()
    entries = bank_mod.augment(
        b.entries, iterations=iterations, provider=bank_mod.TemplateParaphraser(),
        embedder=b.embedder, cap=cap,
    )
    grown = bank_mod.ThinkBank(entries, b.embedder)
    bank_mod.save_bank(grown, out)
    click.echo(f"{len(grown)} entries -> {out}")


@main.command("stub-server")
@click.option("--port", default=8799, show_default=True, type=int)
@click.option("--dim", default=512, show_default=True, type=int)
def stub_server(port, dim):
    """Run the bundled stub embeddings/chat provider."""
    from .stubserver import serve_stub

    serve_stub(port=port, dimension=dim)


if __name__ == "__main__":
    main()
