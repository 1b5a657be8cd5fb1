"""Command-line interface for the MCAP planner."""

from __future__ import annotations

import asyncio
from pathlib import Path
from typing import Any, Optional, Sequence

import click
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .core.domain import conformance_check
from .core.random_source import RandomSource
from .core.search import SearchParams
from .domains.rescue import PREDICATES, RescueDomain
from .domains.scenario import Scenario, load_scenario, rescue_config_from_settings
from .errors import McapError
from .experiments.config import ExperimentConfig, Policy, Variant
from .experiments.episode import EpisodeTrace, initial_state, run_episode
from .experiments.stats import write_results
from .language.normal_form import action_sequences, reduce_to_normal_form, to_normal_program
from .language.parser import format_program, load_program, parse_query
from .language.semantics import pot
from .orchestrator import ExperimentOrchestrator
from .utils.config import Settings, create_default_config, load_config
from .utils.logging import setup_logging

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2


def _settings(ctx: click.Context) -> Settings:
    settings = ctx.obj
    assert isinstance(settings, Settings)
    return settings


def _scenario(path: Optional[str], settings: Settings) -> Scenario:
    if path is None:
        return Scenario(rescue=rescue_config_from_settings(settings.rescue), name="settings")
    return load_scenario(path)


def _experiment_config(
    settings: Settings, scenario: Scenario, **overrides: Any
) -> ExperimentConfig:
    """Settings, then the scenario, then explicit command-line overrides."""
    search = settings.search.model_dump()
    for key in ("budget", "h_max", "gamma", "c", "normalized_weights", "discounted_backup"):
        value = overrides.pop(key, None)
        if value is not None:
            search[key] = value
    episodes = overrides.get("episodes")
    if episodes is not None:
        overrides["min_episodes"] = min(settings.experiment.min_episodes, episodes)
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    return ExperimentConfig.from_settings(
        settings, rescue=scenario.rescue, search=SearchParams(**search), **cleaned
    )


@click.group()
@click.version_option(version=__version__, prog_name="mcap")
@click.option(
    "--config", "-c",
    type=click.Path(exists=False),
    help="Path to configuration file",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]),
    default=None,
    help="Override the configured log level",
)
@click.pass_context
def cli(ctx: click.Context, config: Optional[str], log_level: Optional[str]) -> None:
    """MCAP - Monte Carlo action programming planner."""
    settings = load_config(config)
    if log_level:
        settings.logging.level = log_level
    setup_logging(settings.logging)
    ctx.obj = settings


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def parse(file: str) -> None:
    """Parse a program and print its canonical form."""
    console.print(format_program(load_program(file)), markup=False, highlight=False)


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--sequences", is_flag=True, help="Also list all complete action sequences")
@click.option("--max-length", type=int, default=None, help="Cut sequences at this length")
def normalize(file: str, sequences: bool, max_length: Optional[int]) -> None:
    """Print the normal form of a condition-free program."""
    program = load_program(file)
    entries = reduce_to_normal_form(program)

    table = Table(title="Normal form", show_header=True, header_style="bold cyan")
    table.add_column("Head")
    table.add_column("Tail")
    for entry in entries:
        table.add_row(str(entry.head), format_program(entry.tail))
    console.print(table)
    console.print(format_program(to_normal_program(entries)), markup=False, highlight=False)

    if sequences:
        found = sorted(
            action_sequences(program, max_length),
            key=lambda seq: tuple(a.sort_key() for a in seq),
        )
        console.print(f"\n[bold]{len(found)} action sequences[/bold]")
        for seq in found:
            console.print(" ; ".join(str(a) for a in seq) or "eps", markup=False)


@cli.command(name="pot")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--scenario", "-s", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--seed", type=int, default=None, help="Episode seed (defaults to the scenario's)")
@click.option("--transparent", is_flag=True, help="Let finished sequence parts fall through")
@click.pass_context
def pot_command(
    ctx: click.Context, file: str, scenario: str, seed: Optional[int], transparent: bool
) -> None:
    """Print the potential set of a program in a scenario's initial state."""
    world = load_scenario(scenario)
    cfg = _experiment_config(_settings(ctx), world)
    state = initial_state(cfg, world.seed if seed is None else seed)
    program = load_program(file)
    entries = pot(state, program, RescueDomain(world.rescue), transparent_termination=transparent)

    console.print(
        f"robot at p{state.robot}, carrying {len(state.carried)}, "
        f"{state.burning_count} positions burning"
    )
    table = Table(title=f"pot ({len(entries)} entries)", header_style="bold cyan")
    table.add_column("Action")
    table.add_column("Remaining program")
    for entry in entries:
        table.add_row(str(entry.head), format_program(entry.tail))
    console.print(table)


def _print_trace(trace: EpisodeTrace) -> None:
    table = Table(title=f"Episode {trace.label} (seed {trace.seed})", header_style="bold cyan")
    table.add_column("Step", justify="right")
    table.add_column("Action")
    table.add_column("Reward", justify="right")
    table.add_column("Safe", justify="right")
    table.add_column("Burning", justify="right")
    table.add_column("Reused")
    for record in trace.records:
        action = f"[dim]{record.action}[/dim]" if record.terminated else record.action
        table.add_row(
            str(record.step),
            action,
            f"{record.reward:.2f}",
            f"{record.safe_ratio:.2f}",
            f"{record.burning_ratio:.2f}",
            "yes" if record.root_reused else "no",
        )
    console.print(table)
    for step, name in trace.events:
        console.print(f"[yellow]{name} after step {step}[/yellow]")


@cli.command()
@click.option("--scenario", "-s", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--program", "-p", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option(
    "--variant",
    type=click.Choice([v.value for v in Variant]),
    default=Variant.BASE.value,
)
@click.option("--budget", type=click.IntRange(min=1), default=None)
@click.option("--hmax", type=click.IntRange(min=1), default=None)
@click.option("--gamma", type=click.FloatRange(0.0, 1.0), default=None)
@click.option("--c", "c", type=float, default=None)
@click.option("--horizon", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=None)
@click.pass_context
def plan(
    ctx: click.Context,
    scenario: Optional[str],
    program: Optional[str],
    variant: str,
    budget: Optional[int],
    hmax: Optional[int],
    gamma: Optional[float],
    c: Optional[float],
    horizon: Optional[int],
    seed: Optional[int],
) -> None:
    """Run one online planning episode and print its trace."""
    settings = _settings(ctx)
    world = _scenario(scenario, settings)
    cfg = _experiment_config(
        settings,
        world,
        variant=Variant(variant),
        budget=budget,
        h_max=hmax,
        gamma=gamma,
        c=c,
        horizon=horizon,
    )
    parsed = load_program(program) if program else None
    trace = run_episode(cfg, world.seed if seed is None else seed, parsed)
    _print_trace(trace)


@cli.command()
@click.option(
    "--variant",
    type=click.Choice([v.value for v in Variant]),
    default=Variant.BASE.value,
)
@click.option("--policy", type=click.Choice([p.value for p in Policy]), default=Policy.MCAP.value)
@click.option(
    "--out",
    "-o",
    type=click.Path(dir_okay=False),
    default=None,
    help="Results file (default: <experiment.output_dir>/<variant>-<policy>.txt)",
)
@click.option("--scenario", "-s", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--episodes", type=click.IntRange(min=2), default=None)
@click.option("--ci", type=float, default=None, help="Total confidence-interval width")
@click.option("--confidence", type=float, default=None)
@click.option("--budget", type=click.IntRange(min=1), default=None)
@click.option("--hmax", type=click.IntRange(min=1), default=None)
@click.option("--gamma", type=click.FloatRange(0.0, 1.0), default=None)
@click.option("--c", "c", type=float, default=None)
@click.option("--horizon", type=click.IntRange(min=1), default=None)
@click.option("--normalized-weights", is_flag=True, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--progress/--no-progress", default=False)
@click.pass_context
def experiment(
    ctx: click.Context,
    variant: str,
    policy: str,
    out: Optional[str],
    scenario: Optional[str],
    episodes: Optional[int],
    ci: Optional[float],
    confidence: Optional[float],
    budget: Optional[int],
    hmax: Optional[int],
    gamma: Optional[float],
    c: Optional[float],
    horizon: Optional[int],
    normalized_weights: Optional[bool],
    seed: Optional[int],
    workers: Optional[int],
    progress: bool,
) -> None:
    """Run an experiment cell and write per-step statistics to a file."""
    settings = _settings(ctx)
    world = _scenario(scenario, settings)
    cfg = _experiment_config(
        settings,
        world,
        variant=Variant(variant),
        policy=Policy(policy),
        episodes=episodes,
        ci=ci,
        confidence=confidence,
        budget=budget,
        h_max=hmax,
        gamma=gamma,
        c=c,
        horizon=horizon,
        normalized_weights=normalized_weights,
        seed=seed,
        workers=workers,
    )
    orchestrator = ExperimentOrchestrator(
        cfg, show_progress=progress, log_level=settings.logging.level
    )
    result = asyncio.run(orchestrator.run())
    if out is None:
        out = str(Path(settings.experiment.output_dir) / f"{variant}-{policy}.txt")
    write_results(result.table, out)

    final = result.table.final()
    summary = Table(show_header=False)
    summary.add_column("Metric", style="dim")
    summary.add_column("Value", justify="right")
    summary.add_row("Episodes", str(result.episodes))
    summary.add_row("Target met", "yes" if result.converged else "no")
    summary.add_row(
        f"Safe ratio (step {final.step})",
        f"{final.mean_safe:.3f} ± {final.err_safe:.3f}",
    )
    summary.add_row(
        f"Burning ratio (step {final.step})",
        f"{final.mean_burning:.3f} ± {final.err_burning:.3f}",
    )
    console.print(Panel.fit(summary, title=cfg.label(), border_style="cyan"))
    console.print(f"[green]Results written to {out}[/green]")


@cli.command()
@click.option("--scenario", "-s", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--trials", type=click.IntRange(min=1), default=100)
@click.option("--seed", type=int, default=None)
@click.pass_context
def conformance(
    ctx: click.Context, scenario: Optional[str], trials: int, seed: Optional[int]
) -> None:
    """Check the rescue domain against the domain interface contracts."""
    world = _scenario(scenario, _settings(ctx))
    cfg = _experiment_config(_settings(ctx), world)
    used_seed = world.seed if seed is None else seed
    state = initial_state(cfg, used_seed)
    ground_queries = [
        parse_query(p.name) for p in PREDICATES.values() if p.arity == 0
    ]
    report = conformance_check(
        RescueDomain(world.rescue), state, trials, RandomSource(used_seed), ground_queries
    )

    table = Table(title=f"Conformance: {report.domain}", header_style="bold cyan")
    table.add_column("Clause")
    table.add_column("Checks", justify="right")
    for clause, count in sorted(report.checks.items()):
        table.add_row(clause, str(count))
    console.print(table)
    console.print(f"[green]All contracts hold over {trials} trials[/green]")


@cli.command()
@click.argument("path", type=click.Path(), default="config.yaml")
def init(path: str) -> None:
    """Write a default configuration file."""
    config_path = Path(path)

    if config_path.exists():
        if not click.confirm(f"{path} already exists. Overwrite?"):
            return

    create_default_config(config_path)
    console.print(f"[green]Configuration created: {path}[/green]")


@cli.command()
def version() -> None:
    """Show version information."""
    console.print(Panel.fit(
        f"[bold cyan]MCAP planner[/bold cyan]\n"
        f"Version: {__version__}",
        border_style="cyan",
    ))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point with stable exit codes.

    Returns:
        0 on success, 1 on usage errors, 2 on language, domain or
        configuration errors
    """
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="mcap",
            standalone_mode=False,
        )
    except click.exceptions.Abort:
        err_console.print("[yellow]Aborted[/yellow]")
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except (McapError, ValidationError) as e:
        err_console.print(
            f"[red]Error:[/red] {escape(str(e))}", markup=True, highlight=False, soft_wrap=True
        )
        return EXIT_DOMAIN
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
