"""Command-line front end.

Subcommands: ``gen`` writes a synthetic dataset, ``predict`` scores one
cell, ``eval`` evaluates one method on a split, ``compare`` runs both
methods side by side.  Every run is deterministic: all randomness flows
from --seed, and rerunning any command with the same flags and input files
produces byte-identical outputs.

Exit codes: 0 success, 1 runtime failure (bad data, missing test cell),
2 usage error (bad flags, unknown labels).
"""

from pathlib import Path

import click

from .cf import CfConfig, CfPredictor, ColdStartError, SCOPE_ALL, SCOPE_FRIENDS
from .datagen import GenConfig, generate_dataset
from .evaluate import (
    EvaluationReport,
    SplitSpec,
    evaluate_method,
    run_comparison,
    write_detail_csv,
    write_summary_csv,
)
from .model import (
    Dataset,
    RatingMatrix,
    SocialRecError,
    item_label,
    parse_label,
    round_rating,
    user_label,
)
from .snrs import SnrsConfig, SnrsPredictor
from .storage import load_dataset, save_dataset

_COMMANDS = ("gen", "predict", "eval", "compare")


def _read_config_file(path: str) -> dict:
    """Parse a key=value defaults file; '#' starts a comment."""
    defaults = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        defaults[key.strip().lower().replace("-", "_")] = value.strip()
    return defaults


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              help="Key=value file supplying flag defaults (flags still win).")
@click.version_option(package_name="socialrec")
@click.pass_context
def main(ctx, config):
    """Generate, predict and evaluate social-network rating recommendations."""
    if config:
        defaults = _read_config_file(config)
        ctx.default_map = {command: defaults for command in _COMMANDS}


def _load(data_dir: str) -> Dataset:
    try:
        return load_dataset(data_dir)
    except SocialRecError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_numbers(text: str, kind: str, what: str) -> tuple[int, ...]:
    """Parse "51-100", "U51-U100" or "I1,I3,I5" into 0-based indices."""

    def one(token: str) -> int:
        token = token.strip()
        if token.upper().startswith(kind):
            token = token[1:]
        if not token.isdigit() or int(token) < 1:
            raise click.UsageError(f"bad {what} {token!r}: expected a 1-based "
                                   f"number or {kind}-label")
        return int(token) - 1

    indices: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo_token, hi_token = part.split("-", 1)
            lo, hi = one(lo_token), one(hi_token)
            if hi < lo:
                raise click.UsageError(f"empty {what} range {part!r}")
            indices.extend(range(lo, hi + 1))
        else:
            indices.append(one(part))
    if not indices:
        raise click.UsageError(f"no {what} given in {text!r}")
    return tuple(dict.fromkeys(indices))


def _parse_levels(text: str) -> tuple[int, ...]:
    levels: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            if not (lo.strip().isdigit() and hi.strip().isdigit()):
                raise click.UsageError(f"bad rating level range {part!r}")
            levels.extend(range(int(lo), int(hi) + 1))
        elif part.isdigit():
            levels.append(int(part))
        else:
            raise click.UsageError(f"bad rating level {part!r}")
    if not levels or any(k not in range(6) for k in levels):
        raise click.UsageError(f"prediction levels must be within 0..5, got {text!r}")
    return tuple(dict.fromkeys(levels))


def _resolve_label(dataset: Dataset, label: str, kind: str) -> int:
    try:
        index = parse_label(label, kind)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    limit, what = {"U": (dataset.n_users, "users"),
                   "I": (dataset.n_items, "items"),
                   "C": (dataset.n_categories, "categories")}[kind]
    if index >= limit:
        raise click.UsageError(f"unknown label {label!r} (dataset has {limit} {what})")
    return index


def _cf_options(func):
    func = click.option("--neighbor-k", type=click.IntRange(min=1), default=20,
                        show_default=True, help="Max neighbors per prediction.")(func)
    func = click.option("--co-rate-min", type=click.IntRange(min=2), default=2,
                        show_default=True,
                        help="Min co-rated items for a defined similarity.")(func)
    func = click.option("--scope", type=click.Choice([SCOPE_ALL, SCOPE_FRIENDS]),
                        default=SCOPE_ALL, show_default=True,
                        help="Restrict CF neighbors to graph friends or not.")(func)
    return func


def _snrs_options(func):
    func = click.option("--alpha", type=click.FloatRange(min=0, min_open=True),
                        default=1.0, show_default=True,
                        help="Laplace smoothing pseudo-count.")(func)
    func = click.option("--min-strength", type=click.IntRange(min=0), default=1,
                        show_default=True,
                        help="Minimum edge strength that counts as friendship.")(func)
    func = click.option("--levels", default="0-5", show_default=True,
                        help="Rating levels entering the final weighted mean.")(func)
    return func


def _engine_configs(neighbor_k, co_rate_min, scope, alpha, min_strength, levels):
    cf_cfg = CfConfig(neighbor_k=neighbor_k, co_rate_min=co_rate_min, neighbor_scope=scope)
    snrs_cfg = SnrsConfig(laplace_alpha=alpha, friend_min_strength=min_strength,
                          prediction_levels=_parse_levels(levels))
    return cf_cfg, snrs_cfg


@main.command()
@click.option("--users", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--items", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--categories", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--edge-density", type=click.FloatRange(0, 1, min_open=True), default=0.1,
              show_default=True, help="Fraction of user pairs that get an edge.")
@click.option("--seed-fraction", type=click.FloatRange(0, 1, min_open=True), default=0.2,
              show_default=True, help="Fraction of rating cells seeded before propagation.")
@click.option("--fill-passes", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Output dataset directory.")
def gen(users, items, categories, edge_density, seed_fraction, fill_passes, seed, out):
    """Generate a synthetic dataset and write its three CSV files."""
    cfg = GenConfig(n_users=users, n_items=items, n_categories=categories,
                    edge_density=edge_density, seed_rating_fraction=seed_fraction,
                    fill_passes=fill_passes, rng_seed=seed)
    dataset = generate_dataset(cfg)
    try:
        save_dataset(dataset, out)
    except OSError as exc:
        raise click.ClickException(f"cannot write {out}: {exc}") from exc
    meta = dataset.meta
    click.echo(f"wrote {out}: {users} users, {items} items, {categories} categories")
    click.echo(f"  edges: {dataset.graph.n_edges}")
    click.echo(f"  ratings: {dataset.ratings.n_rated} "
               f"(seeded {meta['cells_seeded']}, propagated {meta['cells_propagated']}, "
               f"random {meta['cells_random']})")
    click.echo(f"  category memberships: {dataset.categories.n_members}")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False),
              help="Dataset directory.")
@click.option("--method", required=True, type=click.Choice(["cf", "snrs"]))
@click.option("--user", "user_token", required=True, help='User label, e.g. "U7".')
@click.option("--item", "item_token", required=True, help='Item label, e.g. "I3".')
@_cf_options
@_snrs_options
def predict(data, method, user_token, item_token, neighbor_k, co_rate_min, scope,
            alpha, min_strength, levels):
    """Predict one cell, training on every other rating in the dataset."""
    dataset = _load(data)
    u = _resolve_label(dataset, user_token, "U")
    i = _resolve_label(dataset, item_token, "I")
    cf_cfg, snrs_cfg = _engine_configs(neighbor_k, co_rate_min, scope,
                                       alpha, min_strength, levels)

    held_out = {(user, item): r for user, item, r in dataset.ratings.cells()
                if (user, item) != (u, i)}
    train = Dataset(
        graph=dataset.graph,
        ratings=RatingMatrix(dataset.n_users, dataset.n_items, held_out),
        categories=dataset.categories,
    )

    fallback = None
    if method == "cf":
        try:
            detail = CfPredictor(train, cf_cfg).predict_detailed(u, i)
            value, fallback = detail.value, detail.fallback
        except ColdStartError:
            global_mean = train.ratings.global_mean()
            if global_mean is None:
                raise click.ClickException(
                    f"cold start: {user_token} has no ratings and the dataset "
                    f"has no other ratings to average") from None
            value, fallback = global_mean, "global-mean"
    else:
        try:
            value = SnrsPredictor(train, snrs_cfg).predict(u, i)
        except SocialRecError as exc:
            raise click.ClickException(str(exc)) from exc

    marker = f"  [fallback: {fallback}]" if fallback else ""
    click.echo(f"{method} {user_label(u)} x {item_label(i)}: "
               f"{value:.4f} (rounded {round_rating(value)}){marker}")


def _echo_reports(reports: list[EvaluationReport]) -> None:
    click.echo(f"{'method':<6} {'n':>4} {'mae':>7} {'mae_real':>9} "
               f"{'accuracy':>9} {'fallbacks':>10}")
    for report in reports:
        click.echo(f"{report.method:<6} {report.n_observations:>4} "
                   f"{report.mae_rounded:>7.4f} {report.mae_real:>9.4f} "
                   f"{report.accuracy_percent:>8.1f}% {report.n_fallback:>10}")


def _write_reports(reports: list[EvaluationReport], out: str | None) -> None:
    if out is None:
        return
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    write_detail_csv(reports, directory / "detail.csv")
    write_summary_csv(reports, directory / "summary.csv")
    click.echo(f"wrote {directory / 'detail.csv'} and {directory / 'summary.csv'}")


def _split_spec(dataset: Dataset, test_users: str, test_items: str) -> SplitSpec:
    spec = SplitSpec(test_users=_parse_numbers(test_users, "U", "test user"),
                     test_items=_parse_numbers(test_items, "I", "test item"))
    for u in spec.test_users:
        if u >= dataset.n_users:
            raise click.UsageError(f"test user {user_label(u)} outside dataset "
                                   f"({dataset.n_users} users)")
    for i in spec.test_items:
        if i >= dataset.n_items:
            raise click.UsageError(f"test item {item_label(i)} outside dataset "
                                   f"({dataset.n_items} items)")
    return spec


@main.command(name="eval")
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--method", required=True, type=click.Choice(["cf", "snrs"]))
@click.option("--test-users", default="51-100", show_default=True,
              help='Held-out users, e.g. "51-100" or "U51-U100".')
@click.option("--test-items", default="I1-I5", show_default=True,
              help='Held-out items, e.g. "I1-I5" or "6-10".')
@click.option("--out", type=click.Path(file_okay=False),
              help="Directory for detail.csv and summary.csv.")
@_cf_options
@_snrs_options
def eval_cmd(data, method, test_users, test_items, out, neighbor_k, co_rate_min,
             scope, alpha, min_strength, levels):
    """Evaluate one method on a train/test split."""
    dataset = _load(data)
    spec = _split_spec(dataset, test_users, test_items)
    cf_cfg, snrs_cfg = _engine_configs(neighbor_k, co_rate_min, scope,
                                       alpha, min_strength, levels)
    try:
        report = evaluate_method(dataset, spec, method, cf_cfg, snrs_cfg)
    except SocialRecError as exc:
        raise click.ClickException(str(exc)) from exc
    _echo_reports([report])
    _write_reports([report], out)


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--test-users", default="51-100", show_default=True,
              help='Held-out users, e.g. "51-100" or "U51-U100".')
@click.option("--test-items", default="I1-I5", show_default=True,
              help='Held-out items, e.g. "I1-I5" or "6-10".')
@click.option("--out", type=click.Path(file_okay=False),
              help="Directory for detail.csv and summary.csv.")
@_cf_options
@_snrs_options
def compare(data, test_users, test_items, out, neighbor_k, co_rate_min, scope,
            alpha, min_strength, levels):
    """Run both methods on the same split and print the two-row summary."""
    dataset = _load(data)
    spec = _split_spec(dataset, test_users, test_items)
    cf_cfg, snrs_cfg = _engine_configs(neighbor_k, co_rate_min, scope,
                                       alpha, min_strength, levels)
    try:
        cf_report, snrs_report = run_comparison(dataset, spec, cf_cfg, snrs_cfg)
    except SocialRecError as exc:
        raise click.ClickException(str(exc)) from exc
    _echo_reports([cf_report, snrs_report])
    _write_reports([cf_report, snrs_report], out)


if __name__ == "__main__":
    main()
