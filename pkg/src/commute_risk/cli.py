"""Command-line interface: single trips, batches, sweeps, regression, synthesis."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analysis import regress_risk_drivers, spatial_sweep, temporal_sweep
from .dataio import (
    SchemaError,
    format_probability,
    load_network,
    load_results,
    load_trips,
    load_zones,
    parse_depart,
    parse_endpoint,
    record_to_doc,
    write_density,
    write_results,
    write_ridehail_profile,
    write_transit_profiles,
)
from .network import TripQuery
from .pipeline import DataBundle, DataMissingError, evaluate_batch, evaluate_trip
from .planner import NoPathError
from .synth import (
    TripGenerationProfile,
    synthesize_density,
    synthesize_ridehail_profile,
    synthesize_transit_profiles,
)
from .uncertainty import BootstrapConfig

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_PATH = 2

data_dir_option = click.option(
    "--data-dir",
    envvar="COMMUTE_RISK_DATA_DIR",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    required=True,
    help="Directory with the data bundle (or set COMMUTE_RISK_DATA_DIR).",
)





@click.group()
def main() -> None:
    """Door-to-door commute infection risk estimation."""


@main.command()
@click.option("--origin", required=True, help="node:<id> or zone:<id>")
@click.option("--dest", required=True, help="node:<id> or zone:<id>")
@click.option("--depart", required=True, help="HH:MM or seconds since midnight")
@click.option("--mode", required=True, type=click.Choice(["transit", "walk", "bike", "drive", "ride_hailing"]))
@click.option("--paths", "k", default=1, show_default=True, help="Number of alternative paths.")
@click.option("--bootstrap", "samples", default=1000, show_default=True, help="Bootstrap sample count.")
@click.option("--seed", default=0, show_default=True)
@click.option("--exact/--approx", "exact", default=False, help="Exact survival products vs first-order sums.")
@data_dir_option
def trip(origin, dest, depart, mode, k, samples, seed, exact, data_dir) -> None:
    """Evaluate one trip end to end and print the result record."""
    try:
        bundle = DataBundle.load(data_dir)
        query = TripQuery(
            origin=parse_endpoint(origin, bundle.zones),
            destination=parse_endpoint(dest, bundle.zones),
            depart_s=parse_depart(depart),
            mode=mode,
        )
        config = BootstrapConfig(
            samples=samples, seed=seed, mode="exact" if exact else "first_order"
        )
        evaluation = evaluate_trip(query, bundle, k=k, config=config, trip_id="trip")
    except NoPathError as err:
        click.echo(f"no path: {err}", err=True)
        sys.exit(EXIT_NO_PATH)
    except (SchemaError, DataMissingError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo(json.dumps(record_to_doc(evaluation.to_record("trip")), indent=1))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "structured"]), show_default=True)
@click.option("--paths", "k", default=1, show_default=True)
@click.option("--bootstrap", "samples", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--exact/--approx", "exact", default=False)
@click.option("--workers", default=1, show_default=True)
@click.option("--sort", "sort_order", type=click.Choice(["input", "desc"]), default="input", show_default=True,
              help="desc sorts rows by mean probability, largest first.")
@data_dir_option
def batch(input_path, out, fmt, k, samples, seed, exact, workers, sort_order, data_dir) -> None:
    """Evaluate a CSV of trips; invalid rows become error rows."""
    try:
        bundle = DataBundle.load(data_dir)
        rows = load_trips(input_path, bundle.zones)
        config = BootstrapConfig(
            samples=samples, seed=seed, mode="exact" if exact else "first_order"
        )
        records = evaluate_batch(rows, bundle, k=k, config=config, workers=workers)
        if sort_order == "desc":
            records = sorted(records, key=lambda r: (-r.mean, r.trip_id))
        write_results(records, out, format=fmt)
    except (SchemaError, DataMissingError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    ok = sum(1 for r in records if r.status == "ok")
    click.echo(f"wrote {len(records)} rows ({ok} ok) to {out}")


@main.command()
@click.option("--kind", required=True, type=click.Choice(["spatial", "temporal"]))
@click.option("--mode", required=True, type=click.Choice(["transit", "walk", "bike", "drive", "ride_hailing"]))
@click.option("--dest", required=True, help="node:<id> or zone:<id>")
@click.option("--depart", default="08:00", show_default=True, help="Departure (spatial sweeps).")
@click.option("--step", "step_h", default=1.0, show_default=True, help="Grid step in hours (temporal sweeps).")
@click.option("--bootstrap", "samples", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write CSV here instead of stdout.")
@data_dir_option
def sweep(kind, mode, dest, depart, step_h, samples, seed, out, data_dir) -> None:
    """Per-zone (spatial) or per-hour (temporal) synthetic risk tables."""
    try:
        bundle = DataBundle.load(data_dir)
        destination = parse_endpoint(dest, bundle.zones)
        config = BootstrapConfig(samples=samples, seed=seed)
        if kind == "spatial":
            cells = spatial_sweep(bundle, mode, destination, parse_depart(depart), config)
            header = "zone,status,mean,std_error"
        else:
            cells = temporal_sweep(bundle, mode, destination, step_h, config)
            header = "hour,status,mean,std_error,scaled_error"
    except (SchemaError, DataMissingError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    lines = [header]
    for cell in cells:
        row = [cell.key, cell.status, format_probability(cell.mean), format_probability(cell.std_error)]
        if kind == "temporal":
            row.append(format_probability(cell.scaled_error))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(cells)} cells to {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--results", "results_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--trips", "trips_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@data_dir_option
def regress(results_path, trips_path, data_dir) -> None:
    """Fit infection probability against mode, distance and departure flags."""
    try:
        network = load_network(Path(data_dir) / "network.json")
        zones = load_zones(Path(data_dir) / "zones.json")
        rows = load_trips(trips_path, zones)
        results = load_results(results_path)
        fit = regress_risk_drivers(rows, results, network)
    except (SchemaError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo(f"{'term':20s} {'coef (x1000)':>14s} {'p-value':>10s}")
    for term in fit.terms:
        click.echo(
            f"{term:20s} {fit.coefficients[term] * 1000.0:>+14.4f} {fit.p_values[term]:>10.2e}"
        )
    click.echo(f"R^2 = {fit.r_squared:.4f}   n = {fit.n}")
    click.echo("(coefficients scaled by 1000 for display; stored values are raw probabilities)")


@main.group()
def synth() -> None:
    """Generate synthetic inputs."""


@synth.command("demo")
@click.option("--out", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--seed", default=None, type=int, help="Defaults to the shipped demo seed.")
@click.option("--trips", "n_trips", default=500, show_default=True)
@click.option("--replications", default=24, show_default=True)
def synth_demo(out, seed, n_trips, replications) -> None:
    """Write the complete demo city bundle (network, zones, profiles, trips)."""
    from .demo import DEMO_SEED, generate_demo

    generate_demo(out, seed=DEMO_SEED if seed is None else seed,
                  n_trips=n_trips, density_replications=replications)
    click.echo(f"demo bundle written to {out}")


@synth.command("density")
@click.option("--out", "out_file", default="density.json", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--replications", default=50, show_default=True)
@click.option("--interval", "interval_min", default=1, show_default=True)
@data_dir_option
def synth_density(out_file, seed, replications, interval_min, data_dir) -> None:
    """Regenerate street density distributions from zones and the network."""
    try:
        network = load_network(Path(data_dir) / "network.json")
        zones = load_zones(Path(data_dir) / "zones.json")
        grid = synthesize_density(
            zones, network, TripGenerationProfile(), replications=replications,
            seed=seed, interval_min=interval_min,
        )
        write_density(grid, Path(data_dir) / out_file)
    except (SchemaError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo(f"wrote {len(grid.cells)} density cells")


@synth.command("transit")
@click.option("--out", "out_file", default="transit_profiles.json", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--demand-scale", default=20.0, show_default=True)
@data_dir_option
def synth_transit(out_file, seed, demand_scale, data_dir) -> None:
    """Regenerate per-route load and run-time profiles."""
    try:
        network = load_network(Path(data_dir) / "network.json")
        zones = load_zones(Path(data_dir) / "zones.json")
        profiles = synthesize_transit_profiles(network, zones, demand_scale=demand_scale, seed=seed)
        write_transit_profiles(profiles, Path(data_dir) / out_file)
    except (SchemaError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo(f"wrote profiles for {len(profiles.routes)} routes")


@synth.command("ridehail")
@click.option("--out", "out_file", default="ridehail_profile.json", show_default=True)
@click.option("--seed", default=0, show_default=True)
@data_dir_option
def synth_ridehail(out_file, seed, data_dir) -> None:
    """Regenerate the ride-hailing occupancy profile."""
    try:
        zones = load_zones(Path(data_dir) / "zones.json")
        profile = synthesize_ridehail_profile(seed=seed, zones=zones)
        write_ridehail_profile(profile, Path(data_dir) / out_file)
    except (SchemaError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    click.echo("wrote ride-hailing profile")


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@data_dir_option
def serve(port, host, data_dir) -> None:
    """Run the HTTP API over the loaded data bundle."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
