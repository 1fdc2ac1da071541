"""Command-line entry point: ``suspmag <subcommand> ...``.

Data goes to stdout or ``--output``; diagnostics go to stderr. Exit status is
0 on success, 1 on domain errors and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict

from . import __version__
from .calibration import REFERENCE_LENGTHS_M, SwingCalibration, load_calibration
from .dynamics import length_sweep, predict_swing
from .economics import (
    compare_platforms,
    comparison_csv,
    comparison_text,
    reference_platforms,
    platforms_from_json,
)
from .emi import (
    SelectionPolicy,
    fit_noise_model,
    predict_noise,
    read_noise_csv,
    read_sweep_csv,
    select_tether_length,
)
from .errors import DomainError
from .grids import (
    descriptive_stats,
    difference_elevation_correlation,
    extract_profile,
    profile_csv,
    ratio_compare,
    read_grid,
    resample,
    signal_ratio,
    stats_csv,
    subtract_compare,
    write_grid,
)
from .simulate import SimConfig, measure


class UsageError(Exception):
    pass


def _json(obj):
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".suspmag-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _note(msg):
    print(msg, file=sys.stderr)


def _float_list(text, what):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _load_params(args):
    """Calibration from ``--params`` (flat JSON of field names) or ``--calibration``."""
    if getattr(args, "params", None):
        with open(args.params, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{args.params}: invalid JSON: {exc}") from exc
        data.setdefault("name", os.path.basename(args.params))
        length = data.pop("length_m", None)
        if "final_amplitude_fraction" in data:
            data["final_fraction"] = data.pop("final_amplitude_fraction")
        return SwingCalibration.from_dict(data), length
    return load_calibration(args.calibration), None


def _length(args, default):
    length = args.length_m if args.length_m is not None else default
    if length is None:
        raise UsageError("a cable length is required (--length-m or length_m in --params)")
    return length


# --- subcommands ----------------------------------------------------------

def cmd_dynamics(args):
    cal, plen = _load_params(args)
    length = _length(args, plen)
    frac = args.final_fraction if args.final_fraction is not None else cal.final_fraction
    pred = predict_swing(cal.payload, cal.tether(length), cal.flight, frac)
    rec = {"calibration": cal.name, "length_m": length, "final_fraction": frac}
    rec.update(pred.to_dict())
    rec["rope_angle_deg"] = math.degrees(pred.rope_angle_rad)
    if pred.out_of_regime:
        _note("dynamics: zero flight speed, no turn forcing; amplitude is the static limit")
    if args.format == "csv":
        keys = list(rec)
        return ",".join(keys) + "\n" + ",".join(repr(rec[k]) if isinstance(rec[k], float)
                                                 else str(rec[k]) for k in keys) + "\n"
    return _json(rec)


def _noise_model(args):
    samples = read_noise_csv(args.noise)
    n_zero = sum(1 for s in samples if s.noise_nT == 0)
    if n_zero:
        _note(f"emi: {n_zero} zero-noise sample(s) excluded from the log fit")
    return fit_noise_model(samples, args.fixed_exponent)


def cmd_sweep(args):
    cal, _ = _load_params(args)
    lengths = _float_list(args.lengths, "--lengths")
    frac = args.final_fraction if args.final_fraction is not None else cal.final_fraction
    rows = length_sweep(cal.payload, cal.flight, cal.damping_ratio, lengths, frac)
    model = _noise_model(args) if args.noise else None
    recs = []
    for r in rows:
        rec = asdict(r)
        if model is not None:
            rec["noise_nT"] = predict_noise(model, r.length_m)
        recs.append(rec)
    if args.format == "json":
        return _json({"calibration": cal.name, "final_fraction": frac, "rows": recs})
    keys = list(recs[0])
    lines = [",".join(keys)]
    lines += [",".join(repr(float(rec[k])) for k in keys) for rec in recs]
    return "\n".join(lines) + "\n"


def cmd_simulate(args):
    cal, plen = _load_params(args)
    length = _length(args, plen)
    band = args.band if args.band is not None else cal.final_fraction
    tether = cal.tether(length)
    auto = SimConfig.auto(cal.payload, tether, cal.flight, band)
    cfg = SimConfig(cal.payload, tether, cal.flight,
                    args.dt if args.dt is not None else auto.time_step_s,
                    args.duration if args.duration is not None else auto.duration_s, band)
    amp, ts, traj = measure(cfg)
    if args.trajectory:
        _emit(traj.to_csv(), args.trajectory)
    if args.format == "csv":
        return traj.to_csv()
    pred = predict_swing(cal.payload, tether, cal.flight, band)
    return _json({
        "calibration": cal.name,
        "length_m": length,
        "time_step_s": cfg.time_step_s,
        "duration_s": cfg.duration_s,
        "settle_band_fraction": band,
        "forcing_end_s": traj.forcing_end_s,
        "measured_amplitude_m": amp,
        "measured_settling_s": ts,
        "closed_form_amplitude_m": pred.amplitude_m,
        "closed_form_settling_s": pred.settling_s,
    })


def cmd_emi_fit(args):
    model = _noise_model(args)
    rec = {"model": model.to_dict()}
    if args.fixed_exponent is None:
        inv_sq = fit_noise_model(read_noise_csv(args.noise), -2.0)
        rec["inverse_square"] = inv_sq.to_dict()
        rec["exponent_gap_vs_inverse_square"] = model.exponent_p + 2.0
    if args.at:
        rec["predictions"] = [{"distance_m": d, "noise_nT": predict_noise(model, d)}
                              for d in _float_list(args.at, "--at")]
    return _json(rec)


def _policy(args):
    weights = (1.0, 1.0, 1.0)
    if args.weights:
        weights = tuple(_float_list(args.weights, "--weights"))
        if len(weights) != 3:
            raise UsageError("--weights takes exactly three values w1,w2,w3")
    return SelectionPolicy(args.policy, args.noise_threshold, weights)


def cmd_select_length(args):
    model = _noise_model(args)
    if args.sweep:
        sweep = read_sweep_csv(args.sweep)
    else:
        cal = load_calibration(args.calibration)
        sweep = cal.sweep(REFERENCE_LENGTHS_M)
    report = select_tether_length(sweep, model, _policy(args))
    return _json(report.to_dict())


def cmd_economics(args):
    if args.paper_defaults and args.platforms:
        raise UsageError("use either --paper-defaults or --platforms, not both")
    if args.paper_defaults:
        platforms = reference_platforms()
    elif args.platforms:
        with open(args.platforms, encoding="utf-8") as fh:
            platforms = platforms_from_json(fh.read())
    else:
        raise UsageError("economics needs --paper-defaults or --platforms FILE")
    rows = compare_platforms(platforms)
    if args.format == "csv":
        return comparison_csv(rows)
    if args.format == "json":
        return _json([r.as_record() for r in rows])
    return comparison_text(rows)


def cmd_grid_stats(args):
    stats = descriptive_stats(read_grid(args.grid), args.mode_bin)
    if args.format == "csv":
        return stats_csv(stats)
    return _json(stats.to_dict())


def _co_registered(args):
    a, b = read_grid(args.grid_a), read_grid(args.grid_b)
    if args.resample_to_b:
        a = resample(a, b.cell_size_m, args.method)
    return a, b


def cmd_grid_compare(args):
    a, b = _co_registered(args)
    if args.mode == "ratio":
        out, guarded = ratio_compare(a, b)
        if guarded:
            _note(f"grids: {guarded} cell(s) blanked where |b| is below the ratio guard")
        return write_grid(out)
    if args.mode == "subtract":
        policy = "zero-min" if args.offset is None else args.offset
        out, offset = subtract_compare(a, b, policy)
        _note(f"grids: zero offset {offset!r} nT added to the difference")
        return write_grid(out)
    return _json(signal_ratio(a, b).to_dict())


def _parse_line(text):
    pts = []
    for pair in text.split(";"):
        if not pair.strip():
            continue
        vals = _float_list(pair, "--line vertex")
        if len(vals) != 2:
            raise UsageError(f"--line vertices are 'easting,northing', got {pair!r}")
        pts.append(tuple(vals))
    return pts


def cmd_profile(args):
    a, b = read_grid(args.grid_a), read_grid(args.grid_b)
    elev = read_grid(args.elevation)
    samples = extract_profile(a, b, elev, _parse_line(args.line), args.step_m)
    try:
        corr = difference_elevation_correlation(samples)
    except DomainError as exc:
        corr = None
        _note(f"grids: correlation unavailable: {exc}")
    if args.format == "json":
        return _json({"correlation_difference_elevation": corr,
                      "samples": [asdict(s) for s in samples]})
    if corr is not None:
        _note(f"grids: difference-elevation correlation {corr:.6f}")
    return profile_csv(samples)


# --- parser ---------------------------------------------------------------

def _add_params(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--calibration", metavar="PATH", default=None,
                   help="calibration JSON (default: bundled reference-calibration)")
    g.add_argument("--params", metavar="PATH",
                   help="flat JSON with mass_kg, length_m, speed_mps, ... field names")


def _add_noise_fit(p, required=True):
    p.add_argument("--noise", metavar="CSV", required=required,
                   help="noise samples with header distance_m,noise_nT")
    p.add_argument("--fixed-exponent", type=float, default=None,
                   help="fit only the coefficient with this exponent (e.g. -2)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="suspmag",
        description="Suspended-magnetometer tether design, survey economics and grid comparison.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("-o", "--output", metavar="PATH", help="write data here instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("dynamics", cmd_dynamics, "closed-form swing prediction for one cable length")
    _add_params(p)
    p.add_argument("--length-m", type=float)
    p.add_argument("--final-fraction", type=float)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("sweep", cmd_sweep, "amplitude and settling time over cable lengths")
    _add_params(p)
    p.add_argument("--lengths", default=",".join(f"{x:g}" for x in REFERENCE_LENGTHS_M))
    p.add_argument("--final-fraction", type=float)
    _add_noise_fit(p, required=False)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = add("simulate", cmd_simulate, "time-domain pendulum run with measured amplitude and settling")
    _add_params(p)
    p.add_argument("--length-m", type=float)
    p.add_argument("--dt", type=float, help="time step in seconds")
    p.add_argument("--duration", type=float, help="simulated seconds")
    p.add_argument("--band", type=float, help="settle band as a fraction of peak offset")
    p.add_argument("--trajectory", metavar="CSV", help="also write t_s,theta_rad,offset_m here")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("emi-fit", cmd_emi_fit, "fit a power-law noise-vs-distance model")
    _add_noise_fit(p)
    p.add_argument("--at", help="comma-separated distances to predict at")
    p.add_argument("--format", choices=["json"], default="json")

    p = add("select-length", cmd_select_length, "choose a tether length from a sweep and noise data")
    _add_noise_fit(p)
    p.add_argument("--sweep", metavar="CSV", help="sweep with header length_m,amplitude_m,settling_s")
    p.add_argument("--calibration", metavar="PATH", default=None,
                   help="build the sweep from this calibration when --sweep is absent")
    p.add_argument("--policy", choices=["threshold", "weighted"], default="threshold")
    p.add_argument("--noise-threshold", type=float, default=1.0)
    p.add_argument("--weights", help="w1,w2,w3 for amplitude, settling time and noise")
    p.add_argument("--format", choices=["json"], default="json")

    p = add("economics", cmd_economics, "survey cost metrics and platform comparison")
    p.add_argument("--paper-defaults", action="store_true", help="use the four bundled platforms")
    p.add_argument("--platforms", metavar="JSON", help="JSON array of platform specs")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")

    p = add("grid-stats", cmd_grid_stats, "descriptive statistics of a grid")
    p.add_argument("grid")
    p.add_argument("--mode-bin", type=float, default=1.0, help="histogram bin width for the mode")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("grid-compare", cmd_grid_compare, "ratio, offset difference or signal ratio of two grids")
    p.add_argument("grid_a")
    p.add_argument("grid_b")
    p.add_argument("--mode", choices=["ratio", "subtract", "signal-ratio"], default="ratio")
    p.add_argument("--offset", type=float, help="fixed offset for subtract mode")
    p.add_argument("--resample-to-b", action="store_true",
                   help="resample grid a to grid b's cell size first")
    p.add_argument("--method", choices=["bilinear", "nearest"], default="bilinear")

    p = add("profile", cmd_profile, "sample two grids and terrain along a polyline")
    p.add_argument("grid_a")
    p.add_argument("grid_b")
    p.add_argument("elevation")
    p.add_argument("--line", required=True, help="vertices 'e1,n1;e2,n2;...'")
    p.add_argument("--step-m", type=float, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
        _emit(text, args.output)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _note(f"suspmag: error: {exc}")
        return 2
    except DomainError as exc:
        _note(f"{exc.module}: {exc}")
        return 1
    except OSError as exc:
        _note(f"io: {exc}")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
