"""Pair-creation spectra, bubble kinematics and photon-count statistics from the command line.

Every subcommand reads a flat ``key = value`` configuration (``#`` starts a
comment) and/or ``--key value`` flags; flags win.  A report document from a
previous run is also accepted as ``--config``, in which case its ``inputs``
block is reused.

Exit codes: 0 success, 2 configuration error, 3 numeric-domain error.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, _kernels
from .bogolubov import (
    RefractiveTransition,
    build_spectrum,
    effective_temperature_adiabatic,
    fine_tuning_residual,
    omega_window_from_ck_tau,
    sudden_limit,
    tau,
)
from .constants import NATURAL, SI
from .errors import ConfigError, DegenerateInputError, DomainError
from .kinematics import (
    BubbleGeometry,
    FIRST_ZERO,
    PLANEWAVE_THRESHOLD,
    form_factor,
    planewave_valid,
    planewave_validity,
    sample_pair_directions,
)
from .montecarlo import (
    DetectorConfig,
    SourceConfig,
    read_events_csv,
    run_ensemble,
    summarize_counts,
    write_events_csv,
)
from .reporting import csv_text, timestamp, to_json

EXIT_CONFIG = 2
EXIT_DOMAIN = 3

ADIABATIC_WINDOW = (5.0, 20.0)  # in c k tau
SUDDEN_WINDOW = (1e-4, 1e-2)


@dataclass(frozen=True)
class Key:
    kind: type
    default: object
    unit: str
    check: str = ""


def _profile_keys():
    return {
        "n_in": Key(float, 1.0, "dimensionless", ">=1"),
        "n_out": Key(float, 1.3, "dimensionless", ">=1"),
        "t0_s": Key(float, 1e-15, "s (natural: 1/energy)", ">0"),
    }


_COMMON = {"natural_units": Key(bool, False, "flag")}

SCHEMAS = {
    "spectrum": {
        **_profile_keys(),
        "omega_min": Key(float, None, "rad/s", ">0"),
        "omega_max": Key(float, None, "rad/s", ">0"),
        "points": Key(int, 400, "count", ">=3"),
    },
    "formfactor": {
        "radius_m": Key(float, 1e-6, "m", ">0"),
        "q_min": Key(float, 0.0, "1/m", ">=0"),
        "q_max": Key(float, None, "1/m", ">0"),
        "points": Key(int, 1001, "count", ">=2"),
    },
    "angular": {
        "k_mag": Key(float, 1e8, "1/m", ">0"),
        "radius_m": Key(float, 1e-6, "m", ">0"),
        "n_medium": Key(float, 1.0, "dimensionless", ">=1"),
        "samples": Key(int, 1_000_000, "count", ">=1"),
        "bins": Key(int, 50, "count", ">=1"),
        "theta_max": Key(float, math.pi, "rad", ">0"),
        "seed": Key(int, 0, "uint64", "seed"),
    },
    "simulate": {
        "source": Key(str, None, "thermal|squeezed", "source"),
        "zeta": Key(float, None, "dimensionless", ">=0"),
        "nbar_a": Key(float, None, "photons", ">=0"),
        "nbar_b": Key(float, None, "photons", ">=0"),
        "eta_a": Key(float, 1.0, "probability", "[0,1]"),
        "eta_b": Key(float, 1.0, "probability", "[0,1]"),
        "flashes": Key(int, 1_000_000, "count", ">=1"),
        "seed": Key(int, 0, "uint64", "seed"),
    },
    "temperature": _profile_keys(),
    "discriminate": {
        "events": Key(str, None, "path", "required"),
        "eta_a": Key(float, 1.0, "probability", "[0,1]"),
        "eta_b": Key(float, 1.0, "probability", "[0,1]"),
    },
}
for _schema in SCHEMAS.values():
    _schema.update(_COMMON)


# ------------------------------------------------------------ config parsing


def parse_config_text(text):
    """Parse ``key = value`` lines, or the ``inputs`` of a report document."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        inputs = dict(doc.get("inputs", doc))
        inputs.pop("subcommand", None)
        return {k: v for k, v in inputs.items() if v is not None}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", key=line)
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def _convert(name, key, raw):
    if isinstance(raw, key.kind) and not (key.kind is int and isinstance(raw, bool)):
        value = raw
    else:
        text = str(raw).strip()
        try:
            if key.kind is bool:
                low = text.lower()
                if low not in ("1", "0", "true", "false", "yes", "no"):
                    raise ValueError(text)
                value = low in ("1", "true", "yes")
            elif key.kind is int:
                value = int(text)
            elif key.kind is float:
                value = float(text)
            else:
                value = text
        except ValueError:
            raise ConfigError(f"cannot parse {text!r} as {key.kind.__name__}", key=name) from None
    if key.kind is float and not math.isfinite(value):
        raise ConfigError(f"value {value!r} is not finite", key=name)
    _check(name, key, value)
    return value


def _check(name, key, value):
    rule = key.check
    bad = (
        (rule == ">0" and not value > 0)
        or (rule == ">=0" and not value >= 0)
        or (rule == ">=1" and not value >= 1)
        or (rule == ">=2" and not value >= 2)
        or (rule == ">=3" and not value >= 3)
        or (rule == "[0,1]" and not 0 <= value <= 1)
        or (rule == "seed" and not 0 <= value < 1 << 64)
        or (rule == "source" and value not in ("thermal", "squeezed"))
    )
    if bad:
        raise ConfigError(f"value {value!r} violates {rule}", key=name)


def resolve_config(subcommand, file_values, flag_values):
    schema = SCHEMAS[subcommand]
    merged = {}
    for source in (file_values, flag_values):
        for name, raw in source.items():
            if name not in schema:
                raise ConfigError(f"unknown key for '{subcommand}'", key=name)
            merged[name] = raw
    config = {}
    for name, key in schema.items():
        if name in merged:
            config[name] = _convert(name, key, merged[name])
        else:
            config[name] = key.default
    return config


# --------------------------------------------------------------- subcommands


def _units(config):
    return NATURAL if config["natural_units"] else SI


def _profile(config):
    return RefractiveTransition(config["n_in"], config["n_out"], config["t0_s"])


def cmd_spectrum(config):
    units = _units(config)
    profile = _profile(config)
    scale = profile.n_out * tau(profile)  # c k tau per unit omega_out
    if config["omega_min"] is None:
        config["omega_min"] = 1e-5 / scale
    if config["omega_max"] is None:
        config["omega_max"] = 30.0 / scale
    if not config["omega_max"] > config["omega_min"]:
        raise ConfigError("omega_max must exceed omega_min", key="omega_max")
    omegas = np.geomspace(config["omega_min"], config["omega_max"], config["points"])
    if np.any(np.diff(omegas) <= 0):
        raise ConfigError("grid is not strictly increasing at this resolution", key="points")
    spec = build_spectrum(profile, omegas, units)
    peak = spec.dn_domega.max()
    rel = spec.dn_domega / peak if peak > 0 else spec.dn_domega
    table = csv_text(
        ("omega_out", "beta_sq", "zeta", "T_k", "dN_domega_rel"),
        (spec.omegas, spec.beta_sq, spec.zetas, spec.temps, rel),
    )
    windows = {}
    for label, (lo, hi) in (("adiabatic", ADIABATIC_WINDOW), ("sudden", SUDDEN_WINDOW)):
        entry = {"ck_tau_min": lo, "ck_tau_max": hi}
        try:
            report = fine_tuning_residual(spec, omega_window_from_ck_tau(profile, lo, hi))
            entry["points"] = int(report.kappas.size)
            entry["coefficient_of_variation"] = report.coefficient_of_variation
        except DegenerateInputError as exc:
            entry["error"] = str(exc)
        windows[label] = entry
    results = {
        "tau": tau(profile),
        "sudden_limit_beta_sq": sudden_limit(profile),
        "points": int(spec.omegas.size),
        "peak_omega_dN_domega": float(spec.omegas[int(np.argmax(spec.dn_domega))]),
        "fine_tuning": windows,
    }
    return results, table


def cmd_formfactor(config):
    geometry = BubbleGeometry(config["radius_m"])
    R = geometry.radius_R
    if config["q_max"] is None:
        config["q_max"] = 20.0 / R
    if not config["q_max"] > config["q_min"]:
        raise ConfigError("q_max must exceed q_min", key="q_max")
    q = np.linspace(config["q_min"], config["q_max"], config["points"])
    S = form_factor(q, geometry)
    S0 = float(form_factor(0.0, geometry))
    table = csv_text(("q", "S", "S_sq_normalized"), (q, S, (S / S0) ** 2))
    crossing = np.flatnonzero(np.sign(S[:-1]) * np.sign(S[1:]) < 0)
    results = {
        "S_at_zero": S0,
        "first_zero_qR_exact": FIRST_ZERO,
        "first_sign_change_qR": (
            [float(q[crossing[0]] * R), float(q[crossing[0] + 1] * R)] if crossing.size else None
        ),
    }
    return results, table


def cmd_angular(config):
    geometry = BubbleGeometry(config["radius_m"])
    units = _units(config)
    k = config["k_mag"]
    rng = np.random.default_rng(config["seed"])
    theta = sample_pair_directions(k, geometry, rng, config["samples"])
    counts, edges = np.histogram(theta, bins=config["bins"], range=(0.0, config["theta_max"]))
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[1:] + edges[:-1])
    density = counts / (config["samples"] * width)
    table = csv_text(("theta_bin_center", "count", "density"), (centers, counts, density))
    n = config["n_medium"]
    rho = planewave_validity(units.c * k / n, n, geometry, units)
    results = {
        "kR": k * geometry.radius_R,
        "median_deviation": float(np.median(theta)),
        "mean_deviation": float(np.mean(theta)),
        "overflow": int(config["samples"] - counts.sum()),
        "planewave_ratio": rho,
        "planewave_threshold": PLANEWAVE_THRESHOLD,
        "planewave_valid": bool(planewave_valid(rho)),
    }
    return results, table


def _source(config):
    kind = config["source"]
    try:
        if kind == "squeezed":
            if config["zeta"] is None:
                raise ConfigError("squeezed source needs zeta", key="zeta")
            for name in ("nbar_a", "nbar_b"):
                if config[name] is not None:
                    raise ConfigError("not allowed for a squeezed source", key=name)
            return SourceConfig.squeezed(config["zeta"])
        if kind == "thermal":
            if config["zeta"] is not None:
                raise ConfigError("not allowed for a thermal source", key="zeta")
            for name in ("nbar_a", "nbar_b"):
                if config[name] is None:
                    raise ConfigError("thermal source needs nbar_a and nbar_b", key=name)
            return SourceConfig.thermal(config["nbar_a"], config["nbar_b"])
    except DomainError as exc:
        raise ConfigError(str(exc), key="source") from None
    raise ConfigError("source must be 'thermal' or 'squeezed'", key="source")


def cmd_simulate(config, workers=1, events_out=None):
    source = _source(config)
    det = DetectorConfig(config["eta_a"], config["eta_b"])
    out = run_ensemble(
        source, det, config["flashes"], config["seed"], workers=workers,
        keep_events=events_out is not None,
    )
    if events_out is not None:
        report, n_a, n_b = out
        write_events_csv(events_out, n_a, n_b)
    else:
        report = out
    return report.as_dict(), None


def cmd_discriminate(config):
    path = config["events"]
    if path is None:
        raise ConfigError("path to an event CSV is required", key="events")
    try:
        with open(path, newline="") as fh:
            n_a, n_b = read_events_csv(fh)
    except OSError as exc:
        raise ConfigError(str(exc), key="events") from None
    if n_a.size < 2:
        raise ConfigError("event file needs at least two flashes", key="events")
    det = DetectorConfig(config["eta_a"], config["eta_b"])
    return summarize_counts(n_a, n_b, det).as_dict(), None


def cmd_temperature(config):
    units = _units(config)
    profile = _profile(config)
    t = effective_temperature_adiabatic(profile, units)
    results = {
        "tau": tau(profile),
        "T_closed_form": t.verbatim,
        "T_composed": t.composed,
        "ratio_composed_to_closed_form": t.ratio,
        "reference_omega": t.reference_omega,
        "kT_closed_form": t.verbatim * units.k_b,
        "kT_composed": t.composed * units.k_b,
    }
    return results, None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "formfactor": cmd_formfactor,
    "angular": cmd_angular,
    "simulate": cmd_simulate,
    "temperature": cmd_temperature,
    "discriminate": cmd_discriminate,
}


def build_document(subcommand, config, results):
    units = _units(config)
    provenance = {
        "artifact": "sonosqueeze",
        "version": __version__,
        "seed": config.get("seed"),
        "timestamp": timestamp(),
        "backend": _kernels.get_backend()[0],
        "constants": units.as_dict(),
    }
    return {"inputs": {"subcommand": subcommand, **config}, "results": results, "provenance": provenance}


def run(subcommand, config, workers=1, events_out=None):
    """Execute one subcommand; returns ``(document, csv_text_or_None)``."""
    cmd = COMMANDS[subcommand]
    if subcommand == "simulate":
        results, table = cmd(config, workers=workers, events_out=events_out)
    else:
        results, table = cmd(config)
    return build_document(subcommand, config, results), table


def _parser():
    parser = argparse.ArgumentParser(prog="sonosqueeze", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value file or previous report document")
        p.add_argument("--out", help="write the report document here instead of stdout")
        if name in ("spectrum", "formfactor", "angular"):
            p.add_argument("--csv", help="write the CSV table here (default: stdout)")
        if name == "simulate":
            p.add_argument("--events", help="dump per-flash counts as CSV")
            p.add_argument("--workers", type=int, default=1, help="threads; results do not depend on it")
        for key_name, key in schema.items():
            flags = [f"--{key_name}"]
            if "_" in key_name:
                flags.append(f"--{key_name.replace('_', '-')}")
            if key.kind is bool:
                p.add_argument(*flags, dest=f"key_{key_name}", action="store_const",
                               const=True, default=None, help=key.unit)
            else:
                p.add_argument(*flags, dest=f"key_{key_name}", default=None, metavar="VALUE",
                               help=f"{key.unit}; default {key.default!r}")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    flags = {
        name[4:]: value for name, value in vars(args).items()
        if name.startswith("key_") and value is not None
    }
    try:
        file_values = {}
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    file_values = parse_config_text(fh.read())
            except OSError as exc:
                raise ConfigError(str(exc), key="config") from None
        config = resolve_config(args.subcommand, file_values, flags)
        events_fh = None
        if getattr(args, "events", None):
            events_fh = open(args.events, "w", newline="", encoding="utf-8")
        try:
            doc, table = run(args.subcommand, config, getattr(args, "workers", 1), events_fh)
        finally:
            if events_fh is not None:
                events_fh.close()
    except ConfigError as exc:
        print(f"error: {exc.key}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    text = to_json(doc) + "\n"
    csv_path = getattr(args, "csv", None)
    if table is not None and csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(table)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        if table is not None and not csv_path:
            sys.stdout.write(table)
    else:
        if table is not None and not csv_path:
            sys.stdout.write(table)
            sys.stdout.write("\n")
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
