"""Command-line front end.

Subcommands: verify | spectrum | husimi | star-convergence | edge-sim.
Configuration lives in an INI file (sections mirror the library modules);
command-line flags override file values.  Data files written into the
output directory are byte-identical across runs of the same
configuration: fixed ordering, 17-significant-digit decimals, no
timestamps (timings go to stdout only).

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import algebra, bargmann, droplet, edge, starprod
from .errors import (
    ArstatError,
    ConfigError,
    FitError,
    InvalidSpec,
    SizeError,
    TruncationError,
)

ENV_OUT_DIR = "ARSTAT_OUT_DIR"

DEFAULT_CONFIG = {
    "statistics": {"r": "2", "s": "-1", "k": "4"},
    "hamiltonian": {"e0": "0.0"},
    "droplet": {"points": "101"},
    "sweep": {
        "k_values": "20, 40, 80, 160",
        "pair": "raise_sq_lower_sq",
        "r": "1",
        "s": "-1",
        "n_max": "60",
        # errors below this are finite-difference round-off, not remainders
        "error_floor": "1e-10",
    },
    "edge": {
        "velocities": "1.0",
        "winding": "0.0",
        "zero_mode": "0.0",
        "amplitudes": "0.5",
        "n_theta": "64",
        "n_time": "64",
        "periods": "1",
        "corrupted": "false",
        "algebra_modes": "1",
        "algebra_level": "6",
        "algebra_zero_dim": "8",
    },
    "verify": {"n_points": "20"},
    "tolerances": {
        "triple": "1e-10",
        "hermiticity": "1e-15",
        "spectrum": "1e-12",
        "gram": "1e-6",
        "metric_inverse": "1e-10",
        "metric_hessian": "1e-5",
        "overlap": "1e-8",
        "eom": "1e-12",
        "periodicity": "1e-12",
        "action": "1e-10",
    },
}

SLOPE_BAND = (-2.3, -1.7)


# ------------------------------------------------------------ configuration

@dataclass
class RunConfig:
    command: str
    parser: configparser.ConfigParser
    out_dir: Path
    formats: tuple[str, ...]
    seed: int
    threads: int
    config_hash: str

    def get(self, section: str, key: str, cast, required: bool = True, default=None):
        if self.parser.has_option(section, key):
            raw = self.parser.get(section, key)
            try:
                return cast(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None
        if default is not None or not required:
            return default
        raise ConfigError(f"missing required field [{section}] {key}")


def _parse_float_list(raw: str) -> list[float]:
    return [float(tok) for tok in raw.replace(";", ",").split(",") if tok.strip()]


def _parse_complex_groups(raw: str) -> list[list[complex]]:
    groups = [grp for grp in raw.split(";") if grp.strip()]
    return [
        [complex(tok.strip().replace(" ", "")) for tok in grp.split(",") if tok.strip()]
        for grp in groups
    ]


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def load_config(args) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.read_dict(DEFAULT_CONFIG)
    hashed = ["defaults"]
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from None
        hashed.append(text)
    for override in args.set or []:
        try:
            target, value = override.split("=", 1)
            section, key = target.split(".", 1)
        except ValueError:
            raise ConfigError(
                f"bad --set {override!r}; expected section.key=value"
            ) from None
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section.strip(), key.strip(), value.strip())
        hashed.append(override)
    hashed.append(f"seed={args.seed}")
    digest = hashlib.sha256("\n".join(hashed).encode()).hexdigest()[:16]

    out_dir = args.out or os.environ.get(ENV_OUT_DIR) or "arstat_out"
    formats = tuple(tok.strip() for tok in args.format.split(",") if tok.strip())
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return RunConfig(
        command=args.command,
        parser=parser,
        out_dir=Path(out_dir),
        formats=formats,
        seed=args.seed,
        threads=args.threads,
        config_hash=digest,
    )


def statistics_spec(cfg: RunConfig) -> algebra.StatisticsSpec:
    r = cfg.get("statistics", "r", int)
    s = cfg.get("statistics", "s", int)
    k = cfg.get("statistics", "k", float)
    n_max = cfg.get("statistics", "n_max", int, required=False)
    if s == +1 and n_max is None:
        raise ConfigError("missing required field [statistics] n_max (bosonic family)")
    try:
        return algebra.StatisticsSpec(r=r, s=s, k=k, n_max=n_max)
    except InvalidSpec as exc:
        raise ConfigError(str(exc)) from None


def hamiltonian_spec(cfg: RunConfig, r: int) -> algebra.HamiltonianSpec:
    e0 = cfg.get("hamiltonian", "e0", float, default=0.0)
    raw = cfg.get("hamiltonian", "e", str, required=False)
    if raw is None:
        energies = tuple(float(i + 1) for i in range(r))
    else:
        energies = tuple(_parse_float_list(raw))
    if len(energies) != r:
        raise ConfigError(f"[hamiltonian] e needs {r} entries, got {len(energies)}")
    return algebra.HamiltonianSpec(e0=e0, e=energies)


# ----------------------------------------------------------------- reports

def fmt(value: float) -> str:
    return f"{value:.17g}"


@dataclass
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tolerance


def write_json(cfg: RunConfig, name: str, payload: dict):
    if "json" not in cfg.formats:
        return None
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path

def write_csv(cfg: RunConfig, name: str, header: list[str], rows) -> Path | None:
    if "csv" not in cfg.formats:
        return None
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / f"{name}.csv"
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def emit_checks(cfg: RunConfig, name: str, checks: list[Check], extra: dict | None = None) -> int:
    for check in checks:
        status = "pass" if check.passed else "FAIL"
        print(f"  [{status}] {check.name}: {check.value:.3e} (tolerance {check.tolerance:.1e})")
    payload = {
        "command": cfg.command,
        "config_hash": cfg.config_hash,
        "checks": [
            {
                "name": c.name,
                "value": fmt(c.value),
                "tolerance": fmt(c.tolerance),
                "pass": c.passed,
            }
            for c in checks
        ],
        "status": "pass" if all(c.passed for c in checks) else "fail",
    }
    if extra:
        payload.update(extra)
    write_json(cfg, name, payload)
    return 0 if all(c.passed for c in checks) else 1


# ---------------------------------------------------------------- commands

def cmd_verify(cfg: RunConfig) -> int:
    spec = statistics_spec(cfg)
    tol = lambda key: cfg.get("tolerances", key, float)
    n_points = cfg.get("verify", "n_points", int)
    basis = algebra.enumerate_basis(spec)
    ladders = algebra.ladder_matrices(basis)
    hspec = hamiltonian_spec(cfg, spec.r)
    rng = np.random.default_rng(cfg.seed)
    scale = 0.8 if spec.s == -1 else 0.35 / math.sqrt(spec.r)

    def random_point():
        return scale * (rng.uniform(-1, 1, spec.r) + 1j * rng.uniform(-1, 1, spec.r))

    points = [random_point() for _ in range(n_points)]
    pairs = [(random_point(), random_point()) for _ in range(n_points)]

    def check_triple():
        report = algebra.verify_triple_relations(basis, ladders)
        return Check("triple_relations", report.max_residual, tol("triple"))

    def check_hermiticity():
        worst = max(
            float(np.max(np.abs(ladders.plus[i].toarray() - ladders.minus[i].toarray().conj().T)))
            for i in range(spec.r)
        )
        return Check("ladder_hermiticity", worst, tol("hermiticity"))

    def check_spectrum():
        h = algebra.hamiltonian(basis, hspec).toarray()
        eigs = np.sort(np.linalg.eigvalsh(h))
        expected = np.sort(
            [hspec.e0 + sum(e * n for e, n in zip(hspec.e, occ)) for occ in basis.states]
        )
        return Check("spectrum_vs_occupations", float(np.max(np.abs(eigs - expected))), tol("spectrum"))

    def check_dimension():
        if spec.s == -1:
            expected = algebra.fermionic_dimension(spec.r, int(spec.k))
        else:
            expected = math.comb(spec.n_max + spec.r, spec.r)
        return Check("dimension_closed_form", float(abs(basis.dim - expected)), 0.0)

    def check_gram():
        rule = bargmann.build_quadrature(spec, n_radial=48)
        keep = [i for i, occ in enumerate(basis.states) if sum(occ) <= min(4, spec.total_cap)]
        gram = bargmann.orthonormality_gram(rule, basis)[np.ix_(keep, keep)]
        return Check(
            "quadrature_orthonormality", float(np.max(np.abs(gram - np.eye(len(keep))))), tol("gram")
        )

    def check_metric_inverse():
        worst = 0.0
        for z in points:
            m = bargmann.metric(spec, z)
            worst = max(worst, float(np.max(np.abs(m.g @ m.g_inv - np.eye(spec.r)))))
        return Check("metric_inverse_identity", worst, tol("metric_inverse"))

    def check_metric_hessian():
        worst = 0.0
        for z in points[: max(3, n_points // 4)]:
            m = bargmann.metric(spec, z)
            hess = bargmann.distance_hessian(spec, z)
            worst = max(worst, float(np.max(np.abs(m.g - hess))))
        return Check("metric_vs_distance_hessian", worst, tol("metric_hessian"))

    def check_overlap():
        worst = 0.0
        for z, w in pairs:
            closed = bargmann.overlap(spec, z, w)
            series = bargmann.overlap_from_vectors(spec, basis, z, w)
            worst = max(worst, abs(closed - series))
        return Check("overlap_dual_path", worst, tol("overlap"))

    tasks = [
        check_triple,
        check_hermiticity,
        check_spectrum,
        check_dimension,
        check_gram,
        check_metric_inverse,
        check_metric_hessian,
        check_overlap,
    ]
    start = time.perf_counter()
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            checks = list(pool.map(lambda fn: fn(), tasks))
    else:
        checks = [fn() for fn in tasks]
    elapsed = time.perf_counter() - start
    print(f"verify: {len(checks)} checks in {elapsed:.2f}s")
    return emit_checks(cfg, "verify_report", checks)


def cmd_spectrum(cfg: RunConfig) -> int:
    spec = statistics_spec(cfg)
    hspec = hamiltonian_spec(cfg, spec.r)
    basis = algebra.enumerate_basis(spec)
    h = algebra.hamiltonian(basis, hspec).toarray()
    eigs = np.sort(np.linalg.eigvalsh(h))
    expected = np.sort(
        [hspec.e0 + sum(e * n for e, n in zip(hspec.e, occ)) for occ in basis.states]
    )
    deviation = float(np.max(np.abs(eigs - expected))) if basis.dim else 0.0
    tol = cfg.get("tolerances", "spectrum", float)

    header = [f"n_{i + 1}" for i in range(spec.r)] + ["energy"]
    rows = []
    for occ in basis.states:
        energy = hspec.e0 + sum(e * n for e, n in zip(hspec.e, occ))
        rows.append([str(n) for n in occ] + [energy])
    write_csv(cfg, "spectrum", header, rows)

    payload = {
        "command": cfg.command,
        "config_hash": cfg.config_hash,
        "dimension": basis.dim,
        "max_energy_deviation": fmt(deviation),
        "exact_match": deviation <= tol,
    }
    if spec.s == -1:
        payload["closed_form_dimension"] = algebra.fermionic_dimension(spec.r, int(spec.k))
    write_json(cfg, "spectrum", payload)
    print(f"spectrum: {basis.dim} levels, max deviation {deviation:.3e}")
    return 0 if deviation <= tol else 1


def cmd_husimi(cfg: RunConfig) -> int:
    spec = statistics_spec(cfg)
    cap = cfg.get("droplet", "N", int, required=False)
    if cap is None:
        raise ConfigError("missing required field [droplet] N")
    n_points = cfg.get("droplet", "points", int)
    dspec = droplet.DropletSpec(spec, N=cap)

    mu_hi = 2.0 * cap if cap > 0 else 4.0
    if spec.s == -1:
        mu_hi = min(mu_hi, 0.9 * spec.kappa)  # fermionic occupancy saturates
    mu_grid = np.linspace(0.0, mu_hi, n_points)
    rho_grid = np.array([droplet.rho_from_mean_occupation(spec, mu) for mu in mu_grid])
    profile = droplet.droplet_profile(dspec, rho_grid)
    write_csv(
        cfg,
        "husimi",
        ["rho", "mean_occupation", "value", "k", "N", "s", "r"],
        [
            [rho, mu, val, spec.k, float(cap), float(spec.s), float(spec.r)]
            for rho, mu, val in zip(profile.rho, profile.mean_occ, profile.value)
        ],
    )
    payload = {
        "command": cfg.command,
        "config_hash": cfg.config_hash,
        "N": cap,
        "value_at_origin": fmt(profile.value[0]),
    }
    step_feasible = cap > 0 and (spec.s == +1 or 1.5 * cap < 0.95 * spec.kappa)
    if step_feasible:
        step = droplet.step_profile_check(dspec)
        payload.update(
            {
                "crossing_mean_occupation": fmt(step.crossing_mu),
                "value_inside": fmt(step.value_inside),
                "value_mid": fmt(step.value_mid),
                "value_outside": fmt(step.value_outside),
                "transition_width_mean_occupation": fmt(step.width_mu),
                "transition_width_rho": fmt(step.width_rho),
                "sharp_step": step.passes(cap),
            }
        )
        print(
            f"husimi: crossing at mean occupation {step.crossing_mu:.4f} "
            f"(N = {cap}), width {step.width_mu:.4f}"
        )
    else:
        payload["sharp_step"] = None
        note = "vacuum droplet" if cap == 0 else "droplet too close to saturation for step diagnostics"
        payload["note"] = note
        print(f"husimi: profile written ({note})")
    write_json(cfg, "husimi", payload)
    return 0


def cmd_star_convergence(cfg: RunConfig) -> int:
    # the sweep carries its own family block: it rebuilds the spec at
    # every k and is usually run single-mode
    r = cfg.get("sweep", "r", int)
    s = cfg.get("sweep", "s", int)
    if s not in (-1, +1):
        raise ConfigError("[sweep] s must be +1 or -1")
    k_values = _parse_float_list(cfg.get("sweep", "k_values", str))
    if len(k_values) < 3:
        raise ConfigError("[sweep] k_values needs at least 3 entries")
    pair_name = cfg.get("sweep", "pair", str)
    pair = starprod.standard_pair(pair_name)
    sweep_n_max = cfg.get("sweep", "n_max", int)

    raw_points = cfg.get("sweep", "points", str, required=False)
    if raw_points is None:
        rng = np.random.default_rng(cfg.seed)
        scale = 0.45 if s == -1 else 0.3 / math.sqrt(r)
        points = [
            scale * (rng.uniform(-1, 1, r) + 1j * rng.uniform(-1, 1, r))
            for _ in range(3)
        ]
    else:
        points = [np.array(grp) for grp in _parse_complex_groups(raw_points)]
        if any(p.shape != (r,) for p in points):
            raise ConfigError(f"[sweep] points must each have {r} components")

    def build_spec(k):
        if s == -1:
            return algebra.StatisticsSpec(r=r, s=-1, k=int(k))
        return algebra.StatisticsSpec(r=r, s=+1, k=float(k), n_max=sweep_n_max)

    error_floor = cfg.get("sweep", "error_floor", float)
    try:
        study = starprod.convergence_study(
            k_values, build_spec, pair, points, error_floor=error_floor
        )
    except FitError as exc:
        print(f"star-convergence: {exc}", file=sys.stderr)
        return 1

    write_csv(
        cfg,
        "star_convergence",
        ["k", "err_star_first_order", "err_moyal_bracket"],
        [
            [k, e50, e52]
            for k, e50, e52 in zip(study.k_values, study.star_errors, study.bracket_errors)
        ],
    )

    def fit_payload(fit):
        if fit.degenerate:
            return {"degenerate": True}
        return {
            "degenerate": False,
            "slope": fmt(fit.slope),
            "intercept": fmt(fit.intercept),
            "residual": fmt(fit.residual),
            "points_used": fit.n_used,
        }

    payload = {
        "command": cfg.command,
        "config_hash": cfg.config_hash,
        "pair": pair_name,
        "star_fit": fit_payload(study.star_fit),
        "bracket_fit": fit_payload(study.bracket_fit),
    }
    write_json(cfg, "star_convergence", payload)

    for label, fit in (("star", study.star_fit), ("bracket", study.bracket_fit)):
        if fit.degenerate:
            print(f"star-convergence: {label} errors at round-off; degenerate fit")
        else:
            note = ""
            if not SLOPE_BAND[0] <= fit.slope <= SLOPE_BAND[1]:
                note = f"  WARNING: slope outside [{SLOPE_BAND[0]}, {SLOPE_BAND[1]}]"
                print(f"warning: {label} slope {fit.slope:.3f} outside the expected band", file=sys.stderr)
            print(f"star-convergence: {label} slope {fit.slope:.3f}{note}")
    return 0


def cmd_edge_sim(cfg: RunConfig) -> int:
    velocities = _parse_float_list(cfg.get("edge", "velocities", str))
    r = len(velocities)
    winding = _parse_float_list(cfg.get("edge", "winding", str))
    zero_mode = _parse_float_list(cfg.get("edge", "zero_mode", str))
    amp_groups = _parse_complex_groups(cfg.get("edge", "amplitudes", str))
    if len(winding) != r or len(zero_mode) != r or len(amp_groups) != r:
        raise ConfigError(
            "[edge] velocities, winding, zero_mode and amplitudes must describe the same component count"
        )
    n_modes = max(len(g) for g in amp_groups)
    amps = np.zeros((r, n_modes), dtype=complex)
    for i, grp in enumerate(amp_groups):
        amps[i, : len(grp)] = grp
    corrupted = cfg.get("edge", "corrupted", _parse_bool)
    field = edge.EdgeField(
        velocities=tuple(velocities),
        winding=tuple(winding),
        zero_mode=tuple(zero_mode),
        amplitudes=amps,
        drift_scale=0.5 if corrupted else 1.0,
    )

    n_theta = cfg.get("edge", "n_theta", int)
    n_time = cfg.get("edge", "n_time", int)
    periods = cfg.get("edge", "periods", float)
    window = 2.0 * math.pi * periods
    times = np.arange(n_time) * (window / n_time)
    axes = [np.arange(n_theta) * (2.0 * math.pi / n_theta)] * r

    eom = edge.eom_residual(field, n_theta=n_theta, times=times[:: max(1, n_time // 8)])
    period_res = edge.periodicity_residual(field, times=times[:: max(1, n_time // 8)])
    samples = edge.sample_field(field, axes, times)

    if all(w == 0.0 for w in winding):
        action = edge.action_value(samples, velocities, times)
    else:
        action = None  # winding histories are not torus-periodic samples

    modes = cfg.get("edge", "algebra_modes", int)
    level = cfg.get("edge", "algebra_level", int)
    zero_dim = cfg.get("edge", "algebra_zero_dim", int)
    mode_algebra = edge.build_mode_algebra(r, modes, level, zero_dim=zero_dim)
    comm_res = edge.mode_commutator_residual(mode_algebra)

    header = ["t"] + [f"theta_{i + 1}" for i in range(r)] + ["phi"]
    rows = []
    mesh = np.meshgrid(*axes, indexing="ij")
    flat_axes = [m.ravel() for m in mesh]
    for it, t in enumerate(times):
        flat_phi = samples[it].ravel()
        for idx in range(flat_phi.size):
            rows.append([t] + [ax[idx] for ax in flat_axes] + [flat_phi[idx]])
    write_csv(cfg, "edge_sim", header, rows)

    tol_eom = cfg.get("tolerances", "eom", float)
    tol_period = cfg.get("tolerances", "periodicity", float)
    tol_action = cfg.get("tolerances", "action", float)
    payload = {
        "command": cfg.command,
        "config_hash": cfg.config_hash,
        "eom_residual": fmt(eom),
        "periodicity_residual": fmt(period_res),
        "action_value": None if action is None else fmt(action),
        "mode_commutator_residual": fmt(comm_res),
        "corrupted": corrupted,
        "hilbert_dimensions": list(edge.hilbert_dimensions(mode_algebra).per_factor),
    }
    write_json(cfg, "edge_sim", payload)

    if corrupted:
        print(
            f"warning: corrupted drift requested; eom residual {eom:.3e} is a diagnostic",
            file=sys.stderr,
        )
        print(f"edge-sim: corrupted field, eom residual {eom:.3e}")
        return 0
    print(
        f"edge-sim: eom {eom:.3e}, periodicity {period_res:.3e}, "
        f"action {'n/a' if action is None else f'{action:.3e}'}, "
        f"mode commutators {comm_res:.3e}"
    )
    ok = eom <= tol_eom and period_res <= tol_period and comm_res <= 1e-12
    if action is not None:
        ok = ok and abs(action) <= tol_action
    return 0 if ok else 1


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "husimi": cmd_husimi,
    "star-convergence": cmd_star_convergence,
    "edge-sim": cmd_edge_sim,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arstat",
        description="Generalized A_r statistics toolkit: verification suites and sweeps",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("--out", help=f"output directory (default ${ENV_OUT_DIR} or ./arstat_out)")
    parser.add_argument("--format", default="csv,json", help="comma list of csv,json")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for check suites")
    parser.add_argument("--seed", type=int, default=0, help="seed for random test points")
    parser.add_argument(
        "--set",
        action="append",
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable; wins over the file)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, SizeError, TruncationError) as exc:
        # an undersized truncation cannot certify its tails: fix the config
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArstatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
