"""Command-line front end.

Units at this boundary are eV, nm, V, rad/s, ohm and F.  Every run resolves
its parameters (defaults < ``--config`` file < flags), validates all of them,
computes, and only then writes output.  JSON reports carry the resolved
config under ``"config"`` and can be passed back through ``--config``.

Exit codes: 0 success, 2 validation, 3 numerical failure, 4 root not found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import closed_loop, open_barrier, quasistatic, specfun, tien_gordon
from .errors import DomainError, EvaluationError, RootNotFoundError, TunnelCircuitError
from .model import BarrierSpec, ev_to_joule, m_to_nm

log = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_ROOT = 0, 2, 3, 4
SPEED_OF_LIGHT = 299_792_458.0
OPTICAL_OMEGA = 1e14

# parameters that only steer where or how fast output is produced
_NOT_RECORDED = {"out", "config", "workers", "waveform_out", "profile", "subcommand_cli"}

# subcommand -> {name: (type, default)}; default ``...`` marks a required value
_PARAMS: dict[str, dict[str, tuple[str, object]]] = {
    "airy": {"x": ("float", ...)},
    "bessel": {"alpha": ("float", ...), "nmax": ("int", None)},
    "open-barrier": {
        "phi": ("float", ...),
        "u0": ("float", ...),
        "a": ("float", ...),
        "energy": ("float", ...),
    },
    "closed-loop": {
        "phi": ("float", ...),
        "u0": ("float", ...),
        "a": ("float", ...),
        "n": ("ints", ...),
        "bracket": ("pair", ...),
        "scan": ("int", closed_loop.SCAN_POINTS),
        "residual": ("str", "transfer"),
    },
    "tien-gordon": {
        "v1": ("float", ...),
        "omega": ("float", ...),
        "nmax": ("int", None),
        "beta": ("float", 0.7),
    },
    "quasistatic": {
        "phi": ("float", ...),
        "u0": ("float", ...),
        "a": ("float", ...),
        "energy": ("float", ...),
        "u1": ("float", ...),
        "omega": ("float", ...),
        "tone": ("tones", []),
        "periods": ("int", 1),
        "samples": ("int", 64),
        "rload": ("float", None),
        "cshunt": ("float", 0.0),
        "clamp": ("bool", False),
    },
}

_SWEEPABLE = {
    "airy": {"x"},
    "open-barrier": {"energy", "u0", "phi", "a"},
    "tien-gordon": {"v1", "omega"},
    "quasistatic": {"u1", "omega", "energy", "u0"},
}
_SWEEP_ALIASES = {"E": "energy", "U0": "u0", "U1": "u1", "V1": "v1"}


# ---------------------------------------------------------------------------
# parsing and resolution


def _parse_pair(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        vals = [float(v) for v in str(text).split(":")]
    if len(vals) != 2:
        raise DomainError(f"expected LO:HI, got {text!r}")
    return vals


def _parse_ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        items = list(text)
    elif isinstance(text, int):
        items = [text]
    else:
        items = str(text).split(",")
    out = []
    for item in items:
        value = float(item)
        if value != int(value):
            raise DomainError(f"expected an integer, got {item!r}")
        out.append(int(value))
    return out


def _parse_tones(items) -> list[list[float]]:
    out = []
    for item in items or []:
        out.append(_parse_pair(item))
    return out


def _coerce(kind: str, value, name: str):
    if value is None:
        return None
    try:
        if kind == "float":
            v = float(value)
            if not math.isfinite(v):
                raise DomainError(f"--{name} must be finite, got {value!r}")
            return v
        if kind == "int":
            v = float(value)
            if v != int(v):
                raise DomainError(f"--{name} must be an integer, got {value!r}")
            return int(v)
        if kind == "ints":
            return _parse_ints(value)
        if kind == "pair":
            return _parse_pair(value)
        if kind == "tones":
            return _parse_tones(value)
        if kind == "bool":
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes")
            return bool(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"--{name}: cannot read {value!r} ({exc})") from exc


def _parse_sweep(text) -> dict | None:
    if text is None:
        return None
    if isinstance(text, dict):
        name, start, stop, steps = text["name"], text["start"], text["stop"], text["steps"]
    else:
        parts = str(text).split(":")
        if len(parts) != 4:
            raise DomainError(f"--sweep expects NAME:START:STOP:STEPS, got {text!r}")
        name, start, stop, steps = parts
    try:
        start, stop, steps_f = float(start), float(stop), float(steps)
    except ValueError as exc:
        raise DomainError(f"--sweep: {exc}") from exc
    if steps_f != int(steps_f) or steps_f < 1:
        raise DomainError(f"--sweep steps must be a positive integer, got {steps!r}")
    return {"name": _SWEEP_ALIASES.get(name, name), "start": start, "stop": stop, "steps": int(steps_f)}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with parameters (a previous JSON report also works)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--sweep", help="NAME:START:STOP:STEPS, inclusive linear grid")
    p.add_argument("--workers", type=int, default=None, help="threads for sweep points or samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunnelcircuit", description="Tunneling junction and closed-circuit solvers")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("airy", help="Ai, Ai', Bi, Bi' at x")
    p.add_argument("--x")
    _add_common(p)

    p = sub.add_parser("bessel", help="J_n(alpha) for 0 <= n <= nmax")
    p.add_argument("--alpha")
    p.add_argument("--nmax")
    _add_common(p)

    def barrier_flags(q, energy=True):
        q.add_argument("--phi", help="work function, eV")
        q.add_argument("--u0", help="bias drop across the barrier, eV")
        q.add_argument("--a", help="barrier length, nm")
        if energy:
            q.add_argument("--energy", help="electron energy, eV")

    p = sub.add_parser("open-barrier", help="transmission through the linear barrier")
    barrier_flags(p)
    _add_common(p)

    p = sub.add_parser("closed-loop", help="energy eigenvalues of the closed circuit")
    barrier_flags(p, energy=False)
    p.add_argument("--n", help="mode index, or comma-separated list")
    p.add_argument("--bracket", help="E_MIN:E_MAX in eV")
    p.add_argument("--scan", help="coarse-scan points (default 512)")
    p.add_argument("--residual", choices=("transfer", "three_product"))
    p.add_argument("--profile", help="CSV path for psi and J along the loop (lowest root of each n)")
    _add_common(p)

    p = sub.add_parser("tien-gordon", help="sideband amplitudes and identity error")
    p.add_argument("--v1", help="drive amplitude, V")
    p.add_argument("--omega", help="drive frequency, rad/s")
    p.add_argument("--nmax")
    p.add_argument("--beta", help="phase for the identity check (default 0.7)")
    _add_common(p)

    p = sub.add_parser("quasistatic", help="driven current waveform and spectrum")
    barrier_flags(p)
    p.add_argument("--u1", help="tone amplitude, eV")
    p.add_argument("--omega", help="tone frequency, rad/s")
    p.add_argument("--tone", action="append", help="extra tone AMP_EV:OMEGA (repeatable)")
    p.add_argument("--periods")
    p.add_argument("--samples", help="samples per common period")
    p.add_argument("--rload", help="load resistance, ohm")
    p.add_argument("--cshunt", help="shunt capacitance, F")
    p.add_argument("--clamp", action="store_const", const=True, default=None)
    p.add_argument("--waveform-out", help="CSV path for the (t, U, J) waveform")
    _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < flags, coerced and checked for completeness."""
    name = args.subcommand
    table = _PARAMS[name]
    cfg: dict = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"--config {args.config}: {exc}") from exc
        if isinstance(loaded, dict) and isinstance(loaded.get("config"), dict):
            loaded = loaded["config"]
        if not isinstance(loaded, dict):
            raise DomainError("--config must hold a JSON object")
        if loaded.get("subcommand", name) != name:
            raise DomainError(f"config is for {loaded['subcommand']!r}, not {name!r}")
        unknown = set(loaded) - set(table) - {"subcommand", "sweep", "format"}
        if unknown:
            raise DomainError(f"unknown config keys for {name}: {sorted(unknown)}")
        cfg.update(loaded)
    flags = vars(args)
    for key in list(table) + ["sweep", "format"]:
        if flags.get(key) is not None:
            cfg[key] = flags[key]

    sweep = _parse_sweep(cfg.get("sweep"))
    if sweep is not None:
        allowed = _SWEEPABLE.get(name, set())
        if sweep["name"] not in allowed:
            raise DomainError(f"{name} cannot sweep {sweep['name']!r}; choose from {sorted(allowed) or 'nothing'}")
    out = {"subcommand": name, "sweep": sweep}
    for key, (kind, default) in table.items():
        if key in cfg and cfg[key] is not None:
            out[key] = _coerce(kind, cfg[key], key)
        elif sweep is not None and sweep["name"] == key:
            out[key] = None
        elif default is ...:
            raise DomainError(f"{name}: missing required --{key}")
        else:
            out[key] = default
    fmt = cfg.get("format")
    if fmt is None and getattr(args, "out", None):
        suffix = Path(args.out).suffix.lower().lstrip(".")
        fmt = suffix if suffix in ("csv", "json") else None
    if fmt is None:
        fmt = "csv" if sweep is not None else "json"
    if fmt not in ("csv", "json"):
        raise DomainError(f"--format must be csv or json, got {fmt!r}")
    out["format"] = fmt
    return out


# ---------------------------------------------------------------------------
# per-subcommand work


def _barrier(cfg: dict) -> BarrierSpec:
    return BarrierSpec.from_ev(cfg["phi"], cfg["u0"], cfg["a"], cfg["energy"])


def _airy_row(cfg):
    x = cfg["x"]
    upper = specfun.AIRY_MAX_X
    if not (specfun.AIRY_MIN_X <= x <= upper):
        raise DomainError(f"x={x!r} outside [{specfun.AIRY_MIN_X}, {upper}]")
    return cfg, lambda: _airy_values(x)


def _airy_values(x):
    f = specfun.airy_all(x)
    return {"x": x, "Ai": f.ai, "Ai_prime": f.ai_prime, "Bi": f.bi, "Bi_prime": f.bi_prime}


def _open_barrier_row(cfg):
    spec = _barrier(cfg)

    def run():
        sol = open_barrier.solve_open_barrier(spec)
        j = open_barrier.static_current_density(spec)
        return {
            "E_eV": cfg["energy"],
            "TT": sol.transmission,
            "Re_R": sol.r.real,
            "Im_R": sol.r.imag,
            "Re_T": sol.t.real,
            "Im_T": sol.t.imag,
            "J": j,
        }

    return cfg, run


def _tien_gordon_row(cfg):
    alpha = tien_gordon.modulation_index(cfg["v1"], cfg["omega"])
    n_max = cfg["nmax"] if cfg["nmax"] is not None else math.ceil(abs(alpha)) + tien_gordon.TRUNCATION_MARGIN
    if n_max > specfun.BESSEL_MAX_ORDER or n_max < 1:
        raise DomainError(f"nmax={n_max} outside [1, {specfun.BESSEL_MAX_ORDER}] (alpha={alpha:.6g})")

    def run():
        bands = tien_gordon.sideband_amplitudes(cfg["v1"], cfg["omega"], n_max)
        return {
            "v1": cfg["v1"],
            "omega": cfg["omega"],
            "alpha": bands.alpha,
            "n_max": n_max,
            "power_sum": bands.power_sum(),
            "identity_error": tien_gordon.identity_check(bands.alpha, cfg["beta"], n_max),
        }

    return cfg, run


def _drive(cfg) -> quasistatic.DriveSpec:
    tones = [(ev_to_joule(cfg["u1"]), cfg["omega"])]
    tones += [(ev_to_joule(amp), w) for amp, w in cfg["tone"]]
    return quasistatic.DriveSpec(ev_to_joule(cfg["u0"]), tuple(tones), cfg["samples"], cfg["periods"])


def _quasistatic_prepare(cfg):
    spec = _barrier(cfg)
    drive = _drive(cfg)
    if cfg["rload"] is not None and not cfg["rload"] > 0:
        raise DomainError(f"--rload must be > 0, got {cfg['rload']!r}")
    if not cfg["cshunt"] >= 0:
        raise DomainError(f"--cshunt must be >= 0, got {cfg['cshunt']!r}")
    if not cfg["clamp"]:
        # reject before any solver call
        lo, hi = 2.0 * spec.margin, spec.phi - spec.energy - 2.0 * spec.margin
        for k in range(drive.sample_count):
            u = drive.potential(k * drive.dt)
            if not (lo <= u <= hi):
                raise DomainError(
                    f"bias leaves the tunneling regime at t={k * drive.dt!r} s: U={u / ev_to_joule(1.0)!r} eV"
                )
    return spec, drive


def _quasistatic_compute(cfg, workers=None):
    spec, drive = _quasistatic_prepare(cfg)
    wave = quasistatic.quasistatic_waveform(spec, drive, clamp=cfg["clamp"], workers=workers)
    spec_out = quasistatic.harmonic_spectrum(wave)
    if cfg["rload"] is not None:
        spec_out = quasistatic.rc_load_division(spec_out, cfg["rload"], cfg["cshunt"])
    return spec, drive, wave, spec_out


def _quasistatic_row(cfg):
    _quasistatic_prepare(cfg)

    def run():
        _, drive, wave, sp = _quasistatic_compute(cfg)
        w = cfg["omega"]
        return {
            "u1_eV": cfg["u1"],
            "omega": w,
            "E_eV": cfg["energy"],
            "U0_eV": cfg["u0"],
            "mean_J": float(np.mean(wave.j)),
            "abs_1w": sp.magnitude(w),
            "abs_2w": sp.magnitude(2 * w),
            "abs_3w": sp.magnitude(3 * w),
        }

    return cfg, run


_ROW_BUILDERS = {
    "airy": _airy_row,
    "open-barrier": _open_barrier_row,
    "tien-gordon": _tien_gordon_row,
    "quasistatic": _quasistatic_row,
}


def _sweep(cfg: dict, workers: int | None):
    sw = cfg["sweep"]
    values = np.linspace(sw["start"], sw["stop"], sw["steps"])
    jobs = []
    for v in values:
        point = dict(cfg)
        point[sw["name"]] = float(v)
        jobs.append(_ROW_BUILDERS[cfg["subcommand"]](point)[1])
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda job: job(), jobs))
    else:
        rows = [job() for job in jobs]
    if cfg["subcommand"] == "open-barrier" and sw["name"] != "energy":
        rows = [{sw["name"]: float(v), **r} for v, r in zip(values, rows)]
    return rows


def _single(cfg: dict, workers: int | None, args) -> tuple[list[dict], dict]:
    """Rows for CSV and a payload for JSON."""
    name = cfg["subcommand"]
    if name == "airy":
        row = _airy_row(cfg)[1]()
        return [row], {"result": row}
    if name == "open-barrier":
        spec = _barrier(cfg)
        row = _open_barrier_row(cfg)[1]()
        sol = open_barrier.solve_open_barrier(spec)
        extra = {
            "reflection": sol.reflection,
            "flux_defect": abs(sol.k1 * (1 - sol.reflection) - sol.k3 * sol.transmission) / sol.k1,
            "C1": [sol.c1.real, sol.c1.imag],
            "C2": [sol.c2.real, sol.c2.imag],
        }
        return [row], {"result": {**row, **extra}}
    if name == "bessel":
        alpha = cfg["alpha"]
        n_max = cfg["nmax"] if cfg["nmax"] is not None else math.ceil(abs(alpha)) + tien_gordon.TRUNCATION_MARGIN
        values = specfun.bessel_jn_sequence(n_max, alpha)
        rows = [{"n": n, "Jn": v} for n, v in enumerate(values)]
        norm = values[0] ** 2 + 2 * math.fsum(v * v for v in values[1:])
        return rows, {"alpha": alpha, "n_max": n_max, "values": values, "normalization": norm}
    if name == "tien-gordon":
        summary = _tien_gordon_row(cfg)[1]()
        bands = tien_gordon.sideband_amplitudes(cfg["v1"], cfg["omega"], summary["n_max"])
        rows = [{"n": n, "Jn": v, "Jn2": v * v} for n, v in bands.amplitudes]
        return rows, {**summary, "sidebands": [[n, v] for n, v in bands.amplitudes]}
    if name == "quasistatic":
        spec, drive, wave, sp = _quasistatic_compute(cfg, workers)
        if cfg["omega"] >= OPTICAL_OMEGA:
            ratio = spec.a / (2 * math.pi * SPEED_OF_LIGHT / cfg["omega"])
            print(f"junction length / drive wavelength = {ratio:.3e}", file=sys.stderr)
        if args.waveform_out:
            _deferred_files[args.waveform_out] = _to_csv(
                [{"t": t, "U_eV": u / ev_to_joule(1.0), "J": j} for t, u, j in zip(wave.t, wave.u, wave.j)]
            )
        freqs, amps = sp.one_sided()
        rows = [{"omega": w, "abs_amplitude": abs(x), "phase": math.atan2(x.imag, x.real)} for w, x in zip(freqs, amps)]
        payload = {
            "fundamental": drive.fundamental,
            "resolution": sp.resolution,
            "mean_J": float(np.mean(wave.j)),
            "clamped_samples": list(wave.clamped),
            "bins": [[r["omega"], r["abs_amplitude"], r["phase"]] for r in rows],
        }
        return rows, payload
    if name == "closed-loop":
        return _closed_loop(cfg, workers, args)
    raise DomainError(f"unknown subcommand {name!r}")


def _closed_loop(cfg, workers, args):
    lo, hi = cfg["bracket"]
    phi, u0, a = cfg["phi"], cfg["u0"], cfg["a"]
    # surface bad inputs as validation errors before searching
    BarrierSpec.from_ev(phi, u0, a, lo)
    BarrierSpec.from_ev(phi, u0, a, hi)
    if not lo < hi:
        raise DomainError(f"bracket must have E_MIN < E_MAX, got {cfg['bracket']!r}")
    modes = cfg["n"]
    for n in modes:
        if n < 1:
            raise DomainError(f"mode index n must be >= 1, got {n}")
    if cfg["residual"] not in ("transfer", "three_product"):
        raise DomainError(f"--residual must be transfer or three_product, got {cfg['residual']!r}")
    if cfg["scan"] < 2:
        raise DomainError("--scan must be >= 2")

    def search(n):
        return closed_loop.find_energy_eigenvalue(
            phi, u0, a, n, (lo, hi), scan_points=cfg["scan"], residual=cfg["residual"]
        )

    if workers and workers > 1 and len(modes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(search, modes))
    else:
        found = [search(n) for n in modes]
    sols = [s for group in found for s in group]
    notes = closed_loop.check_mode_ordering({g[0].n: g[0].energy_ev for g in found})
    if args.profile:
        prof_rows = []
        for group in found:
            s = group[0]
            prof = closed_loop.loop_current_density(s.spec, s.coefficients)
            for x, region, j in zip(prof.x, prof.region, prof.j):
                w = closed_loop.wavefunction_closed(s.spec, s.coefficients, float(x), int(region))
                prof_rows.append(
                    {
                        "n": s.n,
                        "region": int(region),
                        "x_nm": m_to_nm(float(x)),
                        "Re_psi": w.psi.real,
                        "Im_psi": w.psi.imag,
                        "J": float(j),
                    }
                )
        _deferred_files[args.profile] = _to_csv(prof_rows)
    rows = [
        {
            "n": s.n,
            "energy_ev": s.energy_ev,
            "s_nm": s.s_nm,
            "residual": s.residual,
            "continuity_defect": s.continuity_defect,
            "three_product_residual": s.three_product_residual,
        }
        for s in sols
    ]
    payload = {"solutions": [s.to_dict() for s in sols], "ordering_notes": notes}
    if len(sols) >= 1:
        payload.update({k: v for k, v in sols[0].to_dict().items()})
    return rows, payload


# ---------------------------------------------------------------------------
# output


_deferred_files: dict[str, str] = {}


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(r[k]) for k in header])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _to_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def run(args: argparse.Namespace) -> tuple[int, str]:
    cfg = resolve_config(args)
    workers = args.workers
    if workers is not None and workers < 1:
        raise DomainError(f"--workers must be >= 1, got {workers}")
    _deferred_files.clear()
    if cfg["sweep"] is not None:
        sw = cfg["sweep"]
        # validate every point before computing any of them
        for v in np.linspace(sw["start"], sw["stop"], sw["steps"]):
            point = dict(cfg)
            point[sw["name"]] = float(v)
            _ROW_BUILDERS[cfg["subcommand"]](point)
        rows = _sweep(cfg, workers)
        payload = {"rows": rows}
    else:
        rows, payload = _single(cfg, workers, args)
    recorded = {k: v for k, v in cfg.items() if k not in _NOT_RECORDED}
    if cfg["format"] == "csv":
        return EXIT_OK, _to_csv(rows)
    return EXIT_OK, _to_json({"config": recorded, **payload})


def _origin(exc: BaseException) -> str:
    frames = traceback.extract_tb(exc.__traceback__)
    if not frames:
        return "unknown"
    last = frames[-1]
    return f"{Path(last.filename).stem}.{last.name} line {last.lineno}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        code, text = run(args)
    except RootNotFoundError as exc:
        print(f"root not found: {exc}", file=sys.stderr)
        return EXIT_ROOT
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EvaluationError as exc:
        print(f"numerical failure in {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TunnelCircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path, content in _deferred_files.items():
        Path(path).write_text(content)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
