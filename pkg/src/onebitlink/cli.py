"""Batch front-end: sweeps over (rho, delta_n, l_u, l_d) with CSV output.

Configuration comes from a flat key=value file plus command-line overrides
(flags win). Every grid point gets its own derived seed and is re-runnable
from the CSV row alone; a manifest records the config hash and seed.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .config import LinkConfig
from .errors import ConfigError, OneBitLinkError
from .filters import RrcSpec, design_rrc
from .linksim import required_snr_search, run_chain, transmit_waveform
from .spectrum import fractional_bandwidth, welch_psd, write_psd_csv

MODES = ("required_snr", "ber_curve", "psd", "impulse_response")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_IO = 3

_CSV_COLUMNS = {
    "required_snr": ["rho", "delta_n", "l_u", "l_d", "required_snr_db",
                     "n_symbols", "n_errors", "seed", "error"],
    "ber_curve": ["rho", "delta_n", "l_u", "l_d", "snr_db", "ber",
                  "n_symbols", "n_errors", "seed", "error"],
    "psd": ["rho", "delta_n", "l_u", "l_d", "b_0_9375", "total_power",
            "n_symbols", "n_errors", "seed", "error"],
    "impulse_response": ["rho", "delta_n", "l_u", "l_d", "n_taps", "peak_tap",
                         "n_symbols", "n_errors", "seed", "error"],
}


@dataclass(frozen=True)
class SweepSpec:
    mode: str
    rho_list: tuple
    delta_n_list: tuple
    l_u_list: tuple
    l_d_list: tuple
    target_ber: float = 1e-3
    tol_db: float = 0.1
    snr_db_list: tuple = ()
    n_symbols: int = 200_000
    psd_n_symbols: int = 1 << 17
    segment_len: int = 1024
    L_ps: int = 128
    L_eq: int = 64
    R: int = 16
    sigma_s2: float = 1.0
    alpha: float = 1.0
    quantize_tx: bool = True
    quantize_rx: bool = True
    arcsine_mode: str = "exact"
    seed: int = 0
    output_dir: str = "out"
    jobs: int = 1
    emit_plots: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("rho_list", "delta_n_list", "l_u_list", "l_d_list"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if self.mode == "ber_curve" and not self.snr_db_list:
            raise ConfigError("ber_curve mode needs snr_db_list")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def grid(self):
        """Grid points in deterministic order with their point configs."""
        points = []
        index = 0
        for rho in self.rho_list:
            for delta_n in self.delta_n_list:
                for l_u in self.l_u_list:
                    for l_d in self.l_d_list:
                        cfg = LinkConfig(
                            rho=rho,
                            delta_n=delta_n,
                            l_u=l_u,
                            l_d=l_d,
                            L_ps=self.L_ps,
                            L_eq=self.L_eq,
                            R=self.R,
                            sigma_s2=self.sigma_s2,
                            alpha=self.alpha,
                            quantize_tx=self.quantize_tx,
                            quantize_rx=self.quantize_rx,
                            arcsine_mode=self.arcsine_mode,
                            seed=_point_seed(self.seed, index),
                            n_symbols=self.n_symbols,
                        )
                        points.append((index, cfg))
                        index += 1
        return points

    def semantic_dict(self) -> dict:
        """Fields that affect results (not where/how they are written)."""
        skip = {"output_dir", "jobs", "emit_plots"}
        out = {}
        for f in fields(self):
            if f.name in skip:
                continue
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _point_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _run_point(spec: SweepSpec, index: int, cfg: LinkConfig):
    """Rows for one grid point; failures land in the error column."""
    base = {"rho": cfg.rho, "delta_n": cfg.delta_n, "l_u": cfg.l_u, "l_d": cfg.l_d,
            "seed": cfg.seed, "error": ""}
    out_dir = Path(spec.output_dir)
    try:
        if spec.mode == "required_snr":
            result = required_snr_search(cfg, spec.target_ber, spec.tol_db)
            return [{**base, "required_snr_db": result.snr_db,
                     "n_symbols": result.total_symbols,
                     "n_errors": result.total_errors}]
        if spec.mode == "ber_curve":
            rows = []
            for snr_db in spec.snr_db_list:
                res = run_chain(cfg, snr_db)
                rows.append({**base, "snr_db": snr_db, "ber": res.ber,
                             "n_symbols": res.n_bits // 2,
                             "n_errors": res.n_bit_errors})
            return rows
        if spec.mode == "psd":
            wave = transmit_waveform(cfg, spec.psd_n_symbols)
            est = welch_psd(wave, spec.segment_len)
            write_psd_csv(est, out_dir / f"psd_point{index:03d}.csv")
            return [{**base, "b_0_9375": fractional_bandwidth(est),
                     "total_power": est.total_power,
                     "n_symbols": spec.psd_n_symbols, "n_errors": 0}]
        taps = design_rrc(RrcSpec(cfg.rho, cfg.delta_n, cfg.l_u, cfg.L_ps)).taps
        with open(out_dir / f"taps_point{index:03d}.csv", "w", newline="") as fh:
            fh.write("n,tap\n")
            for n, tap in enumerate(taps):
                fh.write(f"{n},{_fmt(float(tap))}\n")
        return [{**base, "n_taps": len(taps), "peak_tap": float(np.abs(taps).max()),
                 "n_symbols": 0, "n_errors": 0}]
    except (OneBitLinkError, np.linalg.LinAlgError) as exc:
        metric_cols = [c for c in _CSV_COLUMNS[spec.mode]
                       if c not in base and c not in ("n_symbols", "n_errors")]
        row = {**base, "n_symbols": 0, "n_errors": 0,
               "error": f"{type(exc).__name__}: {exc}"}
        for col in metric_cols:
            row[col] = math.nan
        return [row]


def _write_rows(spec: SweepSpec, rows) -> None:
    columns = _CSV_COLUMNS[spec.mode]
    path = Path(spec.output_dir) / "sweep.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])


def _write_manifest(spec: SweepSpec, n_points: int) -> None:
    manifest = {
        "config_hash": spec.config_hash(),
        "seed": spec.seed,
        "version": __version__,
        "mode": spec.mode,
        "n_points": n_points,
    }
    path = Path(spec.output_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _write_plot_script(spec: SweepSpec) -> None:
    metric = {"required_snr": ("required_snr_db", 5), "ber_curve": ("ber", 6),
              "psd": ("b_0_9375", 5), "impulse_response": ("peak_tap", 6)}[spec.mode]
    name, col = metric
    lines = [
        "# gnuplot script for the sweep output",
        "set datafile separator ','",
        "set key outside",
        "set xlabel 'delta_n'",
        f"set ylabel '{name}'",
    ]
    plots = []
    for rho in spec.rho_list:
        for l_u in spec.l_u_list:
            for l_d in spec.l_d_list:
                cond = f"($1=={rho} && $3=={l_u} && $4=={l_d})"
                title = f"rho={rho} l_u={l_u} l_d={l_d}"
                plots.append(
                    f"'sweep.csv' skip 1 using ({cond} ? $2 : 1/0):{col} "
                    f"with linespoints title '{title}'"
                )
    lines.append("plot \\\n  " + ", \\\n  ".join(plots))
    (Path(spec.output_dir) / "plot_sweep.gp").write_text("\n".join(lines) + "\n")


def run_sweep(spec: SweepSpec) -> int:
    """Execute the grid; returns a process exit code."""
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = spec.grid()  # validates every grid point up front

    results = {}
    if spec.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            futures = {
                pool.submit(_run_point, spec, index, cfg): index
                for index, cfg in points
            }
            for future in concurrent.futures.as_completed(futures):
                results[futures[future]] = future.result()
    else:
        for index, cfg in points:
            results[index] = _run_point(spec, index, cfg)

    rows = [row for index, _ in points for row in results[index]]
    _write_rows(spec, rows)
    _write_manifest(spec, len(points))
    if spec.emit_plots:
        _write_plot_script(spec)

    failures = sum(1 for row in rows if row["error"])
    for row in rows:
        if row["error"]:
            print(f"point rho={row['rho']} delta_n={row['delta_n']} "
                  f"l_u={row['l_u']} l_d={row['l_d']}: {row['error']}",
                  file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


_BOOL_WORDS = {"on": True, "true": True, "yes": True, "1": True,
               "off": False, "false": False, "no": False, "0": False}

_LIST_KEYS = {"rho_list": float, "delta_n_list": float, "l_u_list": int,
              "l_d_list": int, "snr_db_list": float}
_SCALAR_KEYS = {"mode": str, "target_ber": float, "tol_db": float,
                "n_symbols": int, "psd_n_symbols": int, "segment_len": int,
                "L_ps": int, "L_eq": int, "R": int, "sigma_s2": float,
                "alpha": float, "quantize_tx": bool, "quantize_rx": bool,
                "arcsine_mode": str, "seed": int, "output_dir": str,
                "jobs": int, "emit_plots": bool}


def _parse_bool(raw: str) -> bool:
    try:
        return _BOOL_WORDS[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"not a boolean: {raw!r}") from None


def parse_config_file(path) -> dict:
    """Flat key = value file; '#' starts a comment; lists are comma-separated."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw_line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        try:
            if key in _LIST_KEYS:
                cast = _LIST_KEYS[key]
                values[key] = tuple(cast(tok.strip()) for tok in raw.split(",") if tok.strip())
            elif key in _SCALAR_KEYS:
                cast = _SCALAR_KEYS[key]
                values[key] = _parse_bool(raw) if cast is bool else cast(raw)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return values


def _spec_from_args(args) -> SweepSpec:
    values = parse_config_file(args.config) if args.config else {}
    if getattr(args, "mode", None):
        values["mode"] = args.mode
    for name in ("rho", "delta_n", "l_u", "l_d"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[f"{name}_list"] = tuple(flag)
    if getattr(args, "snr", None):
        values["snr_db_list"] = tuple(args.snr)
    for name in ("n_symbols", "L_ps", "L_eq", "seed", "jobs", "psd_n_symbols"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if args.out is not None:
        values["output_dir"] = args.out
    if getattr(args, "quantize_tx", None) is not None:
        values["quantize_tx"] = _parse_bool(args.quantize_tx)
    if getattr(args, "quantize_rx", None) is not None:
        values["quantize_rx"] = _parse_bool(args.quantize_rx)
    if getattr(args, "arcsine", None) is not None:
        values["arcsine_mode"] = args.arcsine
    if "mode" not in values:
        raise ConfigError("mode is required (config file key 'mode' or subcommand)")
    try:
        return SweepSpec(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _selftest() -> int:
    """Fast internal battery; one pass/fail line per check."""
    checks = []

    taps = design_rrc(RrcSpec(1.0, 0.5, 2, 128)).taps
    top = np.sort(np.abs(taps))[::-1]
    checks.append(("two-tap pulse degeneracy",
                   abs(top[0] - top[1]) < 1e-9 and top[2] < top[0] * 10 ** (-30 / 20)))

    from .quantstats import arcsine_cov_exact
    eye = np.eye(3, dtype=complex)
    checks.append(("arcsine law on identity", np.allclose(arcsine_cov_exact(eye), 2 * eye)))

    from .signals import ComplexSignal, downsample, upsample
    sig_in = ComplexSignal(np.arange(8) + 1j, 1.0)
    rt = downsample(upsample(sig_in, 4), 4)
    checks.append(("downsample of upsample is identity",
                   np.array_equal(rt.samples, sig_in.samples)))

    cfg = LinkConfig(rho=0.5, delta_n=0.0, l_u=2, l_d=2, n_symbols=4096, seed=5)
    a = run_chain(cfg, 10.0)
    b = run_chain(cfg, 10.0)
    checks.append(("seeded rerun is identical",
                   a.ber == b.ber and a.n_bit_errors == b.n_bit_errors))

    tone = ComplexSignal(np.exp(2j * np.pi * 0.25 * np.arange(8192)), 8.0)
    est = welch_psd(tone, 512)
    checks.append(("tone PSD satisfies Parseval", abs(est.total_power - 1.0) < 0.01))

    ok = True
    for name, passed in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}")
        ok = ok and passed
    return EXIT_OK if ok else EXIT_CONFIG


def _add_common_flags(parser, with_grid: bool) -> None:
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="base seed for the sweep")
    parser.add_argument("--jobs", type=int, help="parallel worker processes")
    parser.add_argument("--quantize-tx", dest="quantize_tx", choices=["on", "off"])
    parser.add_argument("--quantize-rx", dest="quantize_rx", choices=["on", "off"])
    parser.add_argument("--arcsine", choices=["exact", "linearized"])
    if with_grid:
        parser.add_argument("--rho", type=float, nargs="+")
        parser.add_argument("--delta-n", dest="delta_n", type=float, nargs="+")
        parser.add_argument("--l-u", dest="l_u", type=int, nargs="+")
        parser.add_argument("--l-d", dest="l_d", type=int, nargs="+")
        parser.add_argument("--n-symbols", dest="n_symbols", type=int)
        parser.add_argument("--l-ps", dest="L_ps", type=int)
        parser.add_argument("--l-eq", dest="L_eq", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onebitlink",
        description="1-bit transceiver link simulation sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the sweep described by a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--mode", choices=MODES)
    _add_common_flags(p_sweep, with_grid=True)

    p_ber = sub.add_parser("ber", help="BER at fixed SNR points for one grid")
    p_ber.add_argument("--config")
    p_ber.add_argument("--snr", type=float, nargs="+", required=True)
    _add_common_flags(p_ber, with_grid=True)

    p_psd = sub.add_parser("psd", help="transmit PSD and occupied bandwidth")
    p_psd.add_argument("--config")
    p_psd.add_argument("--psd-n-symbols", dest="psd_n_symbols", type=int)
    _add_common_flags(p_psd, with_grid=True)

    p_imp = sub.add_parser("impulse", help="pulse-shaper tap tables")
    p_imp.add_argument("--config")
    _add_common_flags(p_imp, with_grid=True)

    sub.add_parser("selftest", help="run a fast internal check battery")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return _selftest()
        if args.command != "sweep":
            forced = {"ber": "ber_curve", "psd": "psd", "impulse": "impulse_response"}
            args.mode = forced[args.command]
        return run_sweep(_spec_from_args(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
