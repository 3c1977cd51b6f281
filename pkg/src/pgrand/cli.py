"""Command-line runner: ``python -m pgrand <command> [flags]``.

Every command writes CSV (or a LUT file) plus a ``.manifest.json`` next to it.
CSV files start with ``#`` comment lines recording the command, the resolved
parameters and their hash, so identical runs give byte-identical output.

Parameters come from three layers, later ones winning: built-in defaults, a
YAML file given with ``--config``, and explicit flags. The default output
directory is taken from ``$PGRAND_OUT_DIR`` (else ``./results``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import inspect
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from . import experiments as ex
from .analytic import PurificationUnattainable
from .clifford import build_parity_check, default_gate_count, sample_random_encoder
from .decoder import DEFAULT_MEM_BUDGET, ResourceLimitError, build_table, table_fingerprint

log = logging.getLogger("pgrand")

OUT_ENV = "PGRAND_OUT_DIR"
COMMANDS = ("build-lut", "simulate", "analytic", "hashing", "compare", "mb-range", "tables")

# flag name -> keyword names it may fill, in preference order
_PARAM_ALIASES = {
    "n": ("n", "ns", "sizes"),
    "k": ("k", "ks"),
    "t": ("t", "ts"),
    "p": ("p",),
    "q": ("qs",),
    "F": ("F", "fidelities", "F_grid"),
    "delta": ("delta",),
    "rounds": ("rounds",),
    "gates": ("gates",),
    "trials": ("trials",),
    "seed": ("seed",),
    "workers": ("workers",),
    "encoders": ("encoders",),
    "criterion": ("criterion",),
}
# keyword names that take a sequence rather than a scalar
_LIST_PARAMS = {"ns", "sizes", "ks", "ts", "qs", "fidelities", "F_grid", "rounds"}
_INT_KEYS = {"n", "k", "t", "gates", "trials", "seed", "workers", "encoders", "rounds", "mem_budget", "which"}
_STR_KEYS = {"fig", "criterion", "checkpoint_dir"}


class PreconditionError(ValueError):
    """Raised for user input that violates a documented precondition."""


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: Path | None = None

    def canonical(self) -> str:
        return json.dumps({"command": self.command, "params": self.params}, sort_keys=True, default=str)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# parsing


def _parse_value(key: str, raw):
    if isinstance(raw, (list, tuple)):
        return [_parse_value(key, r) for r in raw]
    if key in _STR_KEYS:
        return str(raw)
    if isinstance(raw, str) and "," in raw:
        return [_parse_value(key, r) for r in raw.split(",") if r.strip()]
    if isinstance(raw, str):
        raw = raw.strip()
        if key in _INT_KEYS:
            return int(raw)
        try:
            return float(raw)
        except ValueError:
            return raw
    return raw


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as e:
        raise PreconditionError(f"cannot read config file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise PreconditionError(f"config file {path} must hold a mapping at top level")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgrand",
        description="Noise-guessing entanglement purification: lookup tables, simulation and models.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"pgrand {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="YAML file of parameters (flags override it)")
        p.add_argument("--out", help=f"output path; defaults under ${OUT_ENV} or ./results")
        p.add_argument("--n", help="pair count (comma list where the command sweeps)")
        p.add_argument("--k", help="kept pairs (comma list allowed)")
        p.add_argument("--t", help="maximum corrected weight (comma list allowed)")
        p.add_argument("--p", help="depolarizing probability of the pairs")
        p.add_argument("--q", help="depolarizing probability of resource-state qubits")
        p.add_argument("--F", help="input fidelity (comma list allowed)")
        p.add_argument("--delta", help="typical-set slack")
        p.add_argument("--rounds", help="recurrence rounds (comma list allowed)")
        p.add_argument("--gates", help="encoder gate count (default 0.14 n log2(n)^2)")
        p.add_argument("--trials", help="total Monte Carlo trials, split across encoders")
        p.add_argument("--encoders", help="independent encoder draws")
        p.add_argument("--seed", help="master seed")
        p.add_argument("--workers", help="worker processes")
        p.add_argument("--mem-budget", dest="mem_budget", help=f"LUT memory budget in bytes ({DEFAULT_MEM_BUDGET})")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("build-lut", help="build and save a syndrome lookup table")
    common(p)
    p.add_argument("--checkpoint-dir", dest="checkpoint_dir", help="per-weight checkpoint directory")

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the error probability")
    common(p)
    p.add_argument("--criterion", choices=("exact-identification", "logical-equivalence"))

    p = sub.add_parser("analytic", help="analytic model data (figs 2, 3, 4, 6, 7)")
    common(p)
    p.add_argument("--fig", choices=("2", "3", "4", "6", "7"), help="figure data set (default 2)")

    p = sub.add_parser("hashing", help="hashing comparison data (figs 5, 8, 12, 13)")
    common(p)
    p.add_argument("--fig", choices=("5", "8", "12", "13"), help="figure data set (default 8)")

    p = sub.add_parser("compare", help="recurrence baseline and effective yield (figs 11, 14)")
    common(p)
    p.add_argument("--fig", choices=("11", "14"), help="figure data set (default 14)")

    p = sub.add_parser("mb-range", help="measurement-based purification ranges and thresholds")
    common(p)
    p.add_argument("--threshold", action="store_true", help="report the largest workable q per n")

    p = sub.add_parser("tables", help="reproduce tables 1-6 (one CSV each)")
    common(p)
    p.add_argument("--which", help="comma list of table numbers (default all)")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    params = _load_config_file(args.config)
    for key in (*_PARAM_ALIASES, "mem_budget", "criterion", "fig", "which", "checkpoint_dir", "threshold"):
        v = getattr(args, key, None)
        if v is not None and v is not False:
            params[key] = v
    params = {k: _parse_value(k, v) for k, v in sorted(params.items())}
    out = params.pop("out", None) or args.out
    return ExperimentConfig(args.command, params, Path(out) if out else None)


# ---------------------------------------------------------------------------
# output


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "results"))


def render_csv(cfg: ExperimentConfig, fields, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# pgrand {__version__} command={cfg.command}\n")
    buf.write(f"# config_hash={cfg.config_hash}\n")
    buf.write(f"# params={json.dumps(cfg.params, sort_keys=True, default=str)}\n")
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="raise")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def _fmt(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return v


def write_manifest(path: Path, cfg: ExperimentConfig, extra: dict | None = None) -> Path:
    man = {
        "version": __version__,
        "command": cfg.command,
        "params": cfg.params,
        "config_hash": cfg.config_hash,
        "artifact": path.name,
    }
    if extra:
        man.update(extra)
    mpath = path.with_name(path.name + ".manifest.json")
    mpath.write_text(json.dumps(man, indent=2, sort_keys=True, default=str) + "\n")
    return mpath


def write_csv(path: Path, cfg: ExperimentConfig, fields, rows, extra: dict | None = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(cfg, fields, rows))
    write_manifest(path, cfg, extra)
    return path


def _out_path(cfg: ExperimentConfig, stem: str, suffix: str = ".csv") -> Path:
    if cfg.out is not None:
        return cfg.out
    return default_out_dir() / f"{stem}-{cfg.config_hash}{suffix}"


# ---------------------------------------------------------------------------
# commands


def _call_with(fn, params: dict):
    """Call ``fn`` with whichever of ``params`` its signature accepts."""
    sig = inspect.signature(fn).parameters
    kwargs = {}
    for key, value in params.items():
        for name in _PARAM_ALIASES.get(key, ()):
            if name in sig:
                if name in _LIST_PARAMS:
                    value = value if isinstance(value, list) else [value]
                elif isinstance(value, list):
                    if len(value) != 1:
                        raise PreconditionError(f"--{key} takes a single value here, got {value}")
                    value = value[0]
                kwargs[name] = value
                break
    return fn(**kwargs)


def _scalar(params: dict, key: str, default=None, required: bool = False):
    v = params.get(key, default)
    if v is None and required:
        raise PreconditionError(f"--{key} is required")
    if isinstance(v, list):
        if len(v) != 1:
            raise PreconditionError(f"--{key} takes a single value here, got {v}")
        v = v[0]
    return v


def cmd_build_lut(cfg: ExperimentConfig) -> list[Path]:
    P = cfg.params
    n = _scalar(P, "n", required=True)
    k = _scalar(P, "k", required=True)
    t = _scalar(P, "t", required=True)
    p = _scalar(P, "p")
    seed = _scalar(P, "seed", 0)
    gates = _scalar(P, "gates", default_gate_count(n))
    if not 1 <= k < n:
        raise PreconditionError(f"need 1 <= k < n, got n={n}, k={k}")
    if not 0 <= t <= n:
        raise PreconditionError(f"need 0 <= t <= n, got t={t}")
    circuit = sample_random_encoder(n, gates, seed)
    H = build_parity_check(circuit, k=k)
    table = build_table(
        H, t, p, encoder_seed=seed, num_gates=gates,
        mem_budget=_scalar(P, "mem_budget", DEFAULT_MEM_BUDGET),
        workers=_scalar(P, "workers", 1),
        checkpoint_dir=P.get("checkpoint_dir"),
    )
    path = _out_path(cfg, f"lut-n{n}-k{k}-t{t}", ".lut")
    path.parent.mkdir(parents=True, exist_ok=True)
    table.save(path)
    circuit.save(path.with_suffix(".circuit"))
    write_manifest(path, cfg, {"table_sha256": table_fingerprint(table), "entries": table.size,
                               "patterns_stored": table.patterns_stored})
    return [path]


def cmd_simulate(cfg: ExperimentConfig) -> list[Path]:
    P = dict(cfg.params)
    if "trials" in P and _scalar(P, "trials") < 1:
        raise PreconditionError(f"trials must be >= 1, got {P['trials']}")
    fields, rows = _call_with(ex.fig2_simulated, P)
    path = _out_path(cfg, "simulate")
    return [write_csv(path, cfg, fields, rows)]


def _figure_command(cfg: ExperimentConfig, default_fig: str) -> list[Path]:
    fig = _scalar(cfg.params, "fig", default_fig)
    if fig not in ex.FIGURES:
        raise PreconditionError(f"unknown figure {fig!r}")
    fields, rows = _call_with(ex.FIGURES[fig], cfg.params)
    return [write_csv(_out_path(cfg, f"fig{fig}"), cfg, fields, rows)]


def cmd_mb_range(cfg: ExperimentConfig) -> list[Path]:
    P = cfg.params
    if P.get("threshold"):
        fields, rows = _call_with(ex.table3, P)
        stem = "mb-threshold"
    else:
        fields, rows = _call_with(ex.mb_grid, P)
        stem = "mb-range"
        for r in rows:
            if not r["attainable"]:
                log.warning(json.dumps({"warning": "purification-unattainable", "n": r["n"], "q": r["q"]}))
    return [write_csv(_out_path(cfg, stem), cfg, fields, rows)]


def cmd_tables(cfg: ExperimentConfig) -> list[Path]:
    which = cfg.params.get("which", [1, 2, 3, 4, 5, 6])
    which = [int(w) for w in (which if isinstance(which, list) else [which])]
    bad = [w for w in which if w not in ex.TABLES]
    if bad:
        raise PreconditionError(f"unknown table number(s) {bad}; choose from 1-6")
    out_dir = cfg.out if cfg.out is not None else default_out_dir()
    paths = []
    for w in which:
        fields, rows = ex.TABLES[w]()
        paths.append(write_csv(Path(out_dir) / f"table{w}.csv", cfg, fields, rows))
    return paths


HANDLERS = {
    "build-lut": cmd_build_lut,
    "simulate": cmd_simulate,
    "analytic": lambda c: _figure_command(c, "2"),
    "hashing": lambda c: _figure_command(c, "8"),
    "compare": lambda c: _figure_command(c, "14"),
    "mb-range": cmd_mb_range,
    "tables": cmd_tables,
}


def run(command: str, config_file: str | None = None, **flags) -> list[Path]:
    """Programmatic entry point mirroring the command line."""
    argv = [command]
    if config_file:
        argv += ["--config", config_file]
    for k, v in flags.items():
        if v is True:
            argv.append(f"--{k.replace('_', '-')}")
        elif v is not None:
            argv += [f"--{k.replace('_', '-')}", ",".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v)]
    args = build_parser().parse_args(argv)
    return HANDLERS[args.command](resolve_config(args))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        paths = HANDLERS[args.command](cfg)
    except PurificationUnattainable as e:
        log.warning(json.dumps({"warning": "purification-unattainable", "detail": str(e)}))
        return 0
    except ResourceLimitError as e:
        print(f"pgrand: resource limit: {e}", file=sys.stderr)
        return 3
    except (PreconditionError, ValueError, TypeError) as e:
        print(f"pgrand: precondition violated: {e}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
