"""Command-line entry point: ``dobrushin-lab <subcommand> --config FILE``.

Exit codes: 0 success or pass, 1 statistical check failed, 2 input error,
3 internal error. Every JSON report carries the config digest, the seed
and the library version.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import __version__
from . import complexity as cx
from . import gibbs, learn, verify
from .errors import DobrushinLabError, InputError, SchemaError
from .mrf import PairwiseMrf, coefficients, exact_joint, load_model, model_from_dict

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
STOCHASTIC = {"gibbs", "couple", "complexity", "learn"}


# -- config plumbing ---------------------------------------------------------

def builtin_path(name: str) -> Path:
    path = resources.files("dobrushin_lab") / "data" / f"{name}.json"
    if not path.is_file():
        raise InputError(f"no bundled file named {name!r}")
    return Path(str(path))


def resolve_path(ref: str, base: Path | None = None) -> Path:
    if ref.startswith("builtin:"):
        return builtin_path(ref[len("builtin:"):])
    p = Path(ref)
    if not p.is_absolute() and base is not None:
        p = base / p
    return p


def read_json(ref: str, base: Path | None = None) -> Any:
    path = resolve_path(ref, base)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise InputError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None


def config_digest(config: Any) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _field(config: Mapping, key: str, kind, default=None, required=False):
    if key not in config:
        if required:
            raise SchemaError(f"config is missing required field '{key}'")
        return default
    value = config[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError(f"'{key}' must be an integer, got {value!r}")
    if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise SchemaError(f"'{key}' must be a number, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise SchemaError(f"'{key}' must be a list, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise SchemaError(f"'{key}' must be a string, got {value!r}")
    if kind is dict and not isinstance(value, dict):
        raise SchemaError(f"'{key}' must be an object, got {value!r}")
    return value


def _num(spec: Mapping, key: str, default: float) -> float:
    value = _field(spec, key, float, default)
    return float(value)


def _model(config: Mapping, base: Path | None) -> PairwiseMrf:
    ref = config.get("model", None)
    if ref is None:
        if "alphabet" in config:
            return model_from_dict(config)
        raise SchemaError("config is missing required field 'model' (a path, builtin:NAME, or inline object)")
    if isinstance(ref, str):
        return load_model(resolve_path(ref, base))
    return model_from_dict(ref)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return "%.17g" % v
        return v

    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _matrix_rows(mat: np.ndarray):
    return [[float(v) for v in row] for row in mat]


class Outputs:
    """Collects files for ``--out DIR``; refuses to overwrite unless forced."""

    def __init__(self, out: str | None, force: bool):
        self.dir = Path(out) if out else None
        self.force = force
        self.pending: list[tuple[str, Callable[[Path], None]]] = []

    def add_json(self, name: str, doc: Any) -> None:
        self.pending.append((name, lambda p: p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")))

    def add_csv(self, name: str, header, rows) -> None:
        self.pending.append((name, lambda p: _write_csv(p, header, rows)))

    def flush(self) -> None:
        if self.dir is None:
            return
        self.dir.mkdir(parents=True, exist_ok=True)
        clash = [n for n, _ in self.pending if (self.dir / n).exists()]
        if clash and not self.force:
            raise InputError(f"refusing to overwrite {', '.join(clash)} in {self.dir} (pass --force)")
        for name, write in self.pending:
            write(self.dir / name)


def _jsonable(obj):
    return verify._jsonable(obj)


# -- subcommands -------------------------------------------------------------

def cmd_influence(config, seed, workers, out: Outputs, base):
    model = _model(config, base)
    rep = coefficients(model)
    out.add_csv("dobrushin.csv", [f"j{j}" for j in range(model.m)], _matrix_rows(rep.dobrushin))
    out.add_csv("log_influence.csv", [f"j{j}" for j in range(model.m)], _matrix_rows(rep.log_influence))
    out.add_csv("beta.csv", [f"j{j}" for j in range(model.m)], _matrix_rows(rep.beta))
    return rep.to_dict(), True


def cmd_gibbs(config, seed, workers, out: Outputs, base):
    model = _model(config, base)
    burn = _field(config, "burn_in", int, 1000)
    thin = _field(config, "thin", int, 1)
    count = _field(config, "count", int, required=True)
    draws = gibbs.gibbs_sample(model, burn, thin, count, seed)
    labels = np.asarray(model.alphabet.labels)
    out.add_csv("samples.csv", [f"z{i}" for i in range(model.m)], labels[draws].tolist())
    result: dict[str, Any] = {"count": count, "burn_in": burn, "thin": thin}
    if count:
        emp = np.array([np.bincount(draws[:, i], minlength=model.q) / count for i in range(model.m)])
        result["empirical_marginals"] = emp.tolist()
        if model.q**model.m <= 2**20:
            table = exact_joint(model)
            exact = np.array([table.marginal(i) for i in range(model.m)])
            result["exact_marginals"] = exact.tolist()
            result["max_marginal_tv"] = float(0.5 * np.abs(emp - exact).sum(axis=1).max())
    return result, True


def cmd_couple(config, seed, workers, out: Outputs, base):
    model = _model(config, base)
    k = _field(config, "k", int, required=True)
    stats = gibbs.coupling_experiment(
        model, k,
        _field(config, "a", list, required=True),
        _field(config, "a_prime", list, required=True),
        _field(config, "runs", int, 10_000),
        _field(config, "sweeps", int, 200),
        seed,
        burn_in=_field(config, "burn_in", int, None),
        workers=workers,
    )
    rows = [[s, float(mu), float(se)] for s, (mu, se) in enumerate(zip(stats.trace_mean, stats.trace_stderr))]
    out.add_csv("coupling.csv", ["sweep", "mean_hamming", "stderr"], rows)
    return stats.to_dict(), stats.passed


def _class_matrix(values) -> cx.FunctionClass:
    try:
        return cx.FunctionClass(np.asarray(values, dtype=float))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise SchemaError(f"class matrix is not a rectangular numeric table: {exc}") from None


def _load_class(config, base) -> cx.FunctionClass:
    spec = config.get("class")
    if spec is None:
        raise SchemaError("config is missing required field 'class'")
    if isinstance(spec, str):
        path = resolve_path(spec, base)
        try:
            vals = np.loadtxt(path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read class matrix {path}: {exc}") from None
        return cx.FunctionClass(vals)
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "all_sign_patterns":
            return cx.all_sign_patterns(_field(spec, "m", int, required=True))
        if kind == "zero":
            return cx.zero_class(_field(spec, "m", int, required=True))
        if kind == "values":
            return _class_matrix(_field(spec, "values", list, required=True))
        raise SchemaError(f"unknown class kind {kind!r} (use all_sign_patterns, zero or values)")
    if isinstance(spec, list):
        return _class_matrix(spec)
    raise SchemaError("'class' must be a CSV path, a matrix, or an object with 'kind'")


def cmd_complexity(config, seed, workers, out: Outputs, base):
    cls = _load_class(config, base)
    kinds = config.get("noise", ["rademacher", "gaussian"])
    kinds = [kinds] if isinstance(kinds, str) else kinds
    draws = _field(config, "draws", int, 10_000)
    rng = np.random.default_rng(seed)
    result: dict[str, Any] = {"m": cls.m, "functions": cls.size, "estimates": []}
    for kind in kinds:
        if kind not in ("rademacher", "gaussian"):
            raise SchemaError(f"unknown noise kind {kind!r} (use rademacher or gaussian)")
        est = cx.tau_complexity(cls, cx.NoiseSpec(kind), draws, rng)
        result["estimates"].append(est.to_dict())
    if config.get("exact", cls.m <= 20):
        result["exact_rademacher"] = cx.exact_rademacher(cls)
    return result, True


def _family(spec: Mapping, m_grid) -> Any:
    kind = spec.get("kind", "theta_chain")
    params = _field(spec, "params", dict, {})
    if kind == "theta_chain":
        return learn.ThetaChainFamily(
            row_sum=_num(params, "row_sum", 0.4),
            reference_m=_field(params, "reference_m", int, max(m_grid)),
            c=_field(params, "c", float, None),
            label_threshold=_num(params, "label_threshold", 0.0),
        )
    if kind == "discrete":
        return learn.DiscreteChainFamily(
            theta=_num(params, "theta", 0.25),
            field=_num(params, "field", 0.0),
            label_threshold=_num(params, "label_threshold", 0.0),
        )
    raise SchemaError(f"unknown family kind {kind!r} (use theta_chain or discrete)")


def cmd_learn(config, seed, workers, out: Outputs, base):
    m_grid = _field(config, "m_grid", list, [64, 256, 1024, 4096])
    if not m_grid or not all(isinstance(m, int) and m >= 2 for m in m_grid):
        raise SchemaError("'m_grid' must be a nonempty list of integers >= 2")
    family = _family(_field(config, "family", dict, {}), m_grid)
    scheme_name = _field(config, "scheme", str, "threshold")
    if scheme_name not in learn.SCHEMES:
        raise SchemaError(f"unknown scheme {scheme_name!r} (use {', '.join(learn.SCHEMES)})")
    cls_name = _field(config, "class", str, learn.SCHEMES[scheme_name].hclass.kind)
    if cls_name != learn.SCHEMES[scheme_name].hclass.kind:
        raise SchemaError(f"scheme {scheme_name!r} compresses the {learn.SCHEMES[scheme_name].hclass.kind} class")
    rep = learn.generalization_experiment(
        family, learn.SCHEMES[scheme_name], m_grid,
        _field(config, "trials", int, 200), seed,
        flip_prob=_num(config, "flip_prob", 0.1),
        C_alpha=_num(config, "C_alpha", 1.0),
        delta=_num(config, "delta", 0.05),
        workers=workers,
    )
    out.add_csv("generalization.csv", ["m", "mean_gap", "stderr", "bound"],
                [[r["m"], r["mean_gap"], r["stderr"], r["bound"]] for r in rep.rows()])
    return rep.to_dict(), rep.within_bound


def _beta_fn(spec) -> Callable[[int], float]:
    if spec is None:
        return lambda a: 0.0
    if not isinstance(spec, dict):
        raise SchemaError("'beta' must be an object with a 'kind'")
    kind = spec.get("kind", "zero")
    if kind == "zero":
        return lambda a: 0.0
    if kind == "exponential":
        scale, rate = _num(spec, "scale", 1.0), _num(spec, "rate", 1.0)
        return lambda a: scale * math.exp(-rate * a)
    if kind == "polynomial":
        scale, power = _num(spec, "scale", 1.0), _num(spec, "power", 1.0)
        return lambda a: scale * a ** (-power)
    raise SchemaError(f"unknown beta kind {kind!r} (use zero, exponential, polynomial)")


def cmd_bounds(config, seed, workers, out: Outputs, base):
    eps = _field(config, "epsilon", list, [0.1, 0.05])
    delta = _field(config, "delta", list, [0.1, 0.01])
    dims = _field(config, "d", list, [1, 10])
    for key, grid in (("epsilon", eps), ("delta", delta), ("d", dims)):
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in grid):
            raise SchemaError(f"'{key}' must be a list of numbers")
    rows = learn.sample_complexity_table(eps, delta, dims)
    out.add_csv("sample_complexity.csv", ["d", "epsilon", "delta", "m_prior", "m_this", "ratio"],
                [[r["d"], r["epsilon"], r["delta"], r["m_prior"], r["m_this"], r["ratio"]] for r in rows])
    result: dict[str, Any] = {"table": rows}
    if "mohri" in config:
        mo = _field(config, "mohri", dict)
        val = learn.mohri_bound(
            _field(mo, "m", int, required=True), _num(mo, "d", 1),
            _beta_fn(mo.get("beta")), _num(mo, "delta", 0.05), _num(mo, "L", 1.0),
        )
        result["mohri_bound"] = val
    return result, True


def cmd_verify(config, seed, workers, out: Outputs, base):
    entries = config.get("entries", []) if isinstance(config, dict) else config
    if not isinstance(entries, list):
        raise SchemaError("manifest must be a list of entries or an object with 'entries'")
    reports = []
    for n, entry in enumerate(entries):
        if not isinstance(entry, dict) or "lemma" not in entry:
            raise SchemaError(f"manifest entry {n} must be an object with a 'lemma' field")
        if "seed" not in entry and seed is not None:
            entry = {**entry, "seed": seed}
        rep = verify.run_entry(entry)
        reports.append(rep.to_dict())
        out.add_json(f"{n:02d}_{rep.lemma}.json", rep.to_dict())
    all_pass = all(r["pass"] for r in reports)
    return {"reports": reports, "all_pass": all_pass}, all_pass


COMMANDS = {
    "influence": cmd_influence,
    "gibbs": cmd_gibbs,
    "couple": cmd_couple,
    "complexity": cmd_complexity,
    "learn": cmd_learn,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dobrushin-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config (path or builtin:NAME)")
        p.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", default=None, help="directory for CSV/JSON outputs")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    return parser


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.workers < 1:
            raise InputError("--workers must be >= 1")
        config = read_json(args.config)
        base = None if args.config.startswith("builtin:") else Path(args.config).resolve().parent
        seed = args.seed
        if seed is None and isinstance(config, dict) and "seed" in config:
            seed = _field(config, "seed", int)
        if seed is not None and not 0 <= seed < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        if seed is None and args.command in STOCHASTIC:
            raise InputError(f"'{args.command}' is stochastic: pass --seed or set 'seed' in the config")
        workers = args.workers
        if isinstance(config, dict) and "workers" in config and args.workers == 1:
            workers = max(1, _field(config, "workers", int))
        outputs = Outputs(args.out, args.force)
        result, passed = COMMANDS[args.command](config, seed, workers, outputs, base)
        report = {
            "command": args.command,
            "version": __version__,
            "seed": seed,
            "config_digest": config_digest(config),
            "pass": bool(passed),
            "result": _jsonable(result),
        }
        outputs.add_json("report.json", report)
        outputs.flush()
        stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return EXIT_OK if passed else EXIT_FAIL
    except DobrushinLabError as exc:
        sys.stderr.write(f"dobrushin-lab: error: {exc}\n")
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(f"dobrushin-lab: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
