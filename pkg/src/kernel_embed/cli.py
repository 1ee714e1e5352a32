"""Command-line entry point: ``kernel-embed <command> --config run.json``.

Exit codes: 0 success, 2 invalid configuration or input, 3 numeric failure,
4 annotation conflict or non-enumerable schema.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import platform
import sys
import tempfile
from enum import Enum
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import (
    COMMANDS,
    ConfigError,
    RunConfig,
    declared_sequence_from_config,
    kernel_from_config,
    load_config,
    measure_from_config,
    pair_from_config,
    sequence_from_config,
    weights_from_config,
)
from .diagnostics import RefinementLadder, compactness_evidence
from .errors import AnnotationConflict, InvalidArgument, NotEnumerable, NumericFailure, Refused, ResourceLimit
from .ivar import (
    IvarModel,
    enumerate_by_criterion,
    iter_tensor_spectrum,
    kgamma_eval,
    terms_to_csv,
    thm2_verdict,
    x_membership,
)
from .kernel import gram, psd_min_eig, PSD_RELATIVE_TOL
from .operator import EmbeddingModel, spectrum
from .seqspace import verdicts

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_ANNOTATION = 0, 2, 3, 4
CSV_COMMANDS = ("spectrum", "diagnose", "ivar-verdict", "ivar-spectrum")


# ---------------------------------------------------------------- output


def _scalar(v) -> str:
    if isinstance(v, Enum):
        v = v.value
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON: insertion key order, floats with 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq):
            return "[" + ", ".join(_scalar(x) for x in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(x, indent + 1) for x in seq) + "\n" + end + "]"
    return _scalar(obj)


def _sorted(obj):
    if isinstance(obj, dict):
        return {k: _sorted(obj[k]) for k in sorted(obj)}
    if isinstance(obj, list):
        return [_sorted(x) for x in obj]
    return obj


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- commands


def _model(cfg: RunConfig) -> EmbeddingModel:
    k = kernel_from_config(cfg.raw["kernel"])
    mu = measure_from_config(cfg.raw["measure"])
    try:
        return EmbeddingModel(k, mu)
    except InvalidArgument as exc:
        raise ConfigError("measure", str(exc)) from None


def _ivar_model(cfg: RunConfig) -> IvarModel:
    uni = _model(cfg)
    schema = weights_from_config(cfg.raw["weights"])
    norm = cfg.raw.get("operator_norm")
    if norm is not None and (isinstance(norm, bool) or not isinstance(norm, (int, float))):
        raise ConfigError("operator_norm", "expected a number")
    try:
        return IvarModel(uni, schema, norm)
    except InvalidArgument as exc:
        field = "operator_norm" if norm is not None and "norm" in str(exc) else "measure"
        raise ConfigError(field, str(exc)) from None


def cmd_gram(cfg: RunConfig):
    m = _model(cfg)
    g = gram(m.kernel, m.measure.atoms)
    lam = psd_min_eig(g)
    scale = float(np.max(np.abs(g))) if g.size else 0.0
    result = {
        "kernel": m.kernel.describe(),
        "points": m.measure.to_dict()["atoms"],
        "gram": [list(map(float, row)) for row in g],
        "min_eigenvalue": lam,
        "psd": bool(lam >= -PSD_RELATIVE_TOL * max(scale, 1.0)),
    }
    return result, None


def cmd_spectrum(cfg: RunConfig):
    m = _model(cfg)
    n = min(cfg.tunables["top_n"], len(m))
    rep = spectrum(m, n)
    return {"model": m.describe(), "spectrum": rep.to_dict()}, rep.to_csv()


def cmd_diagnose(cfg: RunConfig):
    k = kernel_from_config(cfg.raw["kernel"])
    block = cfg.raw["measure"]
    measure_from_config(block, size=cfg.tunables["levels"][0])  # validate once up front

    def factory(level: int) -> EmbeddingModel:
        return EmbeddingModel(k, measure_from_config(block, size=level))

    ladder = RefinementLadder(factory, tuple(cfg.tunables["levels"]))
    n = cfg.tunables["top_n"]
    if n > ladder.levels[0]:
        raise ConfigError("tunables.top_n", f"must not exceed the coarsest level {ladder.levels[0]}")
    ev = compactness_evidence(ladder, n, stabilization=cfg.tunables["stabilization"])
    return {"kernel": k.describe(), "evidence": ev.to_dict()}, ev.to_csv()


def cmd_seq_example(cfg: RunConfig):
    pair = pair_from_config(cfg.raw["pair"])
    v = verdicts(pair, cfg.tunables["horizon"])
    return {"pair": pair.describe(), "verdicts": v.to_dict()}, None


def cmd_ivar_verdict(cfg: RunConfig):
    m = _ivar_model(cfg)
    v = thm2_verdict(m)
    result = {"model": m.univariate.describe(), "weights": m.schema.describe(), "operator_norm_sq": m.norm_sq}
    result["criterion"] = v.to_dict()
    csv_text = None
    try:
        terms = enumerate_by_criterion(m, cfg.tunables["top_n"])
    except NotEnumerable as exc:
        result["enumeration"] = {"available": False, "reason": str(exc)}
    else:
        result["enumeration"] = {
            "available": True,
            "terms": [{"subset": list(t.subset), "value": t.value} for t in terms],
        }
        csv_text = terms_to_csv(terms)
    return result, csv_text


def cmd_ivar_spectrum(cfg: RunConfig):
    flag = cfg.raw.get("assume_l2_orthogonal", False)
    if flag is not True:
        raise Refused("assume_l2_orthogonal: must be true; tensor spectra are only eigenvalues under L2-orthogonality")
    m = _ivar_model(cfg)
    eig_block = cfg.raw.get("univariate_eigs")
    if eig_block is None:
        rank = min(cfg.tunables["rank"], len(m.univariate))
        raw = spectrum(m.univariate, rank).raw_eigenvalues
        eigs = [x for x in raw if x > 0]
        source = f"top {rank} eigenvalues of the univariate model"
    else:
        eigs = sequence_from_config(eig_block, "univariate_eigs")
        source = "declared"
    try:
        terms = list(itertools.islice(iter_tensor_spectrum(m, eigs, True), cfg.tunables["top_n"]))
    except InvalidArgument as exc:
        raise ConfigError("univariate_eigs", str(exc)) from None
    result = {
        "model": m.univariate.describe(),
        "weights": m.schema.describe(),
        "univariate_eigs": {"source": source, "values": [float(x) for x in eigs]},
        "assume_l2_orthogonal": True,
        "spectrum": [
            {"subset": list(t.subset), "eigen_indices": list(t.eigen_indices), "value": t.value} for t in terms
        ],
    }
    return result, terms_to_csv(terms, with_indices=True)


def cmd_kgamma(cfg: RunConfig):
    m = _ivar_model(cfg)
    x = sequence_from_config(cfg.raw["x"], "x")
    y = sequence_from_config(cfg.raw["y"], "y")
    J = cfg.tunables["truncation"]
    try:
        val = kgamma_eval(m, x, y, J)
    except InvalidArgument as exc:
        raise ConfigError("x", str(exc)) from None
    result = {"weights": m.schema.describe(), "truncation": J, "kgamma": val.to_dict()}
    if "membership" in cfg.raw:
        result["membership"] = x_membership(m, declared_sequence_from_config(cfg.raw["membership"])).to_dict()
    return result, None


HANDLERS = {
    "gram": cmd_gram,
    "spectrum": cmd_spectrum,
    "diagnose": cmd_diagnose,
    "seq-example": cmd_seq_example,
    "ivar-verdict": cmd_ivar_verdict,
    "ivar-spectrum": cmd_ivar_spectrum,
    "kgamma": cmd_kgamma,
}


def build_report(cfg: RunConfig) -> tuple[dict, str | None]:
    result, csv_text = HANDLERS[cfg.command](cfg)
    report = {
        "command": cfg.command,
        "inputs": _sorted(cfg.raw),
        "result": result,
        "provenance": {
            "package": "kernel_embed",
            "version": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
            "tunables": cfg.tunables,
        },
    }
    return report, csv_text


def run(command: str, config: str, out: str | None = None, csv_path: str | None = None) -> int:
    try:
        cfg = load_config(config, command)
        if (csv_path or cfg.csv_out) and command not in CSV_COMMANDS:
            raise ConfigError("--csv", f"command {command!r} has no tabular output")
        report, csv_text = build_report(cfg)
    except (InvalidArgument, ResourceLimit, Refused) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AnnotationConflict as exc:
        where = f" (index {exc.index})" if getattr(exc, "index", None) is not None else ""
        print(f"annotation conflict{where}: {exc}", file=sys.stderr)
        return EXIT_ANNOTATION
    except NotEnumerable as exc:
        print(f"not enumerable: {exc}", file=sys.stderr)
        return EXIT_ANNOTATION

    text = dumps(report) + "\n"
    out = out or cfg.json_out
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)
    csv_path = csv_path or cfg.csv_out
    if csv_path and csv_text is not None:
        atomic_write(csv_path, csv_text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kernel-embed", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="JSON report path (default: output.json from the config, else stdout)")
    p.add_argument("--csv", help="CSV table path for commands with tabular output")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.command, args.config, args.out, args.csv)


if __name__ == "__main__":
    sys.exit(main())
