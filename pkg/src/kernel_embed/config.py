"""JSON run configurations: parsing blocks into library objects.

Every parse error is a :class:`ConfigError` naming the offending field with a
dotted path such as ``measure.m`` or ``weights.product.rule``.
"""
from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .expr import Expression
from .ivar import DeclaredSequence, ExplicitWeights, ProductWeights, product_rule
from .kernel import Kernel, make_kernel
from .measure import NATURALS, DiscreteMeasure, atomic_measure, interval, uniform_grid_measure
from .seqspace import Annotations, SequencePair, equal_pair, paper_example

COMMANDS = ("gram", "spectrum", "diagnose", "seq-example", "ivar-verdict", "ivar-spectrum", "kgamma")

REQUIRED_BLOCKS = {
    "gram": ("kernel", "measure"),
    "spectrum": ("kernel", "measure"),
    "diagnose": ("kernel", "measure"),
    "seq-example": ("pair",),
    "ivar-verdict": ("kernel", "measure", "weights"),
    "ivar-spectrum": ("kernel", "measure", "weights"),
    "kgamma": ("kernel", "measure", "weights", "x", "y"),
}

TUNABLE_DEFAULTS = {
    "horizon": 10_000,
    "levels": [256, 512, 1024],
    "top_n": 10,
    "truncation": 12,
    "stabilization": 1e-3,
    "rank": 10,
}


class ConfigError(InvalidArgument):
    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


@dataclass
class RunConfig:
    command: str
    raw: dict
    tunables: dict = field(default_factory=dict)
    json_out: str | None = None
    csv_out: str | None = None


def _require(block: dict, key: str, path: str):
    if not isinstance(block, dict):
        raise ConfigError(path, "expected an object")
    if key not in block:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return block[key]


def _number(v, path: str, *, integer: bool = False, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    if integer and (not isinstance(v, numbers.Integral)):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(path, f"must be positive, got {v!r}")
    return int(v) if integer else float(v)


def _expression(v, path: str, var: str = "i") -> Expression:
    if not isinstance(v, str):
        raise ConfigError(path, "expected an expression string")
    try:
        return Expression(v, var)
    except InvalidArgument as exc:
        raise ConfigError(path, str(exc)) from None


def load_config(path: str | Path, command: str | None = None) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("--config", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    return parse_config(raw, command)


def parse_config(raw: dict, command: str | None = None) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    declared = raw.get("command")
    if command is None:
        command = declared
    elif declared is not None and declared != command:
        raise ConfigError("command", f"config says {declared!r} but {command!r} was requested")
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; expected one of {list(COMMANDS)}")
    for block in REQUIRED_BLOCKS[command]:
        if block not in raw:
            raise ConfigError(block, f"missing required block for {command!r}")

    tun = dict(TUNABLE_DEFAULTS)
    given = raw.get("tunables", {})
    if not isinstance(given, dict):
        raise ConfigError("tunables", "expected an object")
    for key, v in given.items():
        if key not in TUNABLE_DEFAULTS:
            raise ConfigError(f"tunables.{key}", "unknown tunable")
        tun[key] = v
    for key in ("horizon", "top_n", "truncation", "rank"):
        tun[key] = _number(tun[key], f"tunables.{key}", integer=True)
    if tun["horizon"] < 10:
        raise ConfigError("tunables.horizon", "must be >= 10")
    if tun["top_n"] < 1 or tun["rank"] < 1:
        raise ConfigError("tunables.top_n" if tun["top_n"] < 1 else "tunables.rank", "must be >= 1")
    if not 0 <= tun["truncation"] <= 10_000:
        raise ConfigError("tunables.truncation", "must be in [0, 10000]")
    tun["stabilization"] = _number(tun["stabilization"], "tunables.stabilization", positive=True)
    if not isinstance(tun["levels"], list) or len(tun["levels"]) < 3:
        raise ConfigError("tunables.levels", "expected a list of at least 3 level sizes")
    tun["levels"] = [_number(v, f"tunables.levels[{i}]", integer=True, positive=True) for i, v in enumerate(tun["levels"])]
    if any(a >= b for a, b in zip(tun["levels"], tun["levels"][1:])):
        raise ConfigError("tunables.levels", "must be strictly increasing")

    out = raw.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output", "expected an object")
    return RunConfig(command, raw, tun, out.get("json"), out.get("csv"))


def kernel_from_config(block, path: str = "kernel") -> Kernel:
    name = _require(block, "name", path)
    params = block.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params", "expected an object")
    kw = {}
    for key, v in params.items():
        p = f"{path}.params.{key}"
        if name == "diagonal_sequence" and key == "nu":
            kw[key] = _expression(v, p)
        elif name == "constant_plus" and key == "base":
            kw[key] = kernel_from_config(v, p)
        else:
            kw[key] = _number(v, p)
    try:
        return make_kernel(name, **kw)
    except InvalidArgument as exc:
        raise ConfigError(path, str(exc)) from None


def measure_from_config(block, path: str = "measure", size: int | None = None) -> DiscreteMeasure:
    """Build a measure; ``size`` overrides the grid/sequence size (ladders)."""
    if not isinstance(block, dict):
        raise ConfigError(path, "expected an object")
    kind = block.get("kind", "atomic" if "atoms" in block else None)
    try:
        if kind == "grid":
            a = _number(_require(block, "a", path), f"{path}.a")
            b = _number(_require(block, "b", path), f"{path}.b")
            m = size if size is not None else _number(_require(block, "m", path), f"{path}.m", integer=True)
            return uniform_grid_measure(a, b, m)
        if kind == "sequence":
            w = _expression(_require(block, "expr", path), f"{path}.expr")
            n = size if size is not None else _number(_require(block, "n", path), f"{path}.n", integer=True, positive=True)
            i = np.arange(1, n + 1)
            return atomic_measure(tuple(range(1, n + 1)), np.broadcast_to(w(i), i.shape), NATURALS)
        if kind == "atomic":
            if size is not None:
                raise ConfigError(f"{path}.kind", "refinement ladders need a 'grid' or 'sequence' measure")
            atoms = _require(block, "atoms", path)
            weights = _require(block, "weights", path)
            if not isinstance(atoms, list) or not isinstance(weights, list):
                raise ConfigError(path, "atoms and weights must be lists")
            dom = block.get("domain")
            if dom is None:
                domain = None
            elif dom == "naturals":
                domain = NATURALS
            elif isinstance(dom, list) and len(dom) == 2:
                domain = interval(_number(dom[0], f"{path}.domain[0]"), _number(dom[1], f"{path}.domain[1]"))
                atoms = [_number(x, f"{path}.atoms[{k}]") for k, x in enumerate(atoms)]
            else:
                raise ConfigError(f"{path}.domain", "expected 'naturals' or [a, b]")
            return atomic_measure(atoms, [_number(x, f"{path}.weights[{k}]") for k, x in enumerate(weights)], domain)
    except ConfigError:
        raise
    except InvalidArgument as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"expected 'grid', 'sequence' or 'atomic', got {kind!r}")


def weights_from_config(block, path: str = "weights") -> ExplicitWeights | ProductWeights:
    if not isinstance(block, dict) or len(block) != 1 or next(iter(block)) not in ("product", "explicit"):
        raise ConfigError(path, "expected exactly one of 'product' or 'explicit'")
    try:
        if "explicit" in block:
            entries = block["explicit"]
            if not isinstance(entries, list):
                raise ConfigError(f"{path}.explicit", "expected a list of [subset, weight] pairs")
            parsed = []
            for k, e in enumerate(entries):
                if not (isinstance(e, list) and len(e) == 2 and isinstance(e[0], list)):
                    raise ConfigError(f"{path}.explicit[{k}]", "expected [subset, weight]")
                parsed.append((tuple(e[0]), _number(e[1], f"{path}.explicit[{k}][1]")))
            return ExplicitWeights(tuple(parsed))
        prod = block["product"]
        rule = _require(prod, "rule", f"{path}.product")
        ann = prod.get("annotations", {})
        if not isinstance(ann, dict):
            raise ConfigError(f"{path}.product.annotations", "expected an object")
        q = prod.get("q")
        if isinstance(rule, str) and rule.startswith("geometric(") and rule.endswith(")"):
            q = float(rule[len("geometric(") : -1])
            rule = "geometric"
        return product_rule(rule, ann, q)
    except ConfigError:
        raise
    except (InvalidArgument, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None


def pair_from_config(block, path: str = "pair") -> SequencePair:
    if not isinstance(block, dict):
        raise ConfigError(path, "expected an object")
    name = block.get("name")
    if name == "paper_example":
        return paper_example()
    if name == "equal":
        return equal_pair(_expression(_require(block, "base", path), f"{path}.base"))
    mu = _expression(_require(block, "mu", path), f"{path}.mu")
    nu = _expression(_require(block, "nu", path), f"{path}.nu")
    ann = block.get("annotations", {})
    if not isinstance(ann, dict):
        raise ConfigError(f"{path}.annotations", "expected an object")
    known = {"ratio_limit", "ratio_sup_finite", "ratio_sum_divergent", "ratio_sq_sum_divergent", "justifications"}
    for key in ann:
        if key not in known:
            raise ConfigError(f"{path}.annotations.{key}", "unknown annotation")
    return SequencePair(mu, nu, Annotations(**ann), name=name or "custom")


def sequence_from_config(block, path: str) -> list:
    if not isinstance(block, list):
        raise ConfigError(path, "expected a list of points")
    return [_number(v, f"{path}[{k}]") if not isinstance(v, int) else v for k, v in enumerate(block)]


def declared_sequence_from_config(block, path: str = "membership") -> DeclaredSequence:
    if not isinstance(block, dict):
        raise ConfigError(path, "expected an object")
    prefix = tuple(sequence_from_config(block.get("prefix", []), f"{path}.prefix"))
    maj = block.get("diag_majorant")
    mnr = block.get("diag_minorant")
    return DeclaredSequence(
        prefix,
        None if maj is None else _number(maj, f"{path}.diag_majorant"),
        None if mnr is None else _number(mnr, f"{path}.diag_minorant"),
    )
