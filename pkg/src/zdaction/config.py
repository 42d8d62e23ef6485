"""Config documents: system presentations, theta schedules, function files
and composition nodes.  TOML or JSON; stock configs ship in
``zdaction/configs`` and can be named without a path (``x2x3``)."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import expr
from .composition import (
    ComposedModule,
    Cyclic,
    DirectSum,
    Extension,
    submodule_restrict,
    tower,
)
from .errors import ConfigError
from .fields import Presentation, parse_presentation
from .periodic import GaussQ, TrigPolynomial
from .reals import as_fraction
from .uniformity import ThetaSchedule

__all__ = [
    "load_composition",
    "load_document",
    "load_functions",
    "load_presentation",
    "load_schedule",
    "stock_names",
]


def stock_names() -> list[str]:
    root = resources.files("zdaction") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def _read(path: Path) -> tuple[dict, Path | None]:
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".json":
            return json.loads(text), path.parent
        return tomllib.loads(text), path.parent
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_document(ref: str, base: Path | None = None) -> tuple[dict, Path | None]:
    """Parse a config given as a path or a stock name; returns ``(doc, dir)``."""
    p = Path(ref)
    if base is not None and not p.is_absolute():
        cand = base / p
        if cand.exists():
            return _read(cand)
    if p.exists():
        return _read(p)
    name = ref[:-5] if ref.endswith(".toml") else ref
    stock = resources.files("zdaction") / "configs" / f"{name}.toml"
    if stock.is_file():
        try:
            return tomllib.loads(stock.read_text(encoding="utf-8")), None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"stock config {name}: {exc}") from None
    raise ConfigError(f"config {ref!r} is neither a file nor a stock name "
                      f"({', '.join(stock_names())})")


def load_presentation(doc: dict) -> Presentation:
    return parse_presentation(doc)


def load_schedule(doc: dict) -> ThetaSchedule:
    sched = doc.get("schedule", {}) or {}
    if not isinstance(sched, dict):
        raise ConfigError("schedule: must be a table")
    if "theta_list" in sched and "theta_base" in sched:
        raise ConfigError("schedule: give theta_base or theta_list, not both")
    try:
        if "theta_list" in sched:
            return ThetaSchedule.user([as_fraction(str(v)) for v in sched["theta_list"]])
        return ThetaSchedule.geometric(as_fraction(str(sched.get("theta_base", 2))))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"schedule: {exc}") from None


# ---------------------------------------------------------------------------
# function files
# ---------------------------------------------------------------------------

def _env(pres: Presentation) -> dict:
    K = pres.field
    env = {K.var: K.gen}
    for i, g in enumerate(pres.generators):
        env[f"g{i + 1}"] = g
    return env


def load_functions(ref: str, pres: Presentation) -> dict[str, TrigPolynomial]:
    """Read ``f`` (and optionally ``g``): lists of ``{support, re, im}``.

    Supports are expressions in the field variable and the generator images
    ``g1..gd``; coefficients are rationals given as strings or integers.
    """
    doc, _ = load_document(ref)
    out = {}
    for key in ("f", "g"):
        if key not in doc:
            continue
        entries = doc[key]
        if not isinstance(entries, list):
            raise ConfigError(f"{key}: expected a list of {{support, re, im}} entries")
        coeffs = {}
        for j, ent in enumerate(entries):
            try:
                a = expr.evaluate(str(ent["support"]), pres.field, _env(pres))
                c = GaussQ(as_fraction(str(ent.get("re", 0))), as_fraction(str(ent.get("im", 0))))
            except (KeyError, ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"{key}[{j}]: {exc}") from None
            if a in coeffs:
                raise ConfigError(f"{key}[{j}]: support {ent['support']!r} repeated")
            coeffs[a] = c
        try:
            out[key] = TrigPolynomial(coeffs, pres, real=bool(doc.get(f"{key}_real", False)))
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    if "f" not in out:
        raise ConfigError("functions file needs an f list")
    return out


# ---------------------------------------------------------------------------
# compositions
# ---------------------------------------------------------------------------

def load_composition(doc: dict, base: Path | None = None) -> tuple[ComposedModule, dict]:
    """Build the module described by ``[[leaf]]`` and ``[[node]]`` tables.

    Leaves: ``{name, config}`` (path or stock name).  Nodes: ``{name, shape}``
    with shape ``sum`` (``parts``), ``tower`` (``leaves``, ``matrices``),
    ``extension`` (``sub``, ``quotient``, ``cocycles``, optional ``reps``) or
    ``restrict`` (``parent``, ``zero_coords``).  The module is the node named
    by ``composition.root`` (default: the last node).
    """
    leaves: dict[str, Presentation] = {}
    for j, ent in enumerate(doc.get("leaf", []) or []):
        try:
            name, ref = str(ent["name"]), str(ent["config"])
        except KeyError:
            raise ConfigError(f"leaf[{j}]: need name and config") from None
        sub_doc, _ = load_document(ref, base)
        leaves[name] = load_presentation(sub_doc)
    if not leaves:
        raise ConfigError("composition needs at least one [[leaf]]")
    built: dict[str, ComposedModule] = {}

    def ref_module(name: str, where: str) -> ComposedModule:
        if name in built:
            return built[name]
        if name in leaves:
            built[name] = Cyclic(leaves[name])
            return built[name]
        raise ConfigError(f"{where}: unknown leaf or node {name!r}")

    nodes = doc.get("node", []) or []
    if not nodes:
        raise ConfigError("composition needs at least one [[node]]")
    for j, node in enumerate(nodes):
        where = f"node[{j}]"
        name = str(node.get("name", f"node{j}"))
        shape = node.get("shape")
        if shape == "sum":
            built[name] = DirectSum([ref_module(p, where) for p in node.get("parts", [])])
        elif shape == "tower":
            names = node.get("leaves", [])
            if any(n not in leaves for n in names):
                raise ConfigError(f"{where}.leaves: every entry must name a [[leaf]]")
            pres = [leaves[n] for n in names]
            K = pres[0].field
            mats = [[[expr.evaluate(str(c), K, {K.var: K.gen}) for c in row] for row in A]
                    for A in node.get("matrices", [])]
            built[name] = tower(pres, mats)
        elif shape == "extension":
            sub = ref_module(str(node.get("sub")), where)
            quo = ref_module(str(node.get("quotient")), where)
            K = _field_of(sub)
            cocycles = [[[expr.evaluate(str(c), K, {K.var: K.gen}) for c in row] for row in m]
                        for m in node.get("cocycles", [])]
            reps = _reps_table(node.get("reps"), sub, quo, where)
            built[name] = Extension(sub, quo, cocycles, reps)
        elif shape == "restrict":
            parent = ref_module(str(node.get("parent")), where)
            zc = [int(i) for i in node.get("zero_coords", [])]
            if any(not 0 <= i < parent.dim for i in zc):
                raise ConfigError(f"{where}.zero_coords: indices must lie in 0..{parent.dim - 1}")
            theta = as_fraction(str(node.get("check_theta", 2)))
            built[name] = submodule_restrict(
                parent, lambda x, zc=tuple(zc): all(x[i].is_zero() for i in zc), theta, name)
        else:
            raise ConfigError(f"{where}.shape: expected sum, tower, extension or restrict")
    root = doc.get("composition", {}).get("root", str(nodes[-1].get("name", f"node{len(nodes) - 1}")))
    if root not in built:
        raise ConfigError(f"composition.root: unknown node {root!r}")
    return built[root], leaves


def _field_of(M: ComposedModule):
    leaves = M.leaves()
    if not leaves:
        raise ConfigError("cannot infer the coefficient field of an empty module")
    return leaves[0].field


def _reps_table(entries, sub: ComposedModule, quo: ComposedModule, where: str):
    if not entries:
        return None
    K = _field_of(sub)
    env = {K.var: K.gen}
    table = {}
    for j, ent in enumerate(entries):
        try:
            q = tuple(expr.evaluate(str(c), K, env) for c in ent["quotient"])
            lift = tuple(expr.evaluate(str(c), K, env) for c in ent["lift"])
        except KeyError:
            raise ConfigError(f"{where}.reps[{j}]: need quotient and lift") from None
        table[q] = lift
    return table
