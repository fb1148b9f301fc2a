"""Scene files (``plurifold-scene/1``): parsing, validation, defaults and hashing.

A scene is a JSON object::

    {"schema": "plurifold-scene/1",
     "command": "pluriharmonic-check",
     "model": "complexified-su:1:1",
     "framing": {"preset": "borel", "p": 1, "q": 1},
     "fd": {"step": "1e-4", "study_step": "2e-3", "levels": 3},
     "tolerances": {"residual": "1e-8"},
     "seed": 0, "grid": 25, "params": {}}

Explicit framings list terms with a named (``E12``, ``H1``; 1-based) or
explicit matrix, a coefficient ``[re, im]`` of decimal strings and exponent
lists ``z``/``zbar``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

import numpy as np

from .maurer_cartan import Framing, FramingError, Term, borel_framing

SCENE_SCHEMA = "plurifold-scene/1"

COMMANDS = ("mc-check", "pluriharmonic-check", "associated-family-check", "twistor-report",
            "nk-analyze", "cartan-embed", "nc-space")

DEFAULT_MODEL = {
    "mc-check": None,
    "pluriharmonic-check": "complexified-su:1:1",
    "associated-family-check": "complexified-su:1:1",
    "twistor-report": "s2n-twistor:2",
    "nk-analyze": "s2n-twistor:2",
    "cartan-embed": None,
    "nc-space": None,
}

DEFAULT_TOLERANCES = {
    "residual": "1e-8",
    "identity": "1e-10",
    "inclusion": "1e-12",
    "nonzero": "1e-3",
    "slope_band": "0.3",
    "floor": "1e-11",
}

FD_KEYS = ("step", "study_step", "levels")
TOP_KEYS = ("schema", "command", "model", "framing", "fd", "tolerances", "seed", "grid", "params", "output")


class SceneError(ValueError):
    def __init__(self, message: str, field_path: str | None = None, line: int | None = None):
        super().__init__(message)
        self.field_path = field_path
        self.line = line


@dataclass
class SceneConfig:
    command: str
    model: str | None = None
    framing: dict | None = None          # normalized framing description
    fd: dict = field(default_factory=lambda: {"step": "1e-4", "study_step": "2e-3", "levels": 3})
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    grid: int = 25
    params: dict = field(default_factory=dict)
    output: str = "json"

    def tol(self, key: str) -> float:
        return float(self.tolerances[key])

    def build_framing(self) -> Framing | None:
        if self.framing is None:
            return None
        return framing_from_spec(self.framing, "framing")

    def to_dict(self) -> dict:
        """Canonical form used for hashing; the output mode is not part of it."""
        return {
            "schema": SCENE_SCHEMA,
            "command": self.command,
            "model": self.model,
            "framing": self.framing,
            "fd": dict(self.fd),
            "tolerances": dict(sorted(self.tolerances.items())),
            "seed": self.seed,
            "grid": self.grid,
            "params": self.params,
        }

    def hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


# helpers -------------------------------------------------------------------------

def _decimal_str(x, path: str) -> str:
    if isinstance(x, bool):
        raise SceneError("expected a number or decimal string", path)
    if isinstance(x, float):
        x = repr(x)
    try:
        d = Decimal(str(x))
    except InvalidOperation:
        raise SceneError(f"not a decimal number: {x!r}", path) from None
    if not d.is_finite():
        raise SceneError("number must be finite", path)
    return str(x)


def _int(x, path: str, minimum: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SceneError("expected an integer", path)
    if minimum is not None and x < minimum:
        raise SceneError(f"must be >= {minimum}", path)
    return x


def named_matrix(name: str, dim: int, path: str) -> np.ndarray:
    """``E{i}{j}`` (elementary, 1-based) or ``H{k}`` (``E_kk - E_{k+1,k+1}``)."""
    try:
        if name.startswith("E") and len(name) == 3:
            i, j = int(name[1]) - 1, int(name[2]) - 1
            if 0 <= i < dim and 0 <= j < dim:
                M = np.zeros((dim, dim), dtype=complex)
                M[i, j] = 1
                return M
        if name.startswith("H"):
            k = int(name[1:]) - 1
            if 0 <= k < dim - 1:
                M = np.zeros((dim, dim), dtype=complex)
                M[k, k], M[k + 1, k + 1] = 1, -1
                return M
    except ValueError:
        pass
    raise SceneError(f"unknown matrix name {name!r} for dimension {dim}", path)


def _term_spec(t, dim: int, k: int, path: str) -> dict:
    if not isinstance(t, dict):
        raise SceneError("term must be an object", path)
    unknown = set(t) - {"matrix", "coeff", "z", "zbar"}
    if unknown:
        raise SceneError(f"unknown term keys {sorted(unknown)}", path)
    if "matrix" not in t:
        raise SceneError("missing field", f"{path}.matrix")
    mat = t["matrix"]
    if isinstance(mat, str):
        named_matrix(mat, dim, f"{path}.matrix")
        mspec = mat
    else:
        if not isinstance(mat, list) or len(mat) != dim or any(not isinstance(r, list) or len(r) != dim for r in mat):
            raise SceneError(f"matrix must be {dim}x{dim}", f"{path}.matrix")
        mspec = [[_entry(e, f"{path}.matrix[{a}][{b}]") for b, e in enumerate(r)] for a, r in enumerate(mat)]
    coeff = _entry(t.get("coeff", ["1", "0"]), f"{path}.coeff")
    z = t.get("z")
    if not isinstance(z, list) or len(z) != k:
        raise SceneError(f"exponent list of length {k} required", f"{path}.z")
    zbar = t.get("zbar", [0] * k)
    if not isinstance(zbar, list) or len(zbar) != k:
        raise SceneError(f"exponent list of length {k} required", f"{path}.zbar")
    z = [_int(a, f"{path}.z[{i}]", 0) for i, a in enumerate(z)]
    zbar = [_int(a, f"{path}.zbar[{i}]", 0) for i, a in enumerate(zbar)]
    return {"matrix": mspec, "coeff": coeff, "z": z, "zbar": zbar}


def _entry(e, path: str) -> list[str]:
    if isinstance(e, list):
        if len(e) != 2:
            raise SceneError("complex value must be [re, im]", path)
        return [_decimal_str(e[0], path + "[0]"), _decimal_str(e[1], path + "[1]")]
    return [_decimal_str(e, path), "0"]


def normalize_framing(spec, path: str = "framing") -> dict:
    if not isinstance(spec, dict):
        raise SceneError("framing must be an object", path)
    if "preset" in spec:
        preset = spec["preset"]
        if preset == "borel":
            p = _int(spec.get("p", 1), f"{path}.p", 0)
            q = _int(spec.get("q", 1), f"{path}.q", 0)
            if p + q < 2:
                raise SceneError("Borel framing needs p + q >= 2", path)
            out = {"preset": "borel", "p": p, "q": q}
            if "coefficients" in spec:
                cs = spec["coefficients"]
                if not isinstance(cs, list):
                    raise SceneError("coefficients must be a list", f"{path}.coefficients")
                out["coefficients"] = [_entry(c, f"{path}.coefficients[{i}]") for i, c in enumerate(cs)]
            return out
        if preset == "exp":
            out = {"preset": "exp", "dim": _int(spec.get("dim", 2), f"{path}.dim", 2)}
            for key in ("X", "Y"):
                if key in spec:
                    named_matrix(spec[key], out["dim"], f"{path}.{key}")
                    out[key] = spec[key]
            if "X" not in out:
                raise SceneError("missing field", f"{path}.X")
            return out
        raise SceneError(f"unknown preset {preset!r}", f"{path}.preset")
    for key in ("dim", "chart_dim"):
        if key not in spec:
            raise SceneError("missing field", f"{path}.{key}")
    dim = _int(spec["dim"], f"{path}.dim", 1)
    k = _int(spec["chart_dim"], f"{path}.chart_dim", 1)
    out = {"group": str(spec.get("group", "SL")), "dim": dim, "chart_dim": k}
    for key in ("exp_terms", "unipotent_terms"):
        terms = spec.get(key, [])
        if not isinstance(terms, list):
            raise SceneError("must be a list", f"{path}.{key}")
        out[key] = [_term_spec(t, dim, k, f"{path}.{key}[{i}]") for i, t in enumerate(terms)]
    return out


def _matrix_from_spec(m, dim: int, path: str):
    if isinstance(m, str):
        return named_matrix(m, dim, path)
    return [[(Decimal(re), Decimal(im)) for re, im in row] for row in m]


def framing_from_spec(spec: dict, path: str = "framing") -> Framing:
    try:
        if spec.get("preset") == "borel":
            cs = spec.get("coefficients")
            coeffs = None if cs is None else [(Decimal(a), Decimal(b)) for a, b in cs]
            return borel_framing(spec["p"], spec["q"], coeffs)
        if spec.get("preset") == "exp":
            dim = spec["dim"]
            X = named_matrix(spec["X"], dim, f"{path}.X")
            Y = named_matrix(spec["Y"], dim, f"{path}.Y") if "Y" in spec else None
            terms = [Term.make(X, 1, (1,), (0,))]
            if Y is not None:
                terms.append(Term.make(Y, 1, (0,), (1,)))
            return Framing(1, dim, tuple(terms), (), "SL")
        dim, k = spec["dim"], spec["chart_dim"]

        def mk(t, i, key):
            M = _matrix_from_spec(t["matrix"], dim, f"{path}.{key}[{i}].matrix")
            return Term.make(M, tuple(Decimal(c) for c in t["coeff"]), t["z"], t["zbar"])

        return Framing(k, dim,
                       tuple(mk(t, i, "exp_terms") for i, t in enumerate(spec.get("exp_terms", []))),
                       tuple(mk(t, i, "unipotent_terms") for i, t in enumerate(spec.get("unipotent_terms", []))),
                       spec.get("group", "SL"))
    except FramingError as exc:
        raise SceneError(f"unconstructible framing: {exc}", path) from None


# parsing ----------------------------------------------------------------------------

def _locate(text: str | None, path: str | None) -> int | None:
    if not text or not path:
        return None
    key = path.split(".")[-1].split("[")[0]
    for n, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return n
    return None


def parse_scene(source, text: str | None = None) -> SceneConfig:
    """Validate a scene given as a JSON string or an already decoded object."""
    if isinstance(source, str):
        text = source
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise SceneError(f"invalid JSON: {exc.msg}", None, exc.lineno) from None
    try:
        return _parse(source)
    except SceneError as exc:
        if exc.line is None:
            exc.line = _locate(text, exc.field_path)
        raise


def _parse(d) -> SceneConfig:
    if not isinstance(d, dict):
        raise SceneError("scene must be a JSON object")
    if d.get("schema") != SCENE_SCHEMA:
        raise SceneError(f"schema must be {SCENE_SCHEMA!r}", "schema")
    unknown = set(d) - set(TOP_KEYS)
    if unknown:
        raise SceneError(f"unknown fields {sorted(unknown)}", sorted(unknown)[0])
    if "command" not in d:
        raise SceneError("missing field", "command")
    cmd = d["command"]
    if cmd not in COMMANDS:
        raise SceneError(f"unknown command {cmd!r}", "command")
    cfg = SceneConfig(cmd)
    needs_model = cmd in ("pluriharmonic-check", "twistor-report", "nk-analyze")
    if "model" in d:
        if d["model"] is not None and not isinstance(d["model"], str):
            raise SceneError("model must be a descriptor string", "model")
        cfg.model = d["model"]
    elif needs_model:
        raise SceneError("missing field", "model")
    if cfg.model is not None:
        from .homogeneous import ModelError, build_model
        try:
            build_model(cfg.model)
        except ModelError as exc:
            raise SceneError(f"unknown model: {exc}", "model") from None
    if "framing" in d and d["framing"] is not None:
        cfg.framing = normalize_framing(d["framing"])
        framing_from_spec(cfg.framing)
    elif cmd in ("mc-check", "pluriharmonic-check"):
        raise SceneError("missing field", "framing")
    fd = d.get("fd", {})
    if not isinstance(fd, dict) or set(fd) - set(FD_KEYS):
        raise SceneError(f"fd must be an object with keys {FD_KEYS}", "fd")
    for key in ("step", "study_step"):
        if key in fd:
            cfg.fd[key] = _decimal_str(fd[key], f"fd.{key}")
            if not float(cfg.fd[key]) > 0:
                raise SceneError("must be positive", f"fd.{key}")
    if "levels" in fd:
        cfg.fd["levels"] = _int(fd["levels"], "fd.levels", 2)
    tols = d.get("tolerances", {})
    if not isinstance(tols, dict):
        raise SceneError("tolerances must be an object", "tolerances")
    for key, v in tols.items():
        if key not in DEFAULT_TOLERANCES:
            raise SceneError(f"unknown tolerance {key!r}", f"tolerances.{key}")
        cfg.tolerances[key] = _decimal_str(v, f"tolerances.{key}")
    if "seed" in d:
        cfg.seed = _int(d["seed"], "seed", 0)
    if "grid" in d:
        cfg.grid = _int(d["grid"], "grid", 1)
    params = d.get("params", {})
    if not isinstance(params, dict):
        raise SceneError("params must be an object", "params")
    cfg.params = params
    if "output" in d:
        if d["output"] not in ("json", "text"):
            raise SceneError("output must be 'json' or 'text'", "output")
        cfg.output = d["output"]
    return cfg


def default_scene(command: str) -> SceneConfig:
    """Scene used when a subcommand is run without ``--scene``."""
    if command not in COMMANDS:
        raise SceneError(f"unknown command {command!r}", "command")
    cfg = SceneConfig(command, DEFAULT_MODEL[command])
    if command in ("mc-check", "pluriharmonic-check", "associated-family-check"):
        cfg.framing = {"preset": "borel", "p": 1, "q": 1}
    return cfg
