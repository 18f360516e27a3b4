"""Run-configuration schema: strict validation and object construction.

Configurations are plain JSON. Validation is whitelist-based: any unknown key
anywhere in the tree is rejected, so typos fail loudly before any file is
written.
"""

import json

import numpy as np

from .energy import (EngineeringParams, EnergyCoefficients,
                     coefficients_drill_free, coefficients_pietraszkiewicz)
from .errors import ConfigInvalid
from .fields import ScalarField, Term, VectorField
from .geometry import catalog_chart

CHART_KINDS = ("plate", "cylinder", "sphere", "graph")
MODEL_KINDS = ("coefficients", "pietraszkiewicz", "drill_free", "reduced",
               "drill_free_full")
REDUCED_FORMS = ("phi", "psi_tr", "psi_dev")
EDGES = ("x1min", "x1max", "x2min", "x2max")


def _require(cond, msg):
    if not cond:
        raise ConfigInvalid(msg)


def _check_keys(obj, allowed, where):
    _require(isinstance(obj, dict), f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    _require(not unknown, f"{where}: unknown keys {sorted(unknown)}")


def _number(v, where):
    _require(isinstance(v, (int, float)) and not isinstance(v, bool)
             and np.isfinite(v), f"{where}: expected a finite number")
    return float(v)


def build_scalar_field(spec, where="scalar field"):
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return ScalarField.constant(float(spec))
    _check_keys(spec, ("terms", "const"), where)
    if "const" in spec:
        _require("terms" not in spec, f"{where}: const and terms are exclusive")
        return ScalarField.constant(_number(spec["const"], where))
    terms = []
    _require(isinstance(spec.get("terms"), list), f"{where}: terms must be a list")
    for k, t in enumerate(spec["terms"]):
        tw = f"{where}.terms[{k}]"
        _check_keys(t, ("coef", "powers", "trig"), tw)
        coef = _number(t.get("coef", 0.0), tw + ".coef")
        powers = t.get("powers", [0, 0])
        _require(isinstance(powers, list) and len(powers) == 2
                 and all(isinstance(p, int) and p >= 0 for p in powers),
                 tw + ".powers: expected two non-negative integers")
        trig = None
        if t.get("trig") is not None:
            tt = t["trig"]
            _check_keys(tt, ("fn", "k", "phase"), tw + ".trig")
            _require(tt.get("fn") in ("sin", "cos"),
                     tw + ".trig.fn must be sin or cos")
            kvec = tt.get("k", [0.0, 0.0])
            _require(isinstance(kvec, list) and len(kvec) == 2,
                     tw + ".trig.k: expected two numbers")
            trig = (tt["fn"], _number(kvec[0], tw), _number(kvec[1], tw),
                    _number(tt.get("phase", 0.0), tw))
        terms.append(Term(coef, tuple(powers), trig))
    return ScalarField(tuple(terms))


def build_vector_field(spec, where="vector field"):
    _check_keys(spec, ("components", "const"), where)
    if "const" in spec:
        v = spec["const"]
        _require(isinstance(v, list) and len(v) == 3,
                 f"{where}.const: expected three numbers")
        return VectorField.constant([_number(c, where) for c in v])
    comps = spec.get("components")
    _require(isinstance(comps, list) and len(comps) == 3,
             f"{where}.components: expected three scalar fields")
    return VectorField(tuple(build_scalar_field(c, f"{where}.components[{k}]")
                             for k, c in enumerate(comps)))


def build_chart(spec, where="chart"):
    _check_keys(spec, ("kind", "radius", "height", "extent", "mode",
                       "fd_step"), where)
    kind = spec.get("kind")
    _require(kind in CHART_KINDS, f"{where}.kind must be one of {CHART_KINDS}")
    kw = {}
    if "extent" in spec:
        ext = spec["extent"]
        _require(isinstance(ext, list) and len(ext) == 2
                 and all(isinstance(r, list) and len(r) == 2 for r in ext),
                 f"{where}.extent: expected [[a,b],[c,d]]")
        kw["extent"] = [[_number(v, where) for v in r] for r in ext]
    mode = spec.get("mode", "analytic")
    _require(mode in ("analytic", "fd"), f"{where}.mode must be analytic|fd")
    fd_step = spec.get("fd_step")
    if fd_step is not None:
        fd_step = _number(fd_step, f"{where}.fd_step")
    if kind in ("cylinder", "sphere"):
        kw["radius"] = _number(spec.get("radius", 1.0), f"{where}.radius")
    else:
        _require("radius" not in spec, f"{where}: radius not valid for {kind}")
    if kind == "graph":
        _require("height" in spec, f"{where}: graph chart needs height")
        kw["height"] = build_scalar_field(spec["height"], f"{where}.height")
    else:
        _require("height" not in spec, f"{where}: height only valid for graph")
    return catalog_chart(kind, mode=mode, fd_step=fd_step, **kw)


def build_model(spec, where="model"):
    """Returns (description dict, coefficients or None, params or None, form)."""
    _check_keys(spec, ("kind", "alpha", "beta", "E", "nu", "h", "alpha_s",
                       "alpha_t", "kappa", "form"), where)
    kind = spec.get("kind")
    _require(kind in MODEL_KINDS, f"{where}.kind must be one of {MODEL_KINDS}")
    if kind == "coefficients":
        for key in ("alpha", "beta"):
            v = spec.get(key)
            _require(isinstance(v, list) and len(v) == 4,
                     f"{where}.{key}: expected four numbers")
        coeff = EnergyCoefficients(
            alpha=tuple(_number(v, where) for v in spec["alpha"]),
            beta=tuple(_number(v, where) for v in spec["beta"]))
        return {"kind": kind}, coeff, None, None
    for key in ("E", "nu", "h"):
        _require(key in spec, f"{where}: {kind} model needs {key}")
    kwargs = {"E": _number(spec["E"], where), "nu": _number(spec["nu"], where),
              "h": _number(spec["h"], where)}
    for opt in ("alpha_s", "alpha_t", "kappa"):
        if opt in spec:
            kwargs[opt] = _number(spec[opt], where)
    try:
        params = EngineeringParams(**kwargs)
    except ValueError as exc:
        raise ConfigInvalid(f"{where}: {exc}") from exc
    form = spec.get("form", "psi_dev")
    _require(form in REDUCED_FORMS, f"{where}.form must be one of {REDUCED_FORMS}")
    if kind == "pietraszkiewicz":
        return {"kind": kind}, coefficients_pietraszkiewicz(params), params, None
    if kind == "drill_free":
        return {"kind": kind}, coefficients_drill_free(params), params, None
    return {"kind": kind, "form": form}, None, params, form


def build_state_fields(spec, where="state"):
    _check_keys(spec, ("displacement", "rotation"), where)
    u = (build_vector_field(spec["displacement"], f"{where}.displacement")
         if "displacement" in spec else VectorField.zero())
    v = (build_vector_field(spec["rotation"], f"{where}.rotation")
         if "rotation" in spec else VectorField.zero())
    return u, v


def _grid(spec, where, default=(5, 5)):
    if spec is None:
        return default
    _require(isinstance(spec, list) and len(spec) == 2
             and all(isinstance(n, int) and n >= 2 for n in spec),
             f"{where}: expected two integers >= 2")
    return tuple(spec)


VERB_KEYS = {
    "geometry": ("chart", "seed", "grid", "tolerances"),
    "measures": ("chart", "seed", "state", "grid", "tolerances"),
    "check-invariance": ("chart", "seed", "models", "samples",
                         "state_amplitude", "drill_amplitude", "expect",
                         "tolerances"),
    "check-integrals": ("chart", "seed", "samples", "steps",
                        "state_amplitude", "tolerances"),
    "energy": ("chart", "seed", "model", "state", "grid", "tolerances"),
    "linearize": ("chart", "seed", "samples", "epsilons", "amplitude",
                  "tolerances"),
    "minimize": ("chart", "seed", "mesh", "model", "loads", "dirichlet",
                 "solver", "tolerances"),
    "spectrum": ("chart", "seed", "model", "expect_zero", "tolerances"),
}

SOLVER_KEYS = ("gtol", "maxiter", "memory", "gradient")


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    _require(isinstance(data, dict), "config root must be an object")
    return data


def validate_verb_config(verb, data):
    _require(verb in VERB_KEYS, f"unknown verb {verb!r}")
    _check_keys(data, VERB_KEYS[verb], "config")
    _require("chart" in data, "config: chart section is required")
    if "seed" in data:
        _require(isinstance(data["seed"], int) and 0 <= data["seed"] < 2 ** 64,
                 "config.seed: expected a 64-bit unsigned integer")
    if "tolerances" in data:
        _check_keys(data["tolerances"],
                    ("frame", "identity", "invariance", "drift",
                     "return_error", "defect", "gradient", "zero_eig",
                     "ratio_low", "ratio_high"), "config.tolerances")
        for k, v in data["tolerances"].items():
            _number(v, f"config.tolerances.{k}")
    return data
