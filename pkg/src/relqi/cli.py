"""Command-line front end.

Commands::

    relqi transform     --field em --rapidity 1 --axis z --momentum 0 0 1
    relqi interfere     --hamiltonian H.json --input 0,1
    relqi twin-photon   --rapidity 1 --axis z
    relqi twin-electron --rotate 0.7:x --mass 1
    relqi sweep         --experiment twin-photon --count 20 --seed 7

Transforms are built from ``--boost ETA:AXIS`` and ``--rotate THETA:AXIS``
steps applied in the order given (first flag acts first); ``--rapidity``/
``--axis`` and ``--angle``/``--rot-axis`` add one step each (rotation
first). Axes are ``x``, ``y``, ``z``, ``-z`` or ``a,b,c``. Output is JSON
(complex numbers as ``[re, im]``) or CSV. Exit status: 0 success,
1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as SchemaError

from .errors import NumericalError, RelqiError, ValidationError
from .experiments import random_boosts, random_lorentz, twin_electron, twin_photon
from .fields import FIELD_KINDS, PolarizationBasis, mode_transform
from .fock import CreationPolynomial, DetectionStatistics, number_statistics, prepare
from .interferometer import BosonicBilinearH, FermionicBilinearH, evolve, heisenberg_transform
from .lorentz import FourVector, LorentzTransform, boost, compose, identity, mass_shell, rotation, unit_axis
from .modes import BogoliubovMap, ModeLabel

GENERATOR = "numpy.random.PCG64"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class Step(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["boost", "rotation"]
    value: float
    axis: str | list[float] = "z"


class HamiltonianSpec(BaseModel):
    """``{"modes": n, "species": "boson", "A": [[...]], "B": [[...]]}``; entries are numbers or ``[re, im]``."""

    model_config = ConfigDict(extra="forbid")

    modes: int = Field(ge=1, le=6)
    species: Literal["boson", "fermion"] = "boson"
    A: list | None = None
    B: list | None = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["transform", "interfere", "twin-photon", "twin-electron", "sweep"]
    field: Literal["scalar", "vector", "em", "dirac", "antidirac"] = "em"
    momentum: list[float] | None = None
    momentum2: list[float] | None = None
    mass: float | None = None
    steps: list[Step] = []
    identity: bool = False
    boost_only: bool = False
    translation: list[float] | None = None
    cutoff: int = Field(default=4, ge=1, le=40)
    format: Literal["json", "csv"] = "json"
    seed: int = 0
    count: int = Field(default=20, ge=0)
    max_rapidity: float = Field(default=2.0, ge=0.0, le=20.0)
    family: Literal["boosts", "mixed"] = "boosts"
    experiment: Literal["twin-photon", "twin-electron"] = "twin-photon"
    spin: int = 1
    polarization: int = 0
    hamiltonian: HamiltonianSpec | None = None
    input: list[list[int]] = [[0, 1]]
    tolerance: float = 1e-9
    workers: int = Field(default=1, ge=1, le=64)

    @field_validator("momentum", "momentum2")
    @classmethod
    def _three(cls, v):
        if v is not None and len(v) != 3:
            raise ValueError("momentum needs three components")
        return v

    @field_validator("translation")
    @classmethod
    def _four(cls, v):
        if v is not None and len(v) != 4:
            raise ValueError("translation needs four components")
        return v


# -- serialisation ---------------------------------------------------------------


def to_jsonable(obj):
    """Convert numpy/relqi objects to plain JSON types; complex -> [re, im]."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if np.isfinite(value):
            return value
        return "nan" if np.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(obj, FourVector):
        return to_jsonable(obj.array)
    if isinstance(obj, LorentzTransform):
        return to_jsonable(obj.matrix)
    if isinstance(obj, PolarizationBasis):
        return {"kind": obj.kind, "vectors": to_jsonable(obj.vectors)}
    if isinstance(obj, DetectionStatistics):
        return stats_to_jsonable(obj)
    if isinstance(obj, ModeLabel):
        return repr(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def stats_to_jsonable(stats: DetectionStatistics) -> dict:
    return {
        "detectors": [list(g) for g in stats.detectors],
        "outcomes": [{"pattern": list(k), "probability": v} for k, v in stats.outcomes.items()],
    }


def dumps(payload: dict) -> str:
    # repr-based float output round-trips every double exactly
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def complex_matrix(data) -> np.ndarray:
    """Parse nested lists whose leaves are numbers or ``[re, im]`` pairs."""
    def leaf(z):
        if isinstance(z, (list, tuple)) and len(z) == 2:
            return complex(float(z[0]), float(z[1]))
        return complex(float(z))

    try:
        arr = np.array([[leaf(z) for z in row] for row in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError("matrix must be a 2D array of numbers or [re, im] pairs") from exc
    if arr.ndim != 2:
        raise ValidationError("matrix must be a 2D array of numbers or [re, im] pairs")
    return arr


def _csv_matrix(rows, name, matrix):
    for i, row in enumerate(np.atleast_2d(matrix)):
        for j, v in enumerate(row):
            rows.append([name, i, j, repr(float(np.real(v))), repr(float(np.imag(v)))])


def _csv_stats(rows, name, stats):
    for pattern, p in stats.outcomes.items():
        rows.append([name, " ".join(map(str, pattern)), "", repr(float(p)), ""])


def _to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["item", "i", "j", "re", "im"])
    writer.writerows(rows)
    return buf.getvalue()


# -- building blocks ---------------------------------------------------------------


def _axis(value):
    if isinstance(value, str) and "," in value:
        value = [float(x) for x in value.split(",")]
    if not isinstance(value, str):
        v = np.asarray(value, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("axis must be non-zero")
        value = v / n
    return unit_axis(value)


def build_transform(cfg: RunConfig) -> LorentzTransform:
    if cfg.identity:
        if cfg.steps:
            raise ValidationError("--identity cannot be combined with boost/rotation steps")
        return identity()
    lam = identity()
    for step in cfg.steps:
        if step.kind == "rotation" and cfg.boost_only:
            raise ValidationError("--boost-only forbids rotation steps")
        g = boost(step.value, _axis(step.axis)) if step.kind == "boost" else rotation(step.value, _axis(step.axis))
        lam = compose(g, lam)
    return lam


def _translation(cfg):
    return None if cfg.translation is None else FourVector.from_array(cfg.translation)


def _mass(cfg, default):
    return default if cfg.mass is None else cfg.mass


def _run_transform(cfg: RunConfig):
    lam = build_transform(cfg)
    massive = cfg.field in ("vector", "dirac", "antidirac")
    m = _mass(cfg, 1.0 if massive else 0.0)
    p = cfg.momentum if cfg.momentum is not None else ([0.0, 0.0, 0.0] if massive else [0.0, 0.0, 1.0])
    k = mass_shell(m, p)
    mt = mode_transform(cfg.field, lam, k, m, _translation(cfg))
    payload = {
        "command": "transform",
        "field": cfg.field,
        "mass": m,
        "lambda": lam,
        "momentum": k,
        "target_momentum": mt.target_momentum,
        "matrix": mt.matrix,
        "phase": mt.phase,
        "raw": mt.raw,
        "raw_deviation": mt.raw_deviation,
        "unitarity_deviation": mt.unitarity_deviation,
        "diagnostics": mt.diagnostics,
    }
    rows = []
    _csv_matrix(rows, "matrix", mt.matrix)
    _csv_matrix(rows, "phase", [[mt.phase]])
    if mt.raw is not None:
        _csv_matrix(rows, "raw", mt.raw)
    return EXIT_OK, payload, rows


def _run_interfere(cfg: RunConfig):
    spec = cfg.hamiltonian or HamiltonianSpec(modes=2, B=[[0, [0, np.pi / 4]], [[0, -np.pi / 4], 0]])
    n = spec.modes
    species = spec.species
    modes = tuple(ModeLabel(None, 0, species, port=i) for i in range(n))
    a = None if spec.A is None else complex_matrix(spec.A)
    b = None if spec.B is None else complex_matrix(spec.B)
    if species == "boson":
        h = BosonicBilinearH(a, b, modes)
    else:
        h = FermionicBilinearH(a, b, modes, strict_blocks=False)
    if any(not 0 <= i < n for term in cfg.input for i in term):
        raise ValidationError("input refers to a mode outside the Hamiltonian")
    poly = CreationPolynomial(tuple((1.0 + 0j, tuple(term)) for term in cfg.input))
    state = prepare(poly, modes, cfg.cutoff)
    if state.norm == 0:
        raise ValidationError("input state is the zero vector")
    out = evolve(state, h)
    if out.truncation_loss > 1e-6:
        raise NumericalError(f"truncation lost {out.truncation_loss:.3g} of the norm; raise --cutoff")
    stats = number_statistics(out)
    kmap = heisenberg_transform(h)
    payload = {
        "command": "interfere",
        "species": species,
        "cutoff": cfg.cutoff,
        "statistics": stats,
        "alpha": kmap.alpha,
        "beta": kmap.beta,
        "map_deviation": kmap.max_deviation(),
        "truncation_loss": out.truncation_loss,
    }
    rows = []
    _csv_stats(rows, "probability", stats)
    _csv_matrix(rows, "alpha", kmap.alpha)
    _csv_matrix(rows, "beta", kmap.beta)
    return EXIT_OK, payload, rows


def _photon_momenta(cfg):
    p1 = cfg.momentum if cfg.momentum is not None else [0.0, 0.0, 1.0]
    p2 = cfg.momentum2 if cfg.momentum2 is not None else p1
    return mass_shell(0.0, p1), mass_shell(0.0, p2)


def _electron_args(cfg):
    m = _mass(cfg, 1.0)
    p1 = cfg.momentum if cfg.momentum is not None else [0.0, 0.0, 0.0]
    p2 = cfg.momentum2 if cfg.momentum2 is not None else p1
    return mass_shell(m, p1), mass_shell(m, p2), m


def _experiment(cfg: RunConfig, name: str):
    ell = _translation(cfg)
    if name == "twin-photon":
        k1, k2 = _photon_momenta(cfg)
        return lambda lam: twin_photon(k1, k2, lam, cfg.polarization, ell, cfg.tolerance)
    k1, k2, m = _electron_args(cfg)
    return lambda lam: twin_electron(k1, k2, m, cfg.spin, lam, ell, cfg.tolerance)


def _report_payload(report) -> dict:
    return {
        "rest_frame_stats": report.rest_frame_stats,
        "boosted_frame_stats": report.boosted_frame_stats,
        "max_discrepancy": report.max_discrepancy,
        "tolerance": report.tolerance,
        "verdict": report.verdict,
        "field_diagnostics": report.field_diagnostics,
        "extras": report.extras,
    }


def _run_experiment(cfg: RunConfig):
    lam = build_transform(cfg)
    report = _experiment(cfg, cfg.command)(lam)
    payload = {"command": cfg.command, "lambda": lam, **_report_payload(report)}
    rows = []
    _csv_stats(rows, "rest", report.rest_frame_stats)
    _csv_stats(rows, "boosted", report.boosted_frame_stats)
    rows.append(["max_discrepancy", "", "", repr(report.max_discrepancy), ""])
    return (EXIT_OK if report.passed else EXIT_NUMERICAL), payload, rows


def _run_sweep(cfg: RunConfig):
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    if cfg.family == "boosts":
        family = random_boosts(cfg.count, rng, cfg.max_rapidity)
    else:
        family = random_lorentz(cfg.count, rng, cfg.max_rapidity)
    run_one = _experiment(cfg, cfg.experiment)
    if cfg.workers > 1 and len(family) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(run_one, family))
    else:
        reports = [run_one(lam) for lam in family]
    worst = max((r.max_discrepancy for r in reports), default=0.0)
    passed = worst < cfg.tolerance and all(r.passed for r in reports)
    payload = {
        "command": "sweep",
        "experiment": cfg.experiment,
        "family": cfg.family,
        "generator": GENERATOR,
        "seed": cfg.seed,
        "count": cfg.count,
        "max_discrepancy": worst,
        "tolerance": cfg.tolerance,
        "verdict": "pass" if passed else "fail",
        "cases": [{"index": i, "lambda": lam, "max_discrepancy": r.max_discrepancy, "verdict": r.verdict}
                  for i, (lam, r) in enumerate(zip(family, reports))],
    }
    rows = [["case", i, "", repr(r.max_discrepancy), r.verdict] for i, r in enumerate(reports)]
    return (EXIT_OK if passed else EXIT_NUMERICAL), payload, rows


_RUNNERS = {
    "transform": _run_transform,
    "interfere": _run_interfere,
    "twin-photon": _run_experiment,
    "twin-electron": _run_experiment,
    "sweep": _run_sweep,
}


def run(config: RunConfig | dict) -> tuple[int, str]:
    """Execute one configuration; returns ``(exit_status, serialised_output)``."""
    try:
        cfg = config if isinstance(config, RunConfig) else RunConfig.model_validate(config)
        status, payload, rows = _RUNNERS[cfg.command](cfg)
    except SchemaError as exc:
        return EXIT_INVALID, dumps({"error": "validation", "message": str(exc)})
    except ValidationError as exc:
        return EXIT_INVALID, dumps({"error": "validation", "type": type(exc).__name__, "message": str(exc)})
    except NumericalError as exc:
        return EXIT_NUMERICAL, dumps({"error": "numerical", "type": type(exc).__name__, "message": str(exc)})
    if cfg.format == "csv":
        return status, _to_csv(rows)
    return status, dumps(payload)


# -- round trip ----------------------------------------------------------------------


def load_output(text: str, tol: float = 1e-9) -> dict:
    """Parse JSON output and re-check the invariants of every emitted object.

    Transform matrices must be unitary, Heisenberg maps canonical and
    statistics normalised, each within ``tol``; violations raise
    ValidationError.
    """
    data = json.loads(text)
    cmd = data.get("command")
    if cmd == "transform":
        m = complex_matrix(data["matrix"])
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > tol:
            raise ValidationError("emitted transform is not unitary")
        if data["field"] not in FIELD_KINDS:
            raise ValidationError("unknown field kind in output")
        LorentzTransform(np.asarray(data["lambda"]))
    if cmd == "interfere":
        a, b = complex_matrix(data["alpha"]), complex_matrix(data["beta"])
        n = a.shape[0]
        modes = tuple(ModeLabel(None, 0, data["species"], port=i) for i in range(n))
        if not BogoliubovMap(a, b, data["species"], modes).is_canonical(tol):
            raise ValidationError("emitted map is not canonical")
    for key in ("statistics", "rest_frame_stats", "boosted_frame_stats"):
        if key in data:
            probs = [o["probability"] for o in data[key]["outcomes"]]
            if abs(sum(probs) - 1.0) > tol or min(probs, default=0.0) < -tol:
                raise ValidationError(f"{key} is not a probability distribution")
    if "lambda" in data and cmd != "sweep":
        LorentzTransform(np.asarray(data["lambda"]))
    return data


# -- argument parsing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _step(kind):
    def parse(text):
        value, _, axis = text.partition(":")
        try:
            return {"kind": kind, "value": float(value), "axis": axis or "z"}
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected VALUE:AXIS, got {text!r}") from exc

    return parse


def _input_term(text):
    return [int(x) for x in text.split(",") if x != ""]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relqi", description="Relativistic mode transforms and Fock-space interferometry.")
    p.add_argument("command", nargs="?", choices=list(_RUNNERS))
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--field", choices=FIELD_KINDS)
    p.add_argument("--identity", action="store_true", default=None)
    p.add_argument("--boost", dest="steps", action="append", type=_step("boost"), metavar="ETA:AXIS")
    p.add_argument("--rotate", dest="steps", action="append", type=_step("rotation"), metavar="THETA:AXIS")
    p.add_argument("--rapidity", type=float)
    p.add_argument("--axis", default=None)
    p.add_argument("--angle", type=float)
    p.add_argument("--rot-axis", default=None)
    p.add_argument("--boost-only", action="store_true", default=None)
    p.add_argument("--momentum", nargs=3, type=float)
    p.add_argument("--momentum2", nargs=3, type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--translation", nargs=4, type=float)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--max-rapidity", type=float)
    p.add_argument("--family", choices=["boosts", "mixed"])
    p.add_argument("--experiment", choices=["twin-photon", "twin-electron"])
    p.add_argument("--spin", type=int)
    p.add_argument("--polarization", type=int)
    p.add_argument("--hamiltonian", help="JSON file {modes, species, A, B}")
    p.add_argument("--input", action="append", type=_input_term, metavar="I,J,...",
                   help="creation monomial (mode indices); repeat to add terms")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--workers", type=int)
    return p


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    data: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data.update(json.load(fh))
    if args.command:
        data["command"] = args.command
    steps = list(data.get("steps", []))
    if args.angle is not None:
        steps.append({"kind": "rotation", "value": args.angle, "axis": args.rot_axis or "z"})
    if args.rapidity is not None:
        steps.append({"kind": "boost", "value": args.rapidity, "axis": args.axis or "z"})
    steps.extend(args.steps or [])
    if steps:
        data["steps"] = steps
    if args.hamiltonian:
        with open(args.hamiltonian, encoding="utf-8") as fh:
            data["hamiltonian"] = json.load(fh)
    simple = ("field", "identity", "boost_only", "momentum", "momentum2", "mass", "translation", "cutoff",
              "format", "seed", "count", "max_rapidity", "family", "experiment", "spin", "polarization",
              "input", "tolerance", "workers")
    for name in simple:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    return RunConfig.model_validate(data)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out_path = None
    try:
        cfg = config_from_args(argv)
        out_path = build_parser().parse_args(argv).out
        status, text = run(cfg)
    except (SchemaError, ValidationError, OSError, json.JSONDecodeError) as exc:
        status, text = EXIT_INVALID, dumps({"error": "validation", "message": str(exc)})
    except RelqiError as exc:
        status, text = EXIT_NUMERICAL, dumps({"error": "numerical", "message": str(exc)})
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
