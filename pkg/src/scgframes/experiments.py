"""Experiment configurations: loading, validation, execution and fixtures."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import __version__, engine, fiberization as fib, fixtures, identities, oracles, perturbation
from .core import GOperatorFamily, SubsetMask, family_from_dict, family_to_dict, validate_family
from .errors import ConfigError, FrameError
from .reports import to_jsonable

KINDS = ("FrameAnalysis", "IdentitySuite", "PerturbationStudy", "FiberizationDemo")
DEFAULT_TOL = 1e-9


def load_schema() -> dict:
    text = resources.files("scgframes").joinpath("schema/config.schema.json").read_text()
    return json.loads(text)


def _path_of(error: jsonschema.ValidationError) -> str:
    return "/".join(str(p) for p in error.absolute_path) or "<root>"


def validate_config(config: Any) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = [f"{_path_of(e)}: {e.message}" for e in errors]
        raise ConfigError("config failed schema validation:\n  " + "\n  ".join(lines))


def load_config(path: str | os.PathLike) -> tuple[dict, bytes]:
    """Read, parse and validate a config; returns (config, raw bytes)."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    validate_config(config)
    for key in ("family", "dual", "perturbed"):
        src = config.get(key)
        if src and "file" in src and not (path.parent / src["file"]).is_file():
            raise ConfigError(f"{key}.file: referenced file {src['file']!r} does not exist")
    return config, raw


# -- family sources --------------------------------------------------------


def resolve_source(source: dict, base_dir: Path, base: GOperatorFamily | None = None) -> GOperatorFamily:
    if "file" in source:
        try:
            data = json.loads((base_dir / source["file"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load family file {source['file']!r}: {exc}") from exc
        return _family_from_json(data, source["file"])
    if "inline" in source:
        return _family_from_json(source["inline"], "inline family")
    gen = source["generator"]
    kind = gen["type"]
    seed = gen.get("seed", 0)
    dim = gen.get("dim", 3)
    shape = dict(points=gen.get("points", 3), indices=gen.get("indices", 2), codim=gen.get("codim", 1))
    if kind == "identity":
        return GOperatorFamily.from_blocks([[np.eye(dim)]])
    if kind == "random_frame":
        return fixtures.random_frame(seed, dim, **shape)
    if kind == "random_parseval":
        return fixtures.random_parseval(seed, dim, **shape)
    if base is None:
        raise ConfigError(f"generator {kind!r} needs a base family")
    if kind == "alternate_dual":
        return fixtures.alternate_dual(base, seed, gen.get("scale", 1.0))
    return fixtures.perturb(base, seed, gen.get("scale", 0.01))


def _family_from_json(data, where) -> GOperatorFamily:
    try:
        fam = family_from_dict(data)
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"{where}: invalid family document: {exc}") from exc
    violations = validate_family(fam)
    if violations:
        raise ConfigError(f"{where}: " + "; ".join(v.message for v in violations))
    return fam


# -- report ----------------------------------------------------------------


@dataclass
class RunReport:
    kind: str
    config_digest: str
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add(self, name, passed, residual=None, slack=None, **details):
        self.checks.append(
            to_jsonable({"name": name, "passed": bool(passed), "residual": residual, "slack": slack, **details})
        )

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "kind": self.kind,
                "config_digest": self.config_digest,
                "passed": self.passed,
                "checks": self.checks,
                "results": self.results,
                "timing": self.timing,
                "version": self.version,
            }
        )

    def summary(self) -> str:
        width = max([len(c["name"]) for c in self.checks] + [10])
        lines = [f"{self.kind}  (config {self.config_digest[:12]})", ""]
        lines.append(f"{'check':<{width}}  {'residual':>12}  {'slack':>12}  result")
        for c in self.checks:
            res = "" if c["residual"] is None else f"{c['residual']:.3e}"
            sl = "" if c["slack"] is None else f"{c['slack']:.3e}"
            lines.append(f"{c['name']:<{width}}  {res:>12}  {sl:>12}  {'PASS' if c['passed'] else 'FAIL'}")
        lines += ["", f"aggregate: {'PASS' if self.passed else 'FAIL'}"]
        return "\n".join(lines) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- experiment kinds ------------------------------------------------------


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _aggregate(report: RunReport, name: str, checks):
    ident = [c for c in checks if c.kind == "identity"]
    ineq = [c for c in checks if c.kind == "inequality"]
    report.add(
        name,
        all(c.passed for c in checks),
        residual=max((c.residual for c in ident), default=None),
        slack=min((c.slack for c in ineq), default=None),
        count=len(checks),
        failures=sum(not c.passed for c in checks),
    )


def run_frame_analysis(config, base_dir, tol, jobs, report):
    fam = resolve_source(config["family"], base_dir)
    bounds = engine.frame_bounds(fam)
    report.results["bounds"] = {"A": bounds.lower, "B": bounds.upper}
    report.results["is_frame"] = engine.is_frame(fam)
    report.results["is_parseval"] = engine.is_parseval(fam, tol)

    s = engine.frame_operator(fam).matrix
    naive = oracles.naive_frame_operator(fam)
    err = float(np.max(np.abs(s - naive)) / max(1.0, np.max(np.abs(naive))))
    report.add("frame_operator_oracle", err <= 1e-12, residual=err)

    lo, hi = oracles.extremal_rayleigh(s, 256, config.get("seed", 0))
    scale = max(1.0, bounds.upper)
    report.add(
        "rayleigh_consistency",
        lo >= bounds.lower - 1e-10 * scale and hi <= bounds.upper + 1e-10 * scale,
        slack=min(lo - bounds.lower, bounds.upper - hi),
    )
    report.add("frame_property", report.results["is_frame"], lower_bound=bounds.lower)
    if not report.results["is_frame"]:
        return
    dual = engine.canonical_dual(fam)
    db = engine.frame_bounds(dual)
    rel = max(abs(db.lower * bounds.upper - 1), abs(db.upper * bounds.lower - 1))
    report.add("canonical_dual_bounds", rel <= tol, residual=rel)
    eye = np.eye(fam.dim)
    rec = max(engine.reconstruction_residual(fam, dual, e) for e in eye)
    report.add("canonical_reconstruction", rec <= tol * max(1.0, bounds.upper / bounds.lower), residual=rec)


def run_identity_suite(config, base_dir, tol, jobs, report):
    fam = resolve_source(config["family"], base_dir)
    seed = config.get("seed", 0)
    trials = config.get("trials", 20)
    grid = config.get("lambda_grid", identities.DEFAULT_LAMBDA_GRID)
    masks = [SubsetMask(m) for m in config.get("masks", [])]
    for m in masks:
        if len(m) != fam.n_points:
            raise ConfigError(f"masks: mask of length {len(m)} for {fam.n_points} points")
    try:
        engine.require_frame(fam)
    except FrameError as exc:
        report.add("frame_property", False, error=str(exc))
        return
    if "dual" in config:
        dual = resolve_source(config["dual"], base_dir, base=fam)
        if not dual.same_shape(fam):
            report.add("alternate_dual", False, error="dual has a different shape")
            return
    else:
        dual = fixtures.alternate_dual(fam, np.random.SeedSequence([seed, 2**32]))
    dual_rep = engine.verify_alternate_dual(fam, dual, tol)
    report.add("alternate_dual", dual_rep.passed, residual=max(dual_rep.residuals.values()))
    parseval = engine.is_parseval(fam)
    report.results.update(is_parseval=parseval, trials=trials, lambda_grid=list(grid))

    def trial(t):
        rng = _trial_rng(seed, t)
        mask = masks[t % len(masks)] if masks else fixtures.random_mask(rng, fam.n_points)
        f = fixtures.random_vector(rng, fam.dim)
        out = {"canonical": identities.verify_canonical_dual_inequality(fam, mask, f, grid, tol)}
        if parseval:
            out["parseval"] = [identities.verify_parseval_identity(fam, mask, f, tol)]
        if dual_rep.passed:
            out["alternate"] = identities.verify_alternate_dual_inequality(fam, dual, mask, f, grid, tol, dual_tol=tol)
            out["complex"] = [identities.verify_general_complex_identity(fam, dual, mask, f, tol, dual_tol=tol)]
        return out

    results = _pmap(trial, range(trials), jobs)
    names = {
        "parseval": "parseval_identity",
        "canonical": "canonical_dual_inequality",
        "alternate": "alternate_dual_inequality",
        "complex": "general_complex_identity",
    }
    for key, name in names.items():
        checks = [c for r in results for c in r.get(key, [])]
        if checks:
            _aggregate(report, name, checks)


def run_perturbation_study(config, base_dir, tol, jobs, report):
    lam = resolve_source(config["family"], base_dir)
    gam = resolve_source(config["perturbed"], base_dir, base=lam)
    if not gam.same_shape(lam):
        raise ConfigError("perturbed: family shape differs from the base family")
    params = perturbation.PerturbationParams(**config["params"])
    ascent = config.get("ascent", {})
    kw = dict(starts=ascent.get("starts", perturbation.DEFAULT_STARTS),
              iterations=ascent.get("iterations", perturbation.DEFAULT_ITERATIONS),
              seed=config.get("seed", 0))
    base = engine.frame_bounds(lam)
    cond = perturbation.check_condition(lam, gam, params, **kw)
    gate = params.gate(base.lower)
    report.results.update(
        condition=cond.condition.value,
        gate=gate,
        certificate={"lhs": cond.certificate_lhs, "rhs": cond.certificate_rhs},
        max_gap=cond.max_ratio,
        base_bounds={"A": base.lower, "B": base.upper},
    )
    if gate:
        rep = perturbation.verify_perturbation_theorem(lam, gam, params, **kw)
        report.results["theorem"] = rep.to_dict()
        report.add("perturbation_theorem", rep.passed, slack=min(rep.residuals.values(), default=None),
                   status=rep.status, condition=cond.condition.value)
    else:
        report.results["theorem"] = {"status": "not_applicable", "notes": ["gate fails"]}
    cor = perturbation.verify_corollary_M(lam, gam)
    report.results["corollary"] = cor.to_dict()
    slack = min((v for k, v in cor.residuals.items() if k.endswith("slack")), default=None)
    report.add("corollary_M", cor.passed, slack=slack, status=cor.status)


def _profile(name):
    return fib.plancherel_profile if name == "plancherel" else fib.flat_profile


def run_fiberization_demo(config, base_dir, tol, jobs, report):
    cfg = config["fiberization"]
    n = cfg["N"]
    m = cfg.get("M", 1)
    p = cfg.get("p", 1)
    seed = config.get("seed", 0)
    trials = config.get("trials", 10)
    fam = fib.periodization_family(n, m, _profile(cfg.get("weight_profile", "flat")))
    fib.ShiftSystem(n, p, [np.ones(n)])
    bounds = engine.frame_bounds(fam)
    err = max(abs(bounds.lower - 1), abs(bounds.upper - 1))
    report.add("periodization_parseval", err <= 1e-12, residual=err)
    tau = cfg.get("tau", 1.0)
    sb = engine.frame_bounds(fib.scale_measure(fam, tau))
    err = max(abs(sb.lower - tau * bounds.lower), abs(sb.upper - tau * bounds.upper))
    report.add("measure_scaling", err <= 1e-12 * max(1.0, tau), residual=err)
    report.results["periodization_bounds"] = {"A": bounds.lower, "B": bounds.upper}
    report.results["scaled_bounds"] = {"A": sb.lower, "B": sb.upper, "tau": tau}

    gens = cfg.get("generators", 1)
    extra = cfg.get("extra_shifts", [0])

    def trial(t):
        rng = _trial_rng(seed, t)
        system = fib.random_shift_system(rng, n, p, gens, extra)
        f = fixtures.random_vector(rng, n)
        return fib.verify_fiber_norm_identity(system, f, 1e-10), fib.verify_fiber_frame_theorem(system)

    results = _pmap(trial, range(trials), jobs)
    _aggregate(report, "fiber_norm_identity", [r[0] for r in results])
    thm = [r[1] for r in results]
    slacks = [min(r.residuals["lower_slack"], r.residuals["upper_slack"]) for r in thm if r.residuals]
    report.add("fiber_frame_theorem", all(r.passed for r in thm), slack=min(slacks, default=None), count=len(thm))


RUNNERS = {
    "FrameAnalysis": run_frame_analysis,
    "IdentitySuite": run_identity_suite,
    "PerturbationStudy": run_perturbation_study,
    "FiberizationDemo": run_fiberization_demo,
}


def run_config(config: dict, raw: bytes, base_dir: Path, tol: float | None = None, jobs: int = 1) -> RunReport:
    tol = tol if tol is not None else config.get("tolerance", DEFAULT_TOL)
    report = RunReport(config["kind"], hashlib.sha256(raw).hexdigest())
    start = time.perf_counter()
    try:
        RUNNERS[config["kind"]](config, base_dir, tol, jobs, report)
    except ConfigError:
        raise
    except FrameError as exc:
        report.add("execution", False, error=f"{type(exc).__name__}: {exc}")
    report.timing["seconds"] = time.perf_counter() - start
    return report


def output_paths(config: dict, config_path: Path) -> tuple[Path, Path]:
    out = config.get("output", {})
    base = config_path.parent
    report = base / out.get("report", config_path.stem + ".report.json")
    summary = base / out.get("summary", config_path.stem + ".summary.txt")
    return report, summary


# -- fixture generation ----------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def generate(kind: str, seed: int, dim: int, out_dir: str | os.PathLike) -> Path:
    """Write a reproducible config (plus family files) into ``out_dir``."""
    if kind not in KINDS:
        raise ConfigError(f"unsupported kind {kind!r}; choose from {', '.join(KINDS)}")
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    out = Path(out_dir)
    files: dict[str, GOperatorFamily] = {}
    config: dict[str, Any] = {"kind": kind, "seed": seed, "tolerance": DEFAULT_TOL}
    rng = np.random.default_rng(seed)
    if kind == "FrameAnalysis":
        files["family.json"] = fixtures.random_frame(rng, dim, points=3, indices=2, codim=2)
        config["family"] = {"file": "family.json"}
    elif kind == "IdentitySuite":
        fam = fixtures.random_parseval(rng, dim, points=4, indices=2, codim=2)
        files["family.json"] = fam
        files["dual.json"] = fixtures.alternate_dual(fam, rng)
        config.update(family={"file": "family.json"}, dual={"file": "dual.json"}, trials=25,
                      lambda_grid=list(identities.DEFAULT_LAMBDA_GRID))
    elif kind == "PerturbationStudy":
        fam = fixtures.random_frame(rng, dim, points=3, indices=2, codim=2)
        a = engine.frame_bounds(fam).lower
        noise = fixtures.perturb(fam, rng, 1.0) - fam
        d = engine.frame_bounds(noise).upper
        # rescale so that sqrt(lambda_max(D)) = 0.05 sqrt(A)
        noise = noise.map_blocks(lambda b: b * 0.05 * np.sqrt(a / d))
        gam = fam.with_blocks([[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(fam.blocks, noise.blocks)])
        files["family.json"] = fam
        files["perturbed.json"] = gam
        config.update(family={"file": "family.json"}, perturbed={"file": "perturbed.json"},
                      params={"lambda1": 0.0, "lambda2": 0.0, "mu": 0.05 * float(np.sqrt(a))},
                      ascent={"starts": 8, "iterations": 200})
    else:
        config.update(fiberization={"N": 4 * dim, "M": 4, "p": 2, "generators": 2,
                                    "extra_shifts": [0, 1], "tau": 3.0, "weight_profile": "plancherel"},
                      trials=20)
    out.mkdir(parents=True, exist_ok=True)
    for name, fam in files.items():
        atomic_write(out / name, dump_json(family_to_dict(fam)))
    path = out / "config.json"
    atomic_write(path, dump_json(config))
    return path
