"""Scenario configuration, the certificate pipeline and report writing.

A scenario is an INI file with sections ``scenario``, ``model``, ``smearing``,
``truncation``, ``certificates``, ``cutoff`` and ``tolerances``. See the
bundled files in ``wickfock/scenarios`` for complete examples.
"""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .errors import ConfigurationError, PreconditionError
from .fock import FockTruncation, FockVector
from .models import (ChainModel, OscillatorModel, TimeGrid, chain_two_point, finite_difference,
                     gaussian_bump, oscillator_two_point, product_function, triangle_bump)
from .quasifree import one_particle_space
from .regularization import (build_cutoff_family, family_table, graph_limit_experiment,
                             inverse_inequality_check, squares_partition)
from .report import CertificateReport
from .textio import load_smearing, load_two_point
from .wick import (SmearingSpec, SmearingTerm, compression_T1, kernel_from_smearing,
                   support_invariance_check, wick_square_operator)

ALL_CERTIFICATES = ("nelson", "wuest", "konrady", "commutator", "t1", "locality",
                    "stability", "family", "inverse", "graph_limit")

CSV_COLUMNS = ("scenario", "certificate", "constant_names", "constant_values",
               "worst_residual", "tolerance", "pass")

DESCRIPTIONS = {
    "nelson": "analytic growth of iterates of the Wick square on finite-particle vectors",
    "wuest": "relative bound of the pair-creation part by the number-shifted diagonal part",
    "konrady": "relative bound and number-operator lower bound for the perturbation argument",
    "commutator_identities": "field/number commutator and the weighted lower bound of a normal square",
    "t1_scan": "hermiticity, real spectrum and positivity of the one-particle compression",
    "locality_invariance": "Fock space over a region is invariant under a Wick square smeared inside it",
    "truncation_stability": "low eigenvalues of truncated compressions as the particle cutoff grows",
    "cutoff": "monotone momentum-cutoff family converging to the shifted Wick square",
    "inverse_inequality": "resolvents of the monotone family are ordered",
    "graph_limit": "resolvents and spectral projections of the family converge to the limit",
    "squares_partition": "partition of unity by squares",
}

SCENARIO_DIR = "scenarios"


def bundled_scenarios() -> dict[str, str]:
    """Bundled scenario names mapped to their INI text."""
    root = resources.files("wickfock") / SCENARIO_DIR
    return {p.name[:-4]: p.read_text() for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".ini")}


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigurationError(f"expected numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigurationError(f"expected integers, got {text!r}") from None


@dataclass
class Scenario:
    name: str
    digest: str
    config: configparser.ConfigParser
    base_dir: Path
    seed: int = 0
    memory_cap: int = dg.MEMORY_CAP

    @classmethod
    def from_text(cls, text: str, base_dir=".", name: str | None = None) -> "Scenario":
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigurationError(f"cannot parse scenario: {exc}") from None
        for sec in ("scenario", "model", "smearing", "truncation"):
            if not cp.has_section(sec):
                raise ConfigurationError(f"scenario is missing the [{sec}] section")
        nm = cp.get("scenario", "name", fallback=name)
        if not nm:
            raise ConfigurationError("scenario needs a name")
        digest = hashlib.sha256(text.encode()).hexdigest()[:16]
        sc = cls(nm, digest, cp, Path(base_dir))
        sc.seed = sc.getint("scenario", "seed", 0)
        sc.memory_cap = sc.getint("truncation", "memory_cap", dg.MEMORY_CAP)
        sc.certificates  # validate early
        return sc

    @classmethod
    def load(cls, ref: str) -> "Scenario":
        """A path to an INI file, or the name of a bundled scenario."""
        path = Path(ref)
        if path.is_file():
            return cls.from_text(path.read_text(), path.parent, path.stem)
        bundled = bundled_scenarios()
        if ref in bundled:
            return cls.from_text(bundled[ref], ".", ref)
        raise ConfigurationError(f"no scenario file or bundled scenario named {ref!r}")

    def get(self, section: str, key: str, fallback=None) -> str | None:
        return self.config.get(section, key, fallback=fallback)

    def getfloat(self, section: str, key: str, fallback=None) -> float:
        try:
            return self.config.getfloat(section, key, fallback=fallback)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} must be a number") from None

    def getint(self, section: str, key: str, fallback=None) -> int:
        try:
            return self.config.getint(section, key, fallback=fallback)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} must be an integer") from None

    @property
    def certificates(self) -> tuple[str, ...]:
        sel = self.get("certificates", "select", "all").replace(",", " ").split()
        if sel == ["all"]:
            return ALL_CERTIFICATES
        bad = [s for s in sel if s not in ALL_CERTIFICATES]
        if bad:
            raise ConfigurationError(f"unknown certificates {bad}; choose from {list(ALL_CERTIFICATES)}")
        return tuple(s for s in ALL_CERTIFICATES if s in sel)

    def path(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.base_dir / p


@dataclass
class ScenarioResult:
    scenario: Scenario
    reports: list[CertificateReport]
    cutoff_rows: list[dict]
    warnings: list[str]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


@dataclass
class RunReport:
    results: list[ScenarioResult] = field(default_factory=list)
    strict: bool = False

    @property
    def passed(self) -> bool:
        ok = all(r.passed for r in self.results)
        if self.strict:
            ok = ok and not any(r.warnings for r in self.results)
        return ok

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


# ---------------------------------------------------------------------------
# pipeline


def _build_model(sc: Scenario):
    kind = sc.get("model", "kind", "oscillator")
    if kind == "oscillator":
        grid = TimeGrid(sc.getint("model", "points", 8), sc.getfloat("model", "dt", 1.0),
                        sc.config.getboolean("model", "periodic", fallback=True))
        return grid, grid, oscillator_two_point(OscillatorModel(sc.getfloat("model", "omega", 1.0), grid))
    if kind == "chain":
        tg = TimeGrid(sc.getint("model", "points", 4), sc.getfloat("model", "dt", 1.0),
                      sc.config.getboolean("model", "periodic", fallback=True))
        model = ChainModel(sc.getfloat("model", "mass", 1.0), sc.getint("model", "sites", 4), tg,
                           sc.getfloat("model", "dx", 1.0))
        return model.space_time, tg, chain_two_point(model)
    if kind == "custom":
        file = sc.get("model", "two_point_file")
        if not file:
            raise ConfigurationError("custom model needs two_point_file")
        tp = load_two_point(sc.path(file))
        tp.check_positive_type()
        grid = TimeGrid(tp.d_test, sc.getfloat("model", "dt", 1.0),
                        sc.config.getboolean("model", "periodic", fallback=True))
        return grid, grid, tp
    raise ConfigurationError(f"unknown model kind {kind!r}")


def _bumps(sc: Scenario, tgrid: TimeGrid) -> list[np.ndarray]:
    shape = sc.get("smearing", "bump", "triangle")
    centers = _floats(sc.get("smearing", "centers", "0"))
    width = sc.getfloat("smearing", "width", 1.0)
    maker = {"triangle": triangle_bump, "gaussian": gaussian_bump}.get(shape)
    if maker is None:
        raise ConfigurationError(f"unknown bump shape {shape!r}")
    return [maker(tgrid, c, width) for c in centers]


def _difference(sc: Scenario, grid) -> np.ndarray:
    op = sc.get("smearing", "operator", "identity")
    axis = sc.getint("smearing", "axis", 0)
    n = int(np.prod(grid.shape))
    if op == "identity":
        return np.eye(n)
    if op in ("forward", "centered"):
        return finite_difference(1, grid, axis, op)
    if op == "second":
        return finite_difference(2, grid, axis)
    raise ConfigurationError(f"unknown difference operator {op!r}")


def _build_smearing(sc: Scenario, grid, tgrid: TimeGrid):
    kind = sc.get("smearing", "kind", "partition")
    if kind == "file":
        return load_smearing(sc.path(sc.get("smearing", "file", "")), grid), None
    n_sites = grid.shape[1] if len(grid.shape) > 1 else None

    def lift(g):
        return g if n_sites is None else product_function(g, np.ones(n_sites))

    Q = _difference(sc, grid)
    if kind == "partition":
        part = squares_partition(_bumps(sc, tgrid))
        gens = [lift(c) for c in part.chi]
    elif kind == "bumps":
        part = None
        gens = [lift(b) for b in _bumps(sc, tgrid)]
    else:
        raise ConfigurationError(f"unknown smearing kind {kind!r}")
    return SmearingSpec((SmearingTerm.from_squares(Q, gens),)), part


def _region(sc: Scenario, d_test: int) -> np.ndarray | None:
    text = sc.get("certificates", "locality_sites")
    if not text:
        return None
    idx = _ints(text)
    if any(not 0 <= i < d_test for i in idx):
        raise ConfigurationError(f"locality sites must lie in 0..{d_test - 1}")
    mask = np.zeros(d_test, dtype=bool)
    mask[idx] = True
    return mask


def run_scenario(sc: Scenario, seed: int | None = None) -> ScenarioResult:
    """Run one scenario in dependency order: model, state, operators, certificates, convergence."""
    t0 = time.perf_counter()
    seed = sc.seed if seed is None else seed
    seeds = np.random.SeedSequence(seed).spawn(len(ALL_CERTIFICATES))
    rngs = {name: np.random.default_rng(s) for name, s in zip(ALL_CERTIFICATES, seeds)}
    tol_id = sc.getfloat("tolerances", "identity", dg.IDENTITY_TOL)
    n_probes = sc.getint("truncation", "probes", 20)
    warnings: list[str] = []

    grid, tgrid, tp = _build_model(sc)
    _, qm = one_particle_space(tp, sc.getfloat("model", "null_tol", 1e-10))
    spec, part = _build_smearing(sc, grid, tgrid)
    if spec.d_test != qm.d_test:
        raise ConfigurationError(f"smearing over {spec.d_test} points, model over {qm.d_test}")
    n_max = sc.getint("truncation", "n_max", 6)
    trunc = FockTruncation.of(qm.rank, n_max)
    dg.memory_guard(trunc, sc.memory_cap)
    ker = kernel_from_smearing(spec, qm)
    T = wick_square_operator(ker, trunc)
    identity_Q = sc.get("smearing", "operator", "identity") == "identity"
    selected = sc.certificates

    reports: list[CertificateReport] = []
    if part is not None:
        reports.append(CertificateReport.make("squares_partition", {"bumps": len(part.chi)},
                                              part.residual(), 1e-12))
    if "nelson" in selected:
        reports.append(dg.nelson_certificate(T, trunc, rngs["nelson"], max(1, n_probes // 4), tol_id))
    consts = None
    if ("wuest" in selected or "konrady" in selected):
        if spec.class_S and grid.periodic:
            d_text = sc.get("certificates", "wuest_d", "auto")
            consts = dg.konrady_constant(spec, qm, grid, None if d_text == "auto" else float(d_text))
        else:
            warnings.append("konrady constants need class-S witnesses on a periodic grid; skipped")
    if "wuest" in selected and consts is not None:
        reports.append(dg.wuest_certificate(T.A, T.B, consts.d, trunc, rngs["wuest"], 5 * n_probes, tol_id))
    if "konrady" in selected and consts is not None:
        reports.append(dg.konrady_certificate(T.A, T.B, consts, trunc, rngs["konrady"], 5 * n_probes, tol_id))
    if "commutator" in selected:
        rng = rngs["commutator"]
        parts = []
        for _ in range(sc.getint("certificates", "commutator_samples", 5)):
            h = rng.standard_normal(qm.d_test) + 1j * rng.standard_normal(qm.d_test)
            parts.append(dg.commutator_identities(h, qm, trunc, tol_id))
        reports.append(_merge_worst("commutator_identities", parts))
    if "t1" in selected:
        reports.append(dg.t1_scan(compression_T1(T), spec.class_S, identity_Q))
    if "locality" in selected:
        region = _region(sc, qm.d_test)
        if region is not None:
            reports.append(support_invariance_check(spec, region, qm, trunc))
    if "stability" in selected:
        levels = _ints(sc.get("certificates", "stability_levels", f"{max(4, n_max - 2)} {n_max - 1} {n_max}"))
        st = dg.truncation_stability(lambda n: wick_square_operator(ker, FockTruncation.of(qm.rank, n)),
                                     levels, shift_tol=sc.getfloat("tolerances", "shift", 1e-3),
                                     cap=sc.memory_cap)
        reports.append(st.report)

    cutoff_rows: list[dict] = []
    wants_family = {"family", "inverse", "graph_limit"} & set(selected)
    if wants_family:
        try:
            sched = sc.get("cutoff", "schedule", "all")
            cutoffs = None if sched == "all" else _ints(sched)
            fam = build_cutoff_family(spec, qm, trunc, grid, cutoffs, rngs["family"], n_probes)
        except PreconditionError as exc:
            warnings.append(f"cutoff family skipped: {exc}")
        else:
            if "family" in selected:
                reports.append(CertificateReport.combine("cutoff", fam.reports, {"c_full": fam.limit_constant}))
            if "inverse" in selected:
                reports.append(inverse_inequality_check(fam))
            graph = None
            if "graph_limit" in selected:
                rng = rngs["graph_limit"]
                probes = [FockVector.random(trunc, rng, fam.top) for _ in range(sc.getint("cutoff", "probes", 3))]
                graph = graph_limit_experiment(fam, probes)
                reports.append(graph.report)
            cutoff_rows = family_table(fam, graph)
    return ScenarioResult(sc, reports, cutoff_rows, warnings, time.perf_counter() - t0)


def _merge_worst(name: str, reports: list[CertificateReport]) -> CertificateReport:
    """Combine repeated runs of one check, keeping the worst leaf of each kind."""
    by_name: dict[str, CertificateReport] = {}
    for r in reports:
        for p in r.parts:
            cur = by_name.get(p.name)
            if cur is None or p.worst_residual / p.tolerance > cur.worst_residual / cur.tolerance:
                by_name[p.name] = p
    return CertificateReport.combine(name, list(by_name.values()), {"samples": len(reports)})


# ---------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def report_rows(result: ScenarioResult) -> list[dict]:
    rows = []
    for top in result.reports:
        for qual, leaf in top.leaves():
            consts = {**top.constants, **leaf.constants}
            rows.append({
                "scenario": result.scenario.name,
                "certificate": qual,
                "constant_names": ";".join(consts),
                "constant_values": ";".join(_fmt(v) for v in consts.values()),
                "worst_residual": _fmt(leaf.worst_residual),
                "tolerance": _fmt(leaf.tolerance),
                "pass": "true" if leaf.passed else "false",
                "_top": top.name,
                "_notes": leaf.notes,
                "_probes": leaf.n_probes,
            })
    return rows


def render_csv(run: RunReport) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for res in run.results:
        w.writerows(report_rows(res))
    return buf.getvalue()


def render_cutoff_csv(result: ScenarioResult) -> str:
    if not result.cutoff_rows:
        return ""
    buf = io.StringIO()
    cols = list(result.cutoff_rows[0])
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for row in result.cutoff_rows:
        w.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def render_json(run: RunReport) -> str:
    doc = {"passed": run.passed, "strict": run.strict, "scenarios": []}
    for res in run.results:
        rows = []
        for r in report_rows(res):
            rows.append({k: r[k] for k in CSV_COLUMNS} | {
                "description": DESCRIPTIONS.get(r["_top"], ""),
                "notes": r["_notes"], "probes": r["_probes"]})
        doc["scenarios"].append({
            "name": res.scenario.name, "digest": res.scenario.digest, "seed": res.scenario.seed,
            "passed": res.passed, "warnings": res.warnings, "seconds": round(res.seconds, 3),
            "rows": rows})
    return json.dumps(doc, indent=2) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_outputs(run: RunReport, out_dir) -> list[Path]:
    """Write ``report.csv``, ``report.json`` and one cutoff table per scenario."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {out / "report.csv": render_csv(run), out / "report.json": render_json(run)}
    for res in run.results:
        text = render_cutoff_csv(res)
        if text:
            files[out / f"{res.scenario.name}_cutoffs.csv"] = text
    for path, text in files.items():
        _atomic_write(path, text)
    return list(files)


def run_all(scenarios: list[Scenario], seed: int | None = None, workers: int = 1,
            strict: bool = False) -> RunReport:
    """Run scenarios, concurrently when ``workers > 1``; results keep input order."""
    if seed is not None:
        for s in scenarios:
            s.seed = seed
    if workers > 1 and len(scenarios) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_scenario, scenarios))
    else:
        results = [run_scenario(s) for s in scenarios]
    return RunReport(results, strict)


