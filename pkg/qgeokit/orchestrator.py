# qgeokit/orchestrator.py
# Batch driver: runs a command's verification suite, collects records, exports
# the JSON report and CSV rows. Exports happen even when a suite crashes.
import argparse
import csv
import json
import signal
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from qgeokit.config import GeometryConfig, RunConfig, make_config
from qgeokit.dynamics import (QuadraticHamiltonian, conservation_report, evolve_exact_trajectory,
                              evolve_symplectic, unitarity_check)
from qgeokit.errors import BoundaryError, ConfigError, ConvergenceError, HermitianError
from qgeokit.kahler import (KahlerTriple, build_kahler_family, complex_coordinate_triple,
                            extension_block_norm, flat_metric_field, flat_triple, is_positive_definite,
                            kahler_residuals, random_admissible_extension, realify, riemann_curvature,
                            sectional_curvature, sphere_metric_field, spherical_line_element,
                            SphericalMetricSpec, pullback_check)
from qgeokit.quantum import WaveVector, inverse_madelung, normalize, quantum_statistical_distance
from qgeokit.sampling import random_interior, random_phase_point, random_wave
from qgeokit.schemas import REPORT_SCHEMA, ensure_valid
from qgeokit.simplex import ProbabilityVector, geodesic_distance_oracle, statistical_distance
from qgeokit.state import load_run_config, parse_matrix, parse_vector, progress_enabled
from qgeokit.summarizer import build_report
from qgeokit.symplectic import canonical_residuals
from qgeokit.validator import crash_record, make_record

SPHERE_RADIUS = 2.0


@dataclass
class RunContext:
    cfg: RunConfig
    progress: bool = False
    quiet: bool = True
    records: List[dict] = field(default_factory=list)
    csv_header: Optional[List[str]] = None
    csv_rows: List[list] = field(default_factory=list)

    @property
    def out_dir(self) -> Path:
        return Path(self.cfg.out_dir)

    def add(self, rec: dict) -> None:
        self.records.append(rec)

    def say(self, msg: str) -> None:
        if not self.quiet:
            tqdm.write(msg)

    def bar(self, iterable, desc: str, total: Optional[int] = None):
        return tqdm(iterable, desc=desc, total=total, disable=not self.progress, leave=False)


def _context(cfg: RunConfig, ctx: Optional[RunContext]) -> RunContext:
    return ctx if ctx is not None else RunContext(cfg)


def _report(ctx: RunContext) -> dict:
    return build_report(ctx.cfg.command, ctx.cfg.seed, ctx.cfg.alpha, ctx.records)


def _fmt(v) -> str:
    return f"{v:.16e}" if isinstance(v, (float, np.floating)) else str(v)


def _write_rows(path: Path, header: List[str], rows: List[list]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


# -------------------
# distance
# -------------------
def _pair_states(values, name: str) -> Tuple[ProbabilityVector, WaveVector, bool]:
    """Plain reals are a probability vector (lifted with zero phases); [re, im] pairs are a wave."""
    vec = parse_vector(values, name)
    try:
        if not any(isinstance(v, (list, tuple)) for v in values):
            p = ProbabilityVector(vec.real)
            return p, WaveVector(np.sqrt(p.p)), True
        psi = WaveVector(vec)
        if not psi.is_normalized():
            raise ValueError(f"sum |psi|^2 = {psi.norm_squared():.17g}")
        return ProbabilityVector(np.abs(psi.psi) ** 2 / psi.norm_squared()), psi, False
    except ValueError as e:
        raise ConfigError(f"{name} is not a valid state: {e}") from e


def cmd_distance(cfg: RunConfig, ctx: Optional[RunContext] = None) -> dict:
    """Classical and quantum distances for supplied pairs, or random pairs when none are given."""
    ctx = _context(cfg, ctx)
    rng = np.random.default_rng(cfg.seed)
    pairs = []
    for k, pair in enumerate(cfg.distance.get("pairs", [])):
        pid = pair.get("id", f"pair{k:02d}")
        pa, wa, lifted_a = _pair_states(pair["a"], f"{pid}.a")
        pb, wb, lifted_b = _pair_states(pair["b"], f"{pid}.b")
        if pa.n != pb.n:
            raise ConfigError(f"{pid}: states have {pa.n} and {pb.n} components")
        pairs.append((pid, pa, wa, pb, wb, lifted_a and lifted_b))
    if not pairs:
        for k in range(cfg.samples):
            pa, pb = random_interior(cfg.n, rng), random_interior(cfg.n, rng)
            pairs.append((f"random{k:02d}", pa, WaveVector(np.sqrt(pa.p)), pb, WaveVector(np.sqrt(pb.p)), True))
        for k in range(cfg.samples):
            wa, wb = random_wave(cfg.n, rng), random_wave(cfg.n, rng)
            pa = ProbabilityVector.normalized(np.abs(wa.psi) ** 2)
            pb = ProbabilityVector.normalized(np.abs(wb.psi) ** 2)
            pairs.append((f"wave{k:02d}", pa, wa, pb, wb, False))

    ref = make_config(alpha=0.5)
    reduction = symmetry = ordering = scaling = bound = 0.0
    ctx.csv_header = ["id", "classical", "quantum", "alpha"]
    for pid, pa, wa, pb, wb, lifted in ctx.bar(pairs, "distance"):
        geo = cfg.geometry(max(pa.n, 2))
        classical = statistical_distance(pa, pb, geo)
        quantum = quantum_statistical_distance(wa, wb, geo)
        ctx.csv_rows.append([pid, classical, quantum, cfg.alpha])
        if lifted:
            reduction = max(reduction, abs(classical - quantum))
        symmetry = max(symmetry, abs(classical - statistical_distance(pb, pa, geo)),
                       abs(quantum - quantum_statistical_distance(wb, wa, geo)))
        ordering = max(ordering, quantum - classical)
        scaled = statistical_distance(pa, pb, ref) * np.sqrt(2.0 * cfg.alpha)
        scaling = max(scaling, abs(scaled - classical) / max(1.0, classical))
        bound = max(bound, classical - np.sqrt(2.0 * cfg.alpha) * np.pi / 2)

    tol = cfg.tol("distance")
    ctx.add(make_record("distance.reduction", "equal-phase waves reduce to the classical distance", reduction, tol))
    ctx.add(make_record("distance.symmetry", "d(A,B) = d(B,A)", symmetry, tol))
    ctx.add(make_record("distance.quantum_le_classical", "|<a|b>| <= sum sqrt(Pa Pb)", max(ordering, 0.0), tol))
    ctx.add(make_record("distance.alpha_scaling", "distance scales as sqrt(alpha)", scaling, tol))
    ctx.add(make_record("distance.maximum", "distance <= sqrt(2 alpha) pi/2", max(bound, 0.0), tol))
    return _report(ctx)


# -------------------
# kahler-check
# -------------------
def _family_sample(P: ProbabilityVector, geo: GeometryConfig, seed: int, scale: float,
                   fault: Optional[str]) -> Tuple[KahlerTriple, float]:
    A = random_admissible_extension(P, geo, seed, scale)
    triple = build_kahler_family(P, A, geo)
    if fault == "j_sign":
        triple = KahlerTriple(triple.omega, triple.g, -triple.j)
    return triple, A.admissibility_residual(np.diag(geo.alpha / (2.0 * P.p)))


def cmd_kahler_check(cfg: RunConfig, ctx: Optional[RunContext] = None) -> dict:
    ctx = _context(cfg, ctx)
    rng = np.random.default_rng(cfg.seed)
    kc = cfg.kahler
    scale = float(kc.get("scale", 0.5))
    fault = kc.get("inject_fault")
    sizes = kc.get("sizes", [2, 4, 8, 16])

    compat = hermit = cplx = admiss = 0.0
    not_pd = 0
    min_block = np.inf
    jobs = [(n, k) for n in sizes for k in range(cfg.samples)]
    for n, _ in ctx.bar(jobs, "kahler family"):
        geo = cfg.geometry(n)
        P = random_interior(n, rng)
        triple, res_a = _family_sample(P, geo, int(rng.integers(2 ** 32)), scale, fault)
        r = kahler_residuals(triple)
        compat, hermit, cplx = max(compat, r[0]), max(hermit, r[1]), max(cplx, r[2])
        admiss = max(admiss, res_a)
        not_pd += 0 if is_positive_definite(triple.g) else 1
        min_block = min(min_block, extension_block_norm(triple))

    tol = cfg.tol("kahler")
    ctx.add(make_record("kahler.compatibility", "Omega = g J", compat, tol))
    ctx.add(make_record("kahler.metric_invariance", "J^T g J = g", hermit, tol))
    ctx.add(make_record("kahler.complex_structure", "J^2 = -1", cplx, tol))
    ctx.add(make_record("kahler.admissibility", "G A G^-1 = A^T", admiss, cfg.tol("admissibility")))
    ctx.add(make_record("kahler.positive_definite", "family metric is positive-definite", not_pd, 0.0,
                        detail=f"{not_pd} of {len(jobs)} samples indefinite"))
    if scale >= 0.1 and jobs:
        ctx.add(make_record("kahler.mixed_block", "A != 0 gives dP-dS cross terms", min_block,
                            cfg.tol("mixed_block"), bound="lower"))

    points = [random_phase_point(n, rng, cfg.geometry(n)) for n in (2, 3)
              for _ in range(int(kc.get("curvature_points", 20)))]
    spec = SphericalMetricSpec(lambda r: 1.0, lambda r: 0.3)
    plain = SphericalMetricSpec(lambda r: 1.0, lambda r: 0.0)
    curvature = mixed = flat_gap = pullback = canon_fd = canon_an = 0.0
    for pt in ctx.bar(points, "curvature"):
        geo = cfg.geometry(pt.n)
        curvature = max(curvature, riemann_curvature(flat_metric_field(geo), pt, geo))
        mixed = max(mixed, spherical_line_element(spec, pt, geo)[1])
        flat_gap = max(flat_gap, float(np.max(np.abs(spherical_line_element(plain, pt, geo)[0]
                                                        - flat_triple(pt.p, geo).g))))
        pullback = max(pullback, pullback_check(pt, geo))
        canon_fd = max(canon_fd, canonical_residuals([pt], geo))
        canon_an = max(canon_an, canonical_residuals([pt], geo, analytic=True))

    if points:
        ctx.add(make_record("curvature.flat", "extended A = 0 metric is flat", curvature, cfg.tol("curvature")))
        ctx.add(make_record("spherical.mixed_block", "rotation-invariant metric has no dP-dS terms", mixed,
                            cfg.tol("kahler")))
        ctx.add(make_record("spherical.flat_match", "f = 1, g = 0 reproduces the flat metric", flat_gap,
                            cfg.tol("kahler")))
        ctx.add(make_record("madelung.pullback", "complex-coordinate tensors pull back to the flat triple",
                            pullback, cfg.tol("pullback")))
        ctx.add(make_record("canonical.finite_difference", "{x^i, y^j} = delta^ij", canon_fd,
                            cfg.tol("canonical_fd")))
        ctx.add(make_record("canonical.analytic", "{x^i, y^j} = delta^ij", canon_an,
                            cfg.tol("canonical_analytic")))

    sphere_geo = cfg.geometry(2)
    k = sectional_curvature(sphere_metric_field(SPHERE_RADIUS), np.array([1.0, 0.3]), sphere_geo)
    ctx.add(make_record("curvature.sphere", "sectional curvature of a round sphere is 1/r^2",
                        abs(k - 1.0 / SPHERE_RADIUS ** 2), cfg.tol("sphere")))
    complex_res = max(max(kahler_residuals(realify(complex_coordinate_triple(cfg.geometry(n), n))))
                      for n in sizes)
    ctx.add(make_record("complex.realified", "complex-coordinate triple is Kahler", complex_res,
                        cfg.tol("kahler")))
    return _report(ctx)


# -------------------
# evolve
# -------------------
def _hamiltonian(cfg: RunConfig) -> QuadraticHamiltonian:
    ev = cfg.evolve
    M = parse_matrix(ev["M"], "evolve.M")
    N = parse_matrix(ev["N"], "evolve.N") if "N" in ev else None
    energy = float(ev.get("E", 0.0))
    return QuadraticHamiltonian(M, N, lambda t: energy)


def cmd_evolve(cfg: RunConfig, ctx: Optional[RunContext] = None) -> dict:
    """Midpoint integration of the configured Hamiltonian, checked against exact propagation."""
    ctx = _context(cfg, ctx)
    ev = cfg.evolve
    try:
        H = _hamiltonian(cfg)
    except HermitianError as e:
        ctx.add(make_record("hamiltonian.hermitian", "M = M^dagger", e.residual, 1e-14, detail=str(e)))
        return _report(ctx)
    except ValueError as e:
        ctx.add(make_record("hamiltonian.symmetric", "N = N^T", None, 1e-14, detail=str(e)))
        return _report(ctx)

    geo = cfg.geometry(max(H.n, 2))
    rng = np.random.default_rng(cfg.seed)
    if "psi0" in ev:
        psi0 = parse_vector(ev["psi0"], "evolve.psi0")
        if psi0.size != H.n:
            raise ConfigError(f"psi0 has {psi0.size} components, M is {H.n} x {H.n}")
        psi0 = normalize(WaveVector(psi0))
    else:
        psi0 = WaveVector(np.eye(H.n)[0])
    steps = int(ev.get("steps", 1000))
    dt = float(ev.get("dt", np.pi * cfg.alpha / 2.0 / steps))

    ctx.say(f"⏳ integrating {steps} steps of dt = {dt:.3g}")
    traj = evolve_symplectic(H, inverse_madelung(psi0, geo), dt, steps, geo)
    reference = evolve_symplectic(H, inverse_madelung(random_wave(H.n, rng), geo), dt, steps, geo)
    ctx.csv_header = None
    traj.to_csv(ctx.out_dir / "evolve.csv", H)

    report = conservation_report(traj, H, geo, reference)
    ctx.add(make_record("evolve.norm_drift", "sum |psi|^2 is conserved", report.norm_drift, cfg.tol("norm")))
    ctx.add(make_record("evolve.energy_drift", "H is conserved along its flow", report.energy_drift,
                        cfg.tol("energy")))
    ctx.add(make_record("evolve.dirac_drift", "<phi|psi> is conserved", report.dirac_drift, cfg.tol("dirac")))
    if H.is_gauge_invariant:
        exact = evolve_exact_trajectory(H.m, psi0, traj.times, geo)
        gap = float(np.max(np.abs(exact.states - traj.states)))
        ctx.add(make_record("evolve.exact_agreement", "midpoint flow matches exp(-i M t / alpha)", gap,
                            cfg.tol("exact")))
        ctx.add(make_record("evolve.unitarity", "U^dagger U = 1", unitarity_check(H.m, traj.times[-1], geo),
                            cfg.tol("unitarity")))
    return _report(ctx)


# -------------------
# oracle
# -------------------
def cmd_oracle(cfg: RunConfig, ctx: Optional[RunContext] = None) -> dict:
    """Brute-force geodesic length minus the closed-form distance, per endpoint pair."""
    ctx = _context(cfg, ctx)
    oc = cfg.oracle
    rng = np.random.default_rng(cfg.seed)
    pairs = []
    for k, pair in enumerate(oc.get("fixed", [])):
        pid = pair.get("id", f"fixed{k:02d}")
        pa, _, _ = _pair_states(pair["a"], f"{pid}.a")
        pb, _, _ = _pair_states(pair["b"], f"{pid}.b")
        pairs.append((pid, pa, pb))
    for k in range(int(oc.get("pairs", 10))):
        pairs.append((f"random{k:02d}", random_interior(cfg.n, rng), random_interior(cfg.n, rng)))

    low, high = cfg.tol("gap_low"), cfg.tol("gap_high")
    ctx.csv_header = ["id", "closed_form", "oracle", "gap", "alpha"]
    for pid, pa, pb in ctx.bar(pairs, "oracle"):
        geo = cfg.geometry(max(pa.n, 2))
        closed = statistical_distance(pa, pb, geo)
        name = f"oracle.{pid}"
        try:
            length = geodesic_distance_oracle(pa, pb, geo, segments=int(oc.get("segments", 64)),
                                              iterations=int(oc.get("iterations", 5000)), seed=cfg.seed)
        except (ConvergenceError, BoundaryError) as e:
            ctx.add(make_record(name, "shortest path length = closed-form distance", None, high, low=-low,
                                detail=str(e)))
            continue
        gap = length - closed
        ctx.csv_rows.append([pid, closed, length, gap, cfg.alpha])
        ctx.add(make_record(name, "shortest path length = closed-form distance", gap, high, low=-low))
    return _report(ctx)


COMMANDS: Dict[str, Callable[[RunConfig, Optional[RunContext]], dict]] = {
    "distance": cmd_distance,
    "kahler-check": cmd_kahler_check,
    "evolve": cmd_evolve,
    "oracle": cmd_oracle,
}


# -------------------
# Runner
# -------------------
def run_command(cfg: RunConfig, progress: bool = False, quiet: bool = True) -> Tuple[dict, int]:
    """Run one command. The report and CSV are exported on success, failure and crash alike."""
    ctx = RunContext(cfg, progress=progress, quiet=quiet)
    out: Dict[str, dict] = {}

    def export_partial():
        report = _report(ctx)
        ensure_valid(REPORT_SCHEMA, report, "report")
        ctx.out_dir.mkdir(parents=True, exist_ok=True)
        with open(ctx.out_dir / f"{cfg.command}_report.json", "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, ensure_ascii=False)
        if ctx.csv_header is not None:
            _write_rows(ctx.out_dir / f"{cfg.command}.csv", ctx.csv_header, ctx.csv_rows)
        out["report"] = report

    def _on_signal(_sig, _frm):
        export_partial()
        sys.exit(1)

    previous = {s: signal.signal(s, _on_signal) for s in (signal.SIGINT, signal.SIGTERM)}
    try:
        ctx.say(f"⏳ {cfg.command} (seed {cfg.seed}, alpha {cfg.alpha})")
        COMMANDS[cfg.command](cfg, ctx)
    except ConfigError:
        raise
    except Exception as e:
        ctx.add(crash_record(f"{cfg.command}.crash", e))
        ctx.say(traceback.format_exc())
    finally:
        for s, handler in previous.items():
            signal.signal(s, handler)
        export_partial()

    report = out["report"]
    return report, 0 if report["summary"]["ok"] else 1


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgeokit", description="Geometric checks of discrete quantum mechanics.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, type=Path)
    ap.add_argument("--out", default=None, help="output directory (overrides QGEOKIT_OUT_DIR)")
    ap.add_argument("--seed", default=None, type=int, help="seed (overrides QGEOKIT_SEED)")
    ap.add_argument("--json", action="store_true", help="print only the report JSON")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_run_config(args.config, args.command, {"seed": args.seed, "out_dir": args.out})
        report, code = run_command(cfg, progress=progress_enabled() and not args.json, quiet=args.json)
    except ConfigError as e:
        if not args.json:
            tqdm.write(f"❌ {e}")
        return 2
    except OSError as e:
        if not args.json:
            tqdm.write(f"❌ cannot write output: {e}")
        return 2

    if args.json:
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        s = report["summary"]
        if code == 0:
            tqdm.write(f"✅ {s['passed']}/{s['total']} checks passed; report in {cfg.out_dir}")
        else:
            tqdm.write(f"❌ {s['failed']} of {s['total']} checks failed: {', '.join(s['failed_names'])}")
    return code
