"""Validation suite: every acceptance check with its pinned tolerance.

Each check compares solver output against golden reference data shipped
under ``slfd/data`` (external reference eigenvalues, frozen rank series,
closed-form corrections) or against internal mathematical identities.  The
CLI ``validate`` command prints one pass/fail line per check; the pytest
acceptance module asserts the same results.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from . import basicsolver, coeffmesh, fdengine, sincquad
from .config import ProblemConfig, load_config
from .oracle import galerkin_oracle
from .specfun import legendre_polynomial

CANONICAL_CONFIGS = {
    "ex1_n1": "example1_n1.cfg",
    "ex1_n3": "example1_n3.cfg",
    "ex2": "example2.cfg",
    "ex3": "example3.cfg",
}


def _data_path(name: str):
    return resources.files("slfd.data").joinpath(name)


def _read_csv(name: str) -> list[dict[str, str]]:
    with _data_path(name).open(encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header = rows[0]
    return [dict(zip(header, r)) for r in rows[1:]]


def _fraction(text: str) -> float:
    return float(Fraction(text))


@dataclass
class GoldenData:
    """Reference tables; a fresh copy is loaded per run so tests may perturb
    values to confirm the harness notices."""

    ex1_sleign2: dict[int, tuple[float, float]] = field(default_factory=dict)
    ex1_series_n1: dict[int, dict[str, float]] = field(default_factory=dict)
    ex1_reference_n3: dict[int, tuple[int, float, float]] = field(default_factory=dict)
    ex1_corrections: dict[int, float] = field(default_factory=dict)
    ex1_u1_coeff: float = 0.0
    ex2_reference: dict[int, tuple[int, float]] = field(default_factory=dict)
    ex3_reference: dict[int, tuple[int, float]] = field(default_factory=dict)


def load_golden() -> GoldenData:
    g = GoldenData()
    for row in _read_csv("example1_sleign2.csv"):
        g.ex1_sleign2[int(row["n"])] = (float(row["lambda_ref"]), float(row["tol"]))
    for row in _read_csv("example1_series_n1.csv"):
        g.ex1_series_n1[int(row["m"])] = {
            "lambda_sum": float(row["lambda_sum"]),
            "u_norm": float(row["u_norm"]),
            "eta_bar": float(row["eta_bar"]),
            "disc": float(row["disc"]),
        }
    for row in _read_csv("example1_reference_n3.csv"):
        g.ex1_reference_n3[int(row["n"])] = (
            int(row["m"]), float(row["lambda_sum"]), float(row["disc"]),
        )
    with _data_path("example1_corrections.csv").open(encoding="utf-8") as fh:
        for raw in csv.reader(fh):
            if not raw or raw[0].lstrip().startswith("#") or raw[0] == "j":
                continue
            if raw[0] == "u1_coeff":
                g.ex1_u1_coeff = float(raw[1])
            else:
                g.ex1_corrections[int(raw[0])] = _fraction(raw[1])
    for row in _read_csv("example2_reference.csv"):
        g.ex2_reference[int(row["n"])] = (int(row["m"]), float(row["lambda_sum"]))
    for row in _read_csv("example3_reference.csv"):
        g.ex3_reference[int(row["n"])] = (int(row["m"]), float(row["lambda_sum"]))
    return g


def canonical_config(key: str) -> ProblemConfig:
    with resources.as_file(_data_path(CANONICAL_CONFIGS[key])) as path:
        return load_config(str(path))


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    runtime: float
    warnings: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = "".join(f"\n      warning: {w}" for w in self.warnings)
        return f"[{status}] {self.name} ({self.runtime:.1f}s): {self.detail}{tail}"


class ValidationContext:
    """Shared solved problems; K_override lowers the node count everywhere
    (quadrature-limited checks then carry a degraded-precision warning)."""

    def __init__(self, K_override: int | None = None, golden: GoldenData | None = None):
        self.K_override = K_override
        self.golden = golden if golden is not None else load_golden()
        self._problems: dict[str, tuple] = {}
        self._solutions: dict[tuple[str, int], fdengine.FdSolution] = {}

    def quadrature_warning(self, key: str) -> list[str]:
        if self.K_override is None:
            return []
        canonical = canonical_config(key).K
        if self.K_override < canonical:
            return [
                f"degraded precision: K = {self.K_override} below the "
                f"reference node count {canonical} for {key}"
            ]
        return []

    def problem(self, key: str):
        if key not in self._problems:
            cfg = canonical_config(key)
            if self.K_override is not None:
                cfg = ProblemConfig(**{**cfg.__dict__, "K": self.K_override})
            q = coeffmesh.Potential.from_text(cfg.q_text, cfg.breakpoints)
            mesh = coeffmesh.build_mesh(cfg.N, cfg.breakpoints)
            qbar = coeffmesh.approximate_coefficient(q, mesh, cfg.rule)
            grid = sincquad.build_grid(mesh, cfg.K)
            q_samples = fdengine.sample_potential(q, grid)
            self._problems[key] = (cfg, q, mesh, qbar, grid, q_samples)
        return self._problems[key]

    def solution(self, key: str, n: int, rank: int | None = None) -> fdengine.FdSolution:
        cfg, q, mesh, qbar, grid, q_samples = self.problem(key)
        rank = cfg.rank if rank is None else rank
        cache_key = (key, n, rank)
        if cache_key not in self._solutions:
            pair = basicsolver.solve_basic(n, qbar, grid, tol=cfg.bisect_tol)
            self._solutions[cache_key] = fdengine.run_fd(
                pair, qbar, grid, q, rank=rank, q_samples=q_samples
            )
        return self._solutions[cache_key]


def _result(name, t0, ok, detail, warnings=()):
    return CheckResult(name, bool(ok), detail, time.time() - t0, list(warnings))


# ---------------------------------------------------------------------------
# the ten checks


def check_basic_spectrum(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    mesh = coeffmesh.build_mesh(1)
    qbar = coeffmesh.PiecewiseConstantCoeff(mesh, (0.0,))
    grid = sincquad.build_grid(mesh, 64)
    worst_lam = 0.0
    worst_fun = 0.0
    xs = np.linspace(-0.95, 0.95, 20)
    for n in range(11):
        pair = basicsolver.solve_basic(n, qbar, grid)
        worst_lam = max(worst_lam, abs(pair.lambda0 - n * (n + 1)))
        vals = np.array([pair.eigenfunction.value(float(x)) for x in xs])
        ref = legendre_polynomial(n, xs)
        k = int(np.argmax(np.abs(ref)))
        worst_fun = max(worst_fun, float(np.max(np.abs(vals - (vals[k] / ref[k]) * ref))))
    ok = worst_lam <= 1e-10 and worst_fun <= 1e-9
    return _result(
        "basic spectrum n(n+1) and Legendre-polynomial eigenfunctions",
        t0, ok,
        f"max |lambda_n - n(n+1)| = {worst_lam:.2e} (tol 1e-10), "
        f"max eigenfunction deviation = {worst_fun:.2e} (tol 1e-9)",
    )


def check_closed_form_corrections(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    g = ctx.golden
    sol = ctx.solution("ex1_n1", 0)
    lam = sol.lambda_corrections
    checks = [
        (abs(lam[1] - g.ex1_corrections[1]), 1e-9, "lambda^(1)"),
        (abs(lam[2] - g.ex1_corrections[2]), 1e-8, "lambda^(2)"),
        (abs(lam[4] - g.ex1_corrections[4]), 1e-8, "lambda^(4)"),
        (abs(lam[6] - g.ex1_corrections[6]), 1e-7, "lambda^(6)"),
    ]
    _, q, mesh, qbar, grid, q_samples = ctx.problem("ex1_n1")
    pair = basicsolver.solve_basic(0, qbar, grid)
    u0_vals, _ = basicsolver.sample_function(pair.eigenfunction, grid)
    sol1 = fdengine.run_fd(pair, qbar, grid, q, rank=1, q_samples=q_samples)
    u1 = (sol1.eigenfunction_samples - u0_vals) / math.sqrt(pair.norm_sq)
    if u0_vals[0, grid.K] < 0:
        u1 = -u1
    node_err = float(np.max(np.abs(u1 - g.ex1_u1_coeff * grid.z)))
    checks.append((node_err, 1e-7, "u^(1) node values"))
    ok = all(err <= tol for err, tol, _ in checks)
    detail = ", ".join(f"{name} err {err:.1e} (tol {tol:g})" for err, tol, name in checks)
    return _result("closed-form corrections for q(x) = x on one interval",
                   t0, ok, detail, ctx.quadrature_warning("ex1_n1"))


def check_single_interval_series(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    g = ctx.golden
    sol = ctx.solution("ex1_n1", 0)
    lam10 = float(sol.lambda_partial[10])
    ref = g.ex1_series_n1[10]["lambda_sum"]
    sl2 = g.ex1_sleign2[0][0]
    disc = abs(lam10 - sl2)
    disc_ref = g.ex1_series_n1[10]["disc"]
    ok = abs(lam10 - ref) <= 1e-8 and abs(disc - disc_ref) <= 1e-7
    return _result(
        "single-interval rank-10 eigenvalue sum and its reference gap",
        t0, ok,
        f"lambda(10) = {lam10:.10f} vs {ref} (err {abs(lam10 - ref):.1e}, tol 1e-8); "
        f"|lambda - ref| = {disc:.3e} vs {disc_ref:.3e} (tol 1e-7)",
        ctx.quadrature_warning("ex1_n1"),
    )


def check_three_interval_reference(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    g = ctx.golden
    tols = {0: 1e-9, 1: 1e-8, 2: 1e-8, 3: 1e-8, 4: 1e-8}
    details = []
    ok = True
    for n, (m, ref, _) in sorted(g.ex1_reference_n3.items()):
        sol = ctx.solution("ex1_n3", n)
        lam = float(sol.lambda_partial[m])
        err = abs(lam - ref)
        eta = float(sol.eta[m])
        row_ok = err <= tols[n] and eta <= 1e-9
        ok = ok and row_ok
        details.append(f"n={n}: err {err:.1e} (tol {tols[n]:g}), eta {eta:.1e}")
    return _result(
        "three-interval reference eigenvalue sums with eta <= 1e-9",
        t0, ok, "; ".join(details), ctx.quadrature_warning("ex1_n3"),
    )


def check_superexponential_decay(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    sol = ctx.solution("ex1_n3", 0)
    _, q, mesh, qbar, grid, _ = ctx.problem("ex1_n3")
    pair = basicsolver.solve_basic(0, qbar, grid)
    dev = coeffmesh.sup_deviation(q, qbar)
    bound = fdengine.apriori_bounds(pair.gap_M, dev.value)
    norms = sol.norms_normalized
    decreasing = all(norms[j + 1] < norms[j] for j in range(2, sol.rank))
    majorant_ok = True
    if bound.r <= 1.0:
        majorant_ok = all(
            norms[j] <= bound.r**j * fdengine.alpha(j) * (1.0 + 1e-9)
            for j in range(1, sol.rank + 1)
        )
    ok = decreasing and majorant_ok
    return _result(
        "superexponential decay of correction norms with the majorant bound",
        t0, ok,
        f"r = {bound.r:.4f}; ln||u^(j)|| strictly decreasing for j >= 2: {decreasing}; "
        f"||u^(j)|| <= r^j alpha_j: {majorant_ok}",
        ctx.quadrature_warning("ex1_n3"),
    )


def check_bound_identities(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    catalan_ok = all(
        fdengine.alpha_fraction(j) * 4**j == fdengine.catalan(j) for j in range(16)
    )
    recursion = fdengine.majorant_sequence(16)
    recursion_ok = all(
        recursion[j] == fdengine.alpha_fraction(j) * 4**j for j in range(1, 16)
    )
    tail_ok = all(
        fdengine.alpha(m + 1) <= 1.0 / ((m + 1) * math.sqrt(math.pi * m))
        for m in range(1, 31)
    )
    # with qbar = 0 and M_n = 1/(2n), the general ratio reduces to 2*||q||/n
    reduction_ok = True
    for n in range(1, 8):
        r = fdengine.apriori_bounds(1.0 / (2 * n), 1.0).r
        reduction_ok = reduction_ok and abs(r - 2.0 / n) < 1e-15
    ok = catalan_ok and recursion_ok and tail_ok and reduction_ok
    return _result(
        "majorant coefficient identities (Catalan, tail bound, zero-qbar reduction)",
        t0, ok,
        f"alpha_j*4^j Catalan: {catalan_ok}; recursion match: {recursion_ok}; "
        f"alpha tail bound: {tail_ok}; reduction to 2||q||/n: {reduction_ok}",
    )


def check_transfer_wronskian(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    _, _, mesh, qbar, _, _ = ctx.problem("ex2")
    pts = np.asarray(mesh.points)
    rng = np.random.default_rng(20240817)
    lams = rng.uniform(-5.0, 500.0, size=100)
    worst = 0.0
    for lam in lams:
        _, deltas = basicsolver.transfer_coefficients(
            float(lam), qbar, 1.0, 0.0, return_deltas=True
        )
        for k, delta in enumerate(deltas):
            x_node = pts[mesh.n_intervals - 1 - k]
            exact = 1.0 / (1.0 - x_node * x_node)
            worst = max(worst, abs(delta - exact) / abs(exact))
    ok = worst <= 1e-9
    return _result(
        "transfer Wronskian denominators equal 1/(1 - x^2)",
        t0, ok, f"worst relative deviation {worst:.2e} over 100 random spectral values (tol 1e-9)",
    )


def check_oracle_agreement(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    g = ctx.golden
    _, q, _, _, _, _ = ctx.problem("ex1_n3")
    oracle_vals = galerkin_oracle(q, 200)
    ok = True
    details = []
    for n, (m, _, disc) in sorted(g.ex1_reference_n3.items()):
        sol = ctx.solution("ex1_n3", n)
        lam = float(sol.lambda_partial[m])
        gap = abs(oracle_vals[n] - lam)
        sl2 = g.ex1_sleign2[n][0]
        within_disc = abs(lam - sl2) <= disc * 1.05 + 1e-9
        oracle_within = abs(oracle_vals[n] - sl2) <= disc * 1.05 + 1e-9
        row_ok = gap <= 1e-8 and within_disc and oracle_within
        ok = ok and row_ok
        details.append(f"n={n}: |oracle - fd| {gap:.1e}")
    return _result(
        "independent Galerkin oracle agrees with the correction series",
        t0, ok, "; ".join(details) + " (tol 1e-8, both within reference gaps)",
        ctx.quadrature_warning("ex1_n3"),
    )


def check_singular_potentials(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    g = ctx.golden
    ok = True
    details = []
    for key, table in (("ex2", g.ex2_reference), ("ex3", g.ex3_reference)):
        for n, (m, ref) in sorted(table.items()):
            sol = ctx.solution(key, n)
            lam = float(sol.lambda_partial[m])
            err = abs(lam - ref)
            row_ok = err <= 1e-6
            if key == "ex3":
                row_ok = row_ok and float(sol.eta[m]) <= 1e-8
            ok = ok and row_ok
            details.append(f"{key} n={n}: err {err:.1e}")
    return _result(
        "singular potentials reproduce their reference eigenvalue sums",
        t0, ok, "; ".join(details) + " (tol 1e-6, eta tol 1e-8)",
        ctx.quadrature_warning("ex2") + ctx.quadrature_warning("ex3"),
    )


def check_quadrature_decay(ctx: ValidationContext) -> CheckResult:
    t0 = time.time()
    mesh = coeffmesh.build_mesh(1)
    errs = {}
    for K in (50, 200):
        grid = sincquad.build_grid(mesh, K)
        samples = 1.0 / np.sqrt(grid.one_minus_sq)
        errs[K] = abs(sincquad.integrate(grid, samples) - math.pi)
    ratio = errs[50] / max(errs[200], 1e-300)
    ok = ratio >= 1e3
    return _result(
        "tanh-rule error decays exponentially in sqrt(K)",
        t0, ok,
        f"err(K=50) = {errs[50]:.2e}, err(K=200) = {errs[200]:.2e}, ratio {ratio:.1e} (>= 1e3)",
    )


CHECKS = [
    ("1", check_basic_spectrum),
    ("2", check_closed_form_corrections),
    ("3", check_single_interval_series),
    ("4", check_three_interval_reference),
    ("5", check_superexponential_decay),
    ("6", check_bound_identities),
    ("7", check_transfer_wronskian),
    ("8", check_oracle_agreement),
    ("9", check_singular_potentials),
    ("10", check_quadrature_decay),
]


def run_all(K_override: int | None = None, golden: GoldenData | None = None) -> list[CheckResult]:
    ctx = ValidationContext(K_override=K_override, golden=golden)
    return [func(ctx) for _, func in CHECKS]
