"""The thirteen acceptance criteria, each at its stated scale and tolerance.

Every criterion returns a :class:`CriterionResult` with named numeric checks
and a wall-clock budget. Shared by ``tests/test_acceptance.py`` and the
``verify-all`` command.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import ergodic, infogeo, maps, picard, spread
from .core import StateVector
from .logic import evaluate, parse_formula, random_formula, sin_structure, toy_structure
from .logic.syntax import STATE, TIME, Exists, Forall, Not, Var
from .provability import formulas as mf
from .provability.kripke import brute_force_countermodel
from .provability.tableau import gl_decide
from .provability.theorems import fixed_point_lambda, lob_instance


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float | str
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance, "pass": self.passed}


@dataclass
class CriterionResult:
    number: int
    title: str
    budget: float
    checks: list[Check] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def within_budget(self) -> bool:
        return self.runtime < self.budget

    @property
    def passed(self) -> bool:
        return self.within_budget and all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        out = [f"{c.name}: {c.value!r} vs {c.tolerance}" for c in self.checks if not c.passed]
        if not self.within_budget:
            out.append(f"runtime {self.runtime:.2f}s exceeds {self.budget:g}s")
        return out

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed else "  <- " + "; ".join(self.failures())
        return f"[{tag}] {self.number:>2}. {self.title} ({self.runtime:.2f}s / {self.budget:g}s){extra}"

    def to_json(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "pass": self.passed,
            "runtime": self.runtime,
            "budget": self.budget,
            "checks": [c.to_json() for c in self.checks],
        }


def _le(name: str, value: float, tol: float) -> Check:
    return Check(name, float(value), tol, bool(value <= tol))


def _lt(name: str, value: float, tol: float) -> Check:
    return Check(name, float(value), tol, bool(value < tol))


def _is(name: str, ok: bool, value: float | None = None) -> Check:
    return Check(name, float(ok if value is None else value), "true", bool(ok))


# --------------------------------------------------------------------------- criteria
def picard_decay() -> list[Check]:
    field_ = picard.VectorField(lambda x: -x, lipschitz_bound=1.0)
    sol = picard.solve_ivp_picard(field_, StateVector.of(1.0), 5.0, picard.PicardConfig(fixed_point_tol=1e-10))
    err = np.max(np.abs(sol.values[:, 0] - np.exp(-sol.times)))
    q = sol.contraction_constant
    return [
        _le("max |x(t) - exp(-t)|", err, 1e-6),
        _le("contraction constant q = L T", q, 0.5),
        _le("max successive gap ratio", max(sol.contraction_ratios), q + 1e-9),
    ]


def rotation_recurrence() -> list[Check]:
    theta = maps.GOLDEN
    convs = [c for c in maps.convergents(theta, 40) if 2 <= c.q <= 10946]
    exact = Fraction(theta)
    orbit_gap = max(c.q * maps.circle_distance(float(maps.frac_product(c.q, theta)), 0.0) for c in convs)
    approx = max(float(abs(exact * c.q - c.p) * c.q) for c in convs)
    return [
        _is("denominators run 2, 3, 5, ..., 10946",
            [c.q for c in convs][:3] == [2, 3, 5] and convs[-1].q == 10946, len(convs)),
        _lt("max q * dist(orbit_q, start) [turns]", orbit_gap, 1.0),
        _lt("max q * |theta q - p|", approx, 1.0),
    ]


def transfer_fixed_point() -> list[Check]:
    rng = np.random.default_rng(0)
    xs = rng.uniform(0.01, 0.99, 1000)
    worst = max(abs(ergodic.transfer_apply(ergodic.arcsine_density, x) - ergodic.arcsine_density(x)) for x in xs)
    return [_le("max |(L h)(x) - h(x)|", worst, 1e-9)]


def ulam_density() -> list[Check]:
    errs = [
        ergodic.ulam_invariant_density("logistic", ergodic.UlamPartition(n), 1000, seed=0).l1_distance()
        for n in (256, 512, 1024, 2048)
    ]
    mono = all(b <= a for a, b in zip(errs, errs[1:]))
    return [
        _le("L1 to arcsine at 2048 bins", errs[-1], 0.02),
        _is("L1 non-increasing over 256/512/1024/2048", mono, errs[0] - errs[-1]),
    ]


def birkhoff_logistic() -> list[Check]:
    worst = 0.0
    for seed in range(10):
        x0 = float(np.random.default_rng(seed).uniform(0.01, 0.99))
        avg = ergodic.birkhoff_average("logistic", lambda x: x, x0, 10**6)
        worst = max(worst, abs(avg - 0.5))
    return [_le("max over 10 seeds |avg - 1/2|", worst, 5e-3)]


def cat_map() -> list[Check]:
    lp, lm = maps.cat_eigen()
    series = ergodic.correlation_decay(
        "cat",
        lambda xy: np.sin(2 * np.pi * xy[..., 0]),
        lambda xy: np.sin(2 * np.pi * xy[..., 1]),
        n_max=40,
        ensemble=10**6,
        seed=0,
    )
    return [
        _le("|lambda_+ - (1 + sqrt 2)|", abs(lp - (1 + math.sqrt(2))), 1e-12),
        _le("|lambda_- - (1 - sqrt 2)|", abs(lm - (1 - math.sqrt(2))), 1e-12),
        _lt("max |C_n| for n in [20, 40]", np.max(np.abs(series.values[20:41])), 1e-3),
    ]


def lyapunov() -> list[Check]:
    lam = maps.lyapunov_exponent("logistic", 0.3, 10**6)
    cat = maps.lyapunov_exponent("cat")
    return [
        _le("|logistic exponent - ln 2|", abs(lam - math.log(2)), 0.01),
        _is("cat exponent == ln(lambda_+)", cat == math.log(maps.cat_eigen()[0]), cat),
        _le("|cat exponent - ln(1 + sqrt 2)|", abs(cat - math.log(1 + math.sqrt(2))), 1e-12),
    ]


def sensitivity() -> list[Check]:
    rng = np.random.default_rng(0)
    starts = rng.uniform(0.0, 1.0, 100)
    escaped = sum(
        1 for x in starts
        if (e := maps.sensitivity_probe("logistic", x, 1e-9, 60).first_escape) is not None and e <= 60
    )
    rot = maps.sensitivity_probe("rotation", 0.1234, 1e-3, 10**4).separations
    return [
        Check("logistic starts escaping within 60 steps", escaped, ">= 95", escaped >= 95),
        _le("rotation separation spread", max(rot) - min(rot), 1e-15),
    ]


def infogeo_checks() -> list[Check]:
    rng = np.random.default_rng(0)
    tang = fd = 0.0
    for n in (2, 3, 5):
        for _ in range(100):
            p, q = infogeo.SimplexPoint.random(rng, n), infogeo.SimplexPoint.random(rng, n)
            g = infogeo.fisher_gradient_kl(p, q).as_array()
            o = infogeo.finite_difference_metric_gradient(infogeo.kl_raw, p, q).as_array()
            tang = max(tang, abs(g.sum()))
            fd = max(fd, float(np.max(np.abs(g - o))))
    zero = max(
        float(np.max(np.abs(infogeo.fisher_gradient_kl(p, p).as_array())))
        for p in (infogeo.SimplexPoint.random(rng, n) for n in (2, 3, 5) for _ in range(10))
    )
    converged = decreasing = 0
    for _ in range(20):
        n = int(rng.choice([2, 3, 5]))
        p0, q = infogeo.SimplexPoint.random(rng, n), infogeo.SimplexPoint.random(rng, n)
        try:
            path = infogeo.gradient_flow(p0, q, max_steps=10**4, tol=1e-8)
        except infogeo.FlowDidNotConverge:
            continue
        converged += path.divergences[-1] < 1e-8
        decreasing += path.strictly_decreasing
    return [
        _le("max |sum of gradient components|", tang, 1e-10),
        _le("max |formula - finite-difference oracle|", fd, 1e-6),
        Check("max |gradient at p = q|", zero, "== 0", zero == 0.0),
        Check("flows reaching D < 1e-8", converged, "20 of 20", converged == 20),
        Check("flows strictly decreasing", decreasing, "20 of 20", decreasing == 20),
    ]


def spread_modulus() -> list[Check]:
    spec = spread.SpreadSpec.dyadic(8, max_depth=12)
    F = lambda s: s * s
    out = []
    for eps in (0.2, 0.1, 0.05):
        res = spread.modulus_of_continuity(spec, F, eps)
        n = res.bar_depth
        ok, worst = spread.verify_bar(spec, F, n, eps)
        below_ok = n == 0 or not spread.verify_bar(spec, F, n - 1, eps)[0]
        out += [
            _lt(f"eps={eps}: tip gap at N={n}", worst, eps),
            _is(f"eps={eps}: N={n} is minimal", ok and below_ok, n),
            _lt(f"eps={eps}: 2^-(N+1)", 2.0 ** -(n + 1), eps / 2),
        ]
    return out


def logic_checks() -> list[Check]:
    m = sin_structure()
    a = evaluate(m, parse_formula("forall t . exists s . X(t,s)"))
    b = evaluate(m, parse_formula("forall t . forall s . (X(t,s) -> P(s))"))
    toy = toy_structure(10, 10, seed=0)
    rng = np.random.default_rng(0)
    dn = dual = 0
    for i in range(500):
        f = random_formula(rng, 4)
        dn += evaluate(toy, Not(Not(f))) == evaluate(toy, f)
        sort = TIME if i % 2 else STATE
        v = Var("v", sort)
        body = random_formula(rng, 3, {"v": sort})
        dual += evaluate(toy, Forall(v, body)) == evaluate(toy, Not(Exists(v, Not(body))))
    return [
        _is("sin: forall t exists s X(t,s) is true", a),
        _is("sin: forall t forall s (X(t,s) -> P(s)) is false", not b),
        Check("double negation agreement", dn, "500 of 500", dn == 500),
        Check("quantifier duality agreement", dual, "500 of 500", dual == 500),
    ]


def provability_checks() -> list[Check]:
    p = mf.parse_modal
    k = gl_decide(p("box(p -> q) -> (box p -> box q)")).valid
    four = gl_decide(p("box p -> box box p")).valid
    rng = np.random.default_rng(0)
    lob = sum(gl_decide(lob_instance(mf.random_modal(rng, 4))).valid for _ in range(50))
    con = gl_decide(p("!box false"))
    cm = con.countermodel
    dead_end = (
        not con.valid and cm is not None and len(cm.worlds) == 1 and not cm.relation
        and not cm.holds(con.formula, con.world) and cm.holds(mf.Box(mf.BOT), con.world)
    )
    fp = fixed_point_lambda()
    agree = 0
    for _ in range(200):
        f = mf.random_modal(rng, 3)
        agree += gl_decide(f).valid == (brute_force_countermodel(f, 4) is None)
    return [
        _is("K schema valid", k),
        _is("4 schema valid", four),
        Check("random Loeb instances valid", lob, "50 of 50", lob == 50),
        _is("!box false invalid with dead-end countermodel", dead_end),
        _is("Lambda is true", fp.formula == mf.TOP),
        Check("Lambda certificates valid", sum(c.valid for c in fp.certificates), "3 of 3", fp.certified),
        Check("agreement with 4-world brute force", agree, "200 of 200", agree == 200),
    ]


def recurrence_checks() -> list[Check]:
    rot = ergodic.recurrence_statistics("rotation", 0.01, 10**5, 100, seed=0)
    ident = ergodic.recurrence_statistics("identity", 0.01, 10, 100, seed=0)
    return [
        Check("rotation fraction recurrent", rot.fraction_recurrent, "== 1.0", rot.fraction_recurrent == 1.0),
        Check("identity mean first return", ident.mean_first_return, "== 1", ident.mean_first_return == 1.0),
    ]


CRITERIA: list[tuple[int, str, float, Callable[[], list[Check]]]] = [
    (1, "Picard solver on x' = -x", 2.0, picard_decay),
    (2, "Rotation recurrence at convergent denominators", 1.0, rotation_recurrence),
    (3, "Transfer-operator fixed point", 1.0, transfer_fixed_point),
    (4, "Ulam invariant density", 60.0, ulam_density),
    (5, "Birkhoff average of the logistic map", 5.0, birkhoff_logistic),
    (6, "Cat map eigenvalues and correlations", 30.0, cat_map),
    (7, "Lyapunov exponents", 5.0, lyapunov),
    (8, "Sensitivity and isometry", 1.0, sensitivity),
    (9, "Fisher gradient and gradient flow", 10.0, infogeo_checks),
    (10, "Spread modulus of continuity", 30.0, spread_modulus),
    (11, "Trajectory logic", 10.0, logic_checks),
    (12, "Provability logic", 60.0, provability_checks),
    (13, "Recurrence statistics", 5.0, recurrence_checks),
]


def run_criterion(number: int) -> CriterionResult:
    num, title, budget, fn = next(c for c in CRITERIA if c[0] == number)
    t0 = time.perf_counter()
    checks = fn()
    return CriterionResult(num, title, budget, checks, time.perf_counter() - t0)


def run_all(numbers=None) -> list[CriterionResult]:
    return [run_criterion(n) for n, *_ in CRITERIA if numbers is None or n in numbers]
