"""Experiment runners behind ``flowlab run``.

Each experiment takes a parameter dataclass and a seed and returns an
:class:`Outcome`: named checks, CSV tables, SVG plots and a JSON summary.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import ergodic, infogeo, maps, picard, spread
from .acceptance import Check, _is, _le, _lt
from .core import StateVector
from .logic import evaluate_with_witness, parse_formula, sin_structure
from .logic.syntax import pretty
from .provability import formulas as mf
from .provability.tableau import gl_decide
from .provability.theorems import extension_hierarchy, fixed_point_lambda, lob_instance
from .structures import structure_from_json
from .svg import line_plot, step_curve

Table = tuple[list[str], list[list[Any]]]


@dataclass
class Outcome:
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, Table] = field(default_factory=dict)
    plots: dict[str, str] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)


# --------------------------------------------------------------------------- parameter blocks
@dataclass
class PicardParams:
    field: str = "decay"  # decay: x' = -x; oscillator: (x, v)' = (v, -x)
    horizon: float = 5.0
    grid_step: float = 1e-3
    tol: float = 1e-10
    window_factor: float = 0.5


@dataclass
class RotationParams:
    theta: float = maps.GOLDEN
    convergents: int = 20
    epsilon: float = 0.01
    n_max: int = 10**4
    max_denominator: int = 10946


@dataclass
class LogisticParams:
    bins: list[int] = field(default_factory=lambda: [256, 512, 1024, 2048])
    samples_per_bin: int = 1000
    birkhoff_n: int = 10**6
    correlation_lags: int = 20
    ensemble: int = 10**5


@dataclass
class CatmapParams:
    ensemble: int = 10**6
    n_max: int = 40
    threshold: float = 1e-3
    first_lag: int = 20


@dataclass
class InfogeoParams:
    dims: list[int] = field(default_factory=lambda: [2, 3, 5])
    pairs: int = 100
    flows: int = 20
    step_size: float = 0.1
    tol: float = 1e-8
    max_steps: int = 10**4


@dataclass
class SpreadParams:
    grid_exponent: int = 8
    max_depth: int = 12
    epsilons: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05])
    function: str = "square"  # square | identity | sine


@dataclass
class LogicParams:
    formulas: list[str] = field(default_factory=lambda: [
        "forall t . exists s . X(t,s)",
        "forall t . forall s . (X(t,s) -> P(s))",
    ])
    structure: dict | None = None  # JSON structure description; default is the sin structure
    expected: list[bool] | None = None


@dataclass
class GLParams:
    formulas: list[str] = field(default_factory=lambda: [
        "box(p -> q) -> (box p -> box q)",
        "box p -> box box p",
        "!box false",
    ])
    lob_random: int = 50
    lob_depth: int = 4
    hierarchy_depth: int = 3


@dataclass
class RecurrenceParams:
    system: str = "rotation"
    epsilon: float = 0.01
    n_max: int = 10**5
    samples: int = 100
    theta: float = maps.GOLDEN


# --------------------------------------------------------------------------- experiments
def run_picard(p: PicardParams, seed: int) -> Outcome:
    cfg = picard.PicardConfig(grid_step=p.grid_step, fixed_point_tol=p.tol, window_factor=p.window_factor)
    if p.field == "decay":
        f = picard.VectorField(lambda x: -x, 1.0)
        s0 = StateVector.of(1.0)
        exact = lambda t: np.exp(-t)[:, None]
    elif p.field == "oscillator":
        f = picard.VectorField(lambda x: np.array([x[1], -x[0]]), 1.0, dim=2)
        s0 = StateVector.of(1.0, 0.0)
        exact = lambda t: np.stack([np.cos(t), -np.sin(t)], axis=1)
    else:
        raise ValueError(f"unknown field {p.field!r}")
    sol = picard.solve_ivp_picard(f, s0, p.horizon, cfg)
    t, v = sol.times, sol.values
    err = float(np.max(np.abs(v - exact(t))))
    q = sol.contraction_constant
    out = Outcome()
    out.checks = [
        _le("max error vs closed form", err, 1e-6),
        _le("max successive gap ratio", max(sol.contraction_ratios, default=0.0), q + 1e-9),
    ]
    header = ["t"] + [f"x{i}" for i in range(v.shape[1])]
    out.tables["trajectory"] = (header, [[ti, *row] for ti, row in zip(t, v)])
    out.tables["ratios"] = (["k", "ratio"], [[k, r] for k, r in enumerate(sol.contraction_ratios)])
    out.plots["trajectory"] = line_plot(
        {f"x{i}": (t, v[:, i]) for i in range(v.shape[1])}, "Picard solution", "t", "x"
    )
    out.summary = {"contraction_constant": q, "iterations": sol.iterations_used,
                   "windows": len(sol.window_iterations), "max_error": err, "residual": sol.residual}
    return out


def run_rotation(p: RotationParams, seed: int) -> Outcome:
    sys = maps.RotationSystem(p.theta)
    convs = maps.convergents(p.theta, p.convergents)
    rows, ok_orbit, ok_approx = [], True, True
    for c in convs:
        gap = maps.circle_distance(float(maps.frac_product(c.q, p.theta)), 0.0)
        approx = abs(c.q * p.theta - c.p)
        rows.append([c.p, c.q, gap, approx])
        if 2 <= c.q <= p.max_denominator:
            ok_orbit &= gap < 1.0 / c.q
            ok_approx &= approx < 1.0 / c.q
    times = maps.return_times(sys, maps.CircleState(0.0), p.epsilon, p.n_max)
    out = Outcome()
    out.checks = [
        _is("orbit at n = q within 1/q of start", ok_orbit),
        _is("|theta q - p| < 1/q", ok_approx),
    ]
    out.tables["convergents"] = (["p", "q", "orbit_gap", "abs_q_theta_minus_p"], rows)
    out.tables["return_times"] = (["n"], [[n] for n in times])
    out.plots["approximation"] = line_plot(
        {"q |q theta - p|": ([r[1] for r in rows], [r[1] * r[3] for r in rows])},
        "Convergent quality", "q", "q |q theta - p|",
    )
    out.summary = {"convergents": [[c.p, c.q] for c in convs], "return_times": times[:50],
                   "n_returns": len(times)}
    return out


def run_logistic(p: LogisticParams, seed: int) -> Outcome:
    out = Outcome()
    errs = []
    dens = None
    for n in p.bins:
        dens = ergodic.ulam_invariant_density("logistic", ergodic.UlamPartition(n), p.samples_per_bin, seed)
        errs.append(dens.l1_distance())
    mono = all(b <= a for a, b in zip(errs, errs[1:]))
    rng = np.random.default_rng(seed)
    x0 = float(rng.uniform(0.01, 0.99))
    avg = ergodic.birkhoff_average("logistic", lambda x: x, x0, p.birkhoff_n)
    bump = lambda x: np.maximum(0.0, 1.0 - np.abs(x - 0.3) / 0.2)
    corr = ergodic.correlation_decay("logistic", bump, bump, p.correlation_lags, p.ensemble, seed)
    out.checks = [
        _le(f"L1 to arcsine at {p.bins[-1]} bins", errs[-1], 0.02),
        _is("L1 non-increasing in bins", mono),
        _le("|Birkhoff average - 1/2|", abs(avg - 0.5), 5e-3),
    ]
    out.tables["ulam_l1"] = (["bins", "l1"], [[n, e] for n, e in zip(p.bins, errs)])
    edges = dens.partition.edges
    mids = 0.5 * (edges[1:] + edges[:-1])
    out.tables["density"] = (["x", "ulam", "arcsine"],
                             [[x, d, ergodic.arcsine_density(x)] for x, d in zip(mids, dens.density)])
    out.tables["correlations"] = (["n", "C_n", "stderr"],
                                  [[n, v, s] for n, (v, s) in enumerate(zip(corr.values, corr.stderr))])
    xs, ys = step_curve(list(edges), list(dens.density))
    out.plots["density"] = line_plot(
        {"Ulam": (xs, ys), "arcsine": (mids, [ergodic.arcsine_density(x) for x in mids])},
        "Invariant density", "x", "density",
    )
    lags = np.arange(len(corr.values))
    out.plots["correlations"] = line_plot(
        {"|C_n|": (lags, np.abs(corr.values)), "3 stderr": (lags, 3 * corr.stderr)},
        "Correlation decay", "n", "|C_n|", logy=True,
    )
    out.summary = {"l1": dict(zip(map(str, p.bins), errs)), "birkhoff_average": avg, "x0": x0,
                   "fitted_rho": corr.fitted_rho, "fitted_C": corr.fitted_C,
                   "lyapunov": maps.lyapunov_exponent("logistic", x0, max(p.birkhoff_n, 10**4))}
    return out


def run_catmap(p: CatmapParams, seed: int) -> Outcome:
    lp, lm = maps.cat_eigen()
    corr = ergodic.correlation_decay(
        "cat",
        lambda xy: np.sin(2 * np.pi * xy[..., 0]),
        lambda xy: np.sin(2 * np.pi * xy[..., 1]),
        p.n_max, p.ensemble, seed,
    )
    tail = float(np.max(np.abs(corr.values[p.first_lag:])))
    out = Outcome()
    out.checks = [
        _le("|lambda_+ - (1 + sqrt 2)|", abs(lp - 1 - math.sqrt(2)), 1e-12),
        _lt(f"max |C_n|, n >= {p.first_lag}", tail, p.threshold),
    ]
    out.tables["correlations"] = (["n", "C_n", "stderr"],
                                  [[n, v, s] for n, (v, s) in enumerate(zip(corr.values, corr.stderr))])
    lags = np.arange(len(corr.values))
    out.plots["correlations"] = line_plot(
        {"|C_n|": (lags, np.abs(corr.values)), "3 stderr": (lags, 3 * corr.stderr)},
        "Cat map correlations", "n", "|C_n|", logy=True,
    )
    out.summary = {"lambda_plus": lp, "lambda_minus": lm, "lyapunov": maps.lyapunov_exponent("cat"),
                   "max_tail_correlation": tail}
    return out


def run_infogeo(p: InfogeoParams, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    tang = fd = 0.0
    for n in p.dims:
        for _ in range(p.pairs):
            a, b = infogeo.SimplexPoint.random(rng, n), infogeo.SimplexPoint.random(rng, n)
            g = infogeo.fisher_gradient_kl(a, b).as_array()
            o = infogeo.finite_difference_metric_gradient(infogeo.kl_raw, a, b).as_array()
            tang = max(tang, abs(float(g.sum())))
            fd = max(fd, float(np.max(np.abs(g - o))))
    rows, ok, paths = [], 0, {}
    for k in range(p.flows):
        n = int(p.dims[k % len(p.dims)])
        a, b = infogeo.SimplexPoint.random(rng, n), infogeo.SimplexPoint.random(rng, n)
        path = infogeo.gradient_flow(a, b, p.step_size, p.max_steps, p.tol)
        ok += path.strictly_decreasing and path.divergences[-1] <= p.tol
        rows.append([k, n, path.steps, path.divergences[0], path.divergences[-1]])
        if k < 3:
            paths[f"flow {k}"] = (np.arange(len(path.divergences)), path.divergences)
    out = Outcome()
    out.checks = [
        _le("max |sum of gradient|", tang, 1e-10),
        _le("max |formula - finite difference|", fd, 1e-6),
        Check("flows converged and strictly decreasing", ok, f"{p.flows} of {p.flows}", ok == p.flows),
    ]
    out.tables["flows"] = (["flow", "n", "steps", "D_start", "D_end"], rows)
    out.plots["divergence"] = line_plot(paths, "KL along the Fisher gradient flow", "step", "D", logy=True)
    out.summary = {"tangency": tang, "fd_agreement": fd}
    return out


_SPREAD_F: dict[str, Callable[[float], float]] = {
    "square": lambda s: s * s,
    "identity": lambda s: s,
    "sine": lambda s: math.sin(math.pi * s),
}


def run_spread(p: SpreadParams, seed: int) -> Outcome:
    if p.function not in _SPREAD_F:
        raise ValueError(f"unknown function {p.function!r}; choose from {sorted(_SPREAD_F)}")
    F = _SPREAD_F[p.function]
    spec = spread.SpreadSpec.dyadic(p.grid_exponent, p.max_depth)
    out = Outcome()
    rows, osc = [], {}
    for eps in p.epsilons:
        res = spread.modulus_of_continuity(spec, F, eps)
        n = res.bar_depth
        ok, worst = spread.verify_bar(spec, F, n, eps)
        minimal = n == 0 or not spread.verify_bar(spec, F, n - 1, eps)[0]
        out.checks += [
            _is(f"eps={eps}: bar verified at N={n}", ok, worst),
            _is(f"eps={eps}: N minimal", minimal, n),
        ]
        rows.append([eps, n, res.omega, worst])
        osc = res.level_oscillation
    out.tables["modulus"] = (["epsilon", "N", "omega", "max_tip_gap"], rows)
    out.tables["level_oscillation"] = (["depth", "oscillation"], [[k, v] for k, v in enumerate(osc)])
    out.plots["oscillation"] = line_plot({"oscillation": (range(len(osc)), osc)},
                                         "Oscillation by depth", "depth", "osc", logy=True)
    out.summary = {"bar_depths": {str(r[0]): r[1] for r in rows}}
    return out


def run_logic(p: LogicParams, seed: int) -> Outcome:
    m = structure_from_json(p.structure) if p.structure is not None else sin_structure()
    if p.expected is not None and len(p.expected) != len(p.formulas):
        raise ValueError("expected must have one entry per formula")
    out = Outcome()
    rows = []
    for i, text in enumerate(p.formulas):
        f = parse_formula(text)
        r = evaluate_with_witness(m, f)
        rows.append([pretty(f), r.value, r.nodes_evaluated])
        out.summary[text] = {"value": r.value, "bindings": r.bindings, "nodes": r.nodes_evaluated}
        if p.expected is not None:
            out.checks.append(_is(f"formula {i} evaluates to {p.expected[i]}", r.value == p.expected[i]))
    out.summary["semantics"] = m.label
    out.tables["results"] = (["formula", "value", "nodes"], rows)
    return out


def run_gl(p: GLParams, seed: int) -> Outcome:
    out = Outcome()
    rows = []
    for text in p.formulas:
        d = gl_decide(mf.parse_modal(text))
        rows.append([text, d.valid, len(d.countermodel.worlds) if d.countermodel else 0])
        out.summary[text] = d.to_json()
    rng = np.random.default_rng(seed)
    lob = sum(gl_decide(lob_instance(mf.random_modal(rng, p.lob_depth))).valid for _ in range(p.lob_random))
    fp = fixed_point_lambda()
    hier = extension_hierarchy(p.hierarchy_depth)
    out.checks = [
        Check("random Loeb instances valid", lob, f"{p.lob_random} of {p.lob_random}", lob == p.lob_random),
        _is("Lambda certificates valid", fp.certified),
        _is("hierarchy levels behave", all(r.ok for r in hier)),
    ]
    out.tables["decisions"] = (["formula", "valid", "countermodel_worlds"], rows)
    out.tables["hierarchy"] = (
        ["level", "axioms", "next_derives_con", "derives_con", "consistent"],
        [[r.level.index, len(r.level.extra_axioms), r.next_derives_con, r.derives_con, r.consistent] for r in hier],
    )
    out.summary["lambda"] = {c.name: {"formula": mf.show(c.formula), "valid": c.valid} for c in fp.certificates}
    return out


def run_recurrence(p: RecurrenceParams, seed: int) -> Outcome:
    rep = ergodic.recurrence_statistics(p.system, p.epsilon, p.n_max, p.samples, seed, theta=p.theta)
    out = Outcome()
    out.checks = [Check("fraction recurrent", rep.fraction_recurrent, "== 1.0", rep.fraction_recurrent == 1.0)]
    out.tables["first_returns"] = (["sample", "first_return"],
                                   [[i, "" if v is None else v] for i, v in enumerate(rep.first_returns)])
    out.summary = {"fraction_recurrent": rep.fraction_recurrent, "mean_first_return": rep.mean_first_return}
    return out


EXPERIMENTS: dict[str, tuple[type, Callable[[Any, int], Outcome]]] = {
    "picard": (PicardParams, run_picard),
    "rotation": (RotationParams, run_rotation),
    "logistic": (LogisticParams, run_logistic),
    "catmap": (CatmapParams, run_catmap),
    "infogeo": (InfogeoParams, run_infogeo),
    "spread": (SpreadParams, run_spread),
    "logic": (LogicParams, run_logic),
    "gl": (GLParams, run_gl),
    "recurrence": (RecurrenceParams, run_recurrence),
}


def make_params(experiment: str, block: dict) -> Any:
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; choose from {sorted(EXPERIMENTS)}")
    cls = EXPERIMENTS[experiment][0]
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(block) - names)
    if unknown:
        raise ValueError(f"unknown parameter(s) for {experiment}: {', '.join(unknown)}")
    return cls(**block)
