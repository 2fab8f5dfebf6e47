"""Randomized experiments probing operator-norm inequalities.

Every experiment draws from a seeded :class:`Ensemble` and produces an
:class:`ExperimentReport` with the worst observed violation and enough
seed bookkeeping to regenerate the worst sample directly.  Sample i of
an ensemble with master seed s uses the numpy stream derived from
``SeedSequence(entropy=s, spawn_key=(i, role))``, so any single sample
can be replayed from (s, i) without rerunning the loop.  Reports
serialize to JSON lines; reruns are byte-identical except for the
honest wall-clock ``runtime_ms`` field.

The experiments:

* ``exp_norm_experiment``: ||exp(a)|| against ||exp(re a)|| on general
  matrices; the first never exceeds the second.
* ``heinz_experiment``: the two-sided interpolation bound
  ||a^nu x b^(1-nu) + a^(1-nu) x b^nu|| <= ||a x + x b|| for positive
  a, b, over a grid of nu, with equality at the endpoints.
* ``monotone_experiment``: whether t -> t^power preserves the
  semidefinite order on order pairs; true for powers in (0, 1], and
  refuted by explicit 2x2 pairs for the square.
* ``commutator_sqrt_search``: hill-climbing search for the largest
  ratio ||a b^(1/2) - b^(1/2) a|| / ||ab - ba||^(1/2) over contraction
  pairs; the interesting question is whether it can pass 1.
* ``positivity_transfer_check``: random kind-respecting assignments
  against a relation file whose relations should hold identically.

Exploratory experiments (the search, the square) carry no threshold and
always count as passed; the others fail when the worst violation
exceeds their threshold.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import matcalc
from .matcalc import TolerancePolicy
from .relations import (
    Assignment,
    check_all,
    parse_relations,
)
from .approx import model

ENSEMBLE_KINDS = ("general", "hermitian", "positive", "contraction",
                  "unitary", "order-pair")


def stream(seed: int, index: int, role: int = 0) -> np.random.Generator:
    """The generator for one (sample, role) slot of a master seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(index, role)))


def ginibre(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g / math.sqrt(2.0)


def hermitian_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = ginibre(rng, dim)
    return (g + matcalc.adjoint(g)) / 2


def positive_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    c = ginibre(rng, dim)
    return matcalc.adjoint(c) @ c


def contraction_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = ginibre(rng, dim)
    norm = matcalc.op_norm(g)
    return g / norm if norm > 0 else g


def unitary_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    # QR with the phase fix that makes the distribution Haar.
    q, r = np.linalg.qr(ginibre(rng, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def order_pair_sample(rng: np.random.Generator, dim: int
                      ) -> tuple[np.ndarray, np.ndarray]:
    """A pair x <= y of positive matrices with y - x positive."""
    x = positive_sample(rng, dim)
    c = ginibre(rng, dim)
    return x, x + matcalc.adjoint(c) @ c


_SAMPLERS = {
    "general": ginibre,
    "hermitian": hermitian_sample,
    "positive": positive_sample,
    "contraction": contraction_sample,
    "unitary": unitary_sample,
    "order-pair": order_pair_sample,
}


@dataclass(frozen=True)
class Ensemble:
    """A seeded family of random matrices (or pairs) of one kind."""

    kind: str
    dim: int
    seed: int
    count: int

    def __post_init__(self) -> None:
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("ensemble dimension must be at least 1")
        if self.count < 1:
            raise ValueError("ensemble count must be at least 1")

    def draw(self, index: int, role: int = 0, kind: str | None = None):
        """Sample ``index`` in stream ``role``, optionally of another kind."""
        kind = kind or self.kind
        return _SAMPLERS[kind](stream(self.seed, index, role), self.dim)

    def sample(self, index: int):
        return self.draw(index)

    def __iter__(self):
        return (self.sample(i) for i in range(self.count))


@dataclass
class ExperimentReport:
    """Result of one experiment run.

    ``max_violation`` is the worst signed violation seen (negative means
    the inequality held with room); ``worst_seed`` identifies the sample
    achieving it, replayable via :func:`stream`.  ``threshold`` is None
    for exploratory experiments; otherwise the run passes when the worst
    violation stays at or under it.
    """

    id: str
    params: dict
    samples: int
    max_violation: float
    worst_seed: dict
    runtime_ms: float
    threshold: float | None = None
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.threshold is None or self.max_violation <= self.threshold

    def to_json(self) -> str:
        payload = {
            "id": self.id,
            "params": self.params,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "worst_seed": self.worst_seed,
            "runtime_ms": self.runtime_ms,
            "threshold": self.threshold,
            "passed": self.passed,
            "stats": self.stats,
        }
        return json.dumps(payload, sort_keys=True)


def write_reports(path, reports: Iterable[ExperimentReport]) -> None:
    """Write reports as JSON lines."""
    from pathlib import Path
    with Path(path).open("w") as fh:
        for rep in reports:
            fh.write(rep.to_json() + "\n")


# ---------------------------------------------------------------------------
# Exponential norm

EXP_NORM_THRESHOLD = 1e-9


def exp_norm_experiment(e: Ensemble,
                        policy: TolerancePolicy | None = None
                        ) -> ExperimentReport:
    """Test ||exp(a)|| <= ||exp(re a)|| on general samples.

    The violation of sample a is (||exp(a)|| - ||exp(re a)||) / scale
    with scale = max(1, both exponential norms), so the threshold is
    relative.
    """
    start = time.perf_counter()
    worst = -math.inf
    worst_index = 0
    for i in range(e.count):
        a = e.draw(i, kind="general")
        na = matcalc.op_norm(matcalc.matrix_exp(a))
        nh = matcalc.op_norm(
            matcalc.hermitian_calculus(np.exp, matcalc.real_part(a), policy))
        scale = max(1.0, na, nh)
        violation = (na - nh) / scale
        if violation > worst:
            worst, worst_index = violation, i
    return ExperimentReport(
        id=f"expnorm-d{e.dim}",
        params={"dim": e.dim, "seed": e.seed, "count": e.count},
        samples=e.count,
        max_violation=worst,
        worst_seed={"seed": e.seed, "index": worst_index},
        runtime_ms=(time.perf_counter() - start) * 1e3,
        threshold=EXP_NORM_THRESHOLD,
    )


# ---------------------------------------------------------------------------
# Heinz interpolation

HEINZ_THRESHOLD = 1e-8
HEINZ_DEFAULT_GRID = tuple(round(0.1 * k, 1) for k in range(11))


def heinz_experiment(e: Ensemble, nus: Sequence[float] = HEINZ_DEFAULT_GRID,
                     ) -> ExperimentReport:
    """Test the interpolation bound over a grid of exponents.

    Each sample draws positive a (role 0), positive b (role 1) and
    general x (role 2).  Violations are relative to
    scale = max(1, ||a x + x b||).  Endpoint exponents reproduce the
    bound itself up to rounding; the per-sample endpoint gap is recorded
    in the stats.
    """
    start = time.perf_counter()
    worst = -math.inf
    worst_index = 0
    worst_nu = None
    endpoint_gap = 0.0
    for i in range(e.count):
        a = e.draw(i, role=0, kind="positive")
        b = e.draw(i, role=1, kind="positive")
        x = e.draw(i, role=2, kind="general")
        wa, va = np.linalg.eigh((a + matcalc.adjoint(a)) / 2)
        wb, vb = np.linalg.eigh((b + matcalc.adjoint(b)) / 2)
        wa = np.clip(wa, 0.0, None)
        wb = np.clip(wb, 0.0, None)
        bound = matcalc.op_norm(a @ x + x @ b)
        scale = max(1.0, bound)

        def power(w, v, t):
            return (v * w ** t) @ matcalc.adjoint(v)

        for nu in nus:
            mixed = (power(wa, va, nu) @ x @ power(wb, vb, 1.0 - nu)
                     + power(wa, va, 1.0 - nu) @ x @ power(wb, vb, nu))
            norm = matcalc.op_norm(mixed)
            violation = (norm - bound) / scale
            if nu in (0.0, 1.0):
                endpoint_gap = max(endpoint_gap, abs(norm - bound) / scale)
            if violation > worst:
                worst, worst_index, worst_nu = violation, i, nu
    return ExperimentReport(
        id=f"heinz-d{e.dim}",
        params={"dim": e.dim, "seed": e.seed, "count": e.count,
                "nus": list(nus)},
        samples=e.count,
        max_violation=worst,
        worst_seed={"seed": e.seed, "index": worst_index},
        runtime_ms=(time.perf_counter() - start) * 1e3,
        threshold=HEINZ_THRESHOLD,
        stats={"worst_nu": worst_nu, "endpoint_gap": endpoint_gap,
               "grid": [float(nu) for nu in nus]},
    )


# ---------------------------------------------------------------------------
# Operator monotonicity

MONOTONE_THRESHOLD = 1e-8


def monotone_experiment(power: float, e: Ensemble) -> ExperimentReport:
    """Test whether t -> t^power preserves the order on order pairs.

    The violation of a pair (x, y) is -min_eig(y^power - x^power),
    relative to scale = max(1, ||y^power||).  Powers in (0, 1] should
    never violate; the square should, and its report carries no
    threshold.
    """
    if not power > 0:
        raise ValueError("the power must be positive")
    start = time.perf_counter()
    worst = -math.inf
    worst_index = 0
    for i in range(e.count):
        x, y = e.draw(i, kind="order-pair")
        fx = _psd_power(x, power)
        fy = _psd_power(y, power)
        gap = fy - fx
        low = float(np.linalg.eigvalsh((gap + matcalc.adjoint(gap)) / 2)[0])
        scale = max(1.0, matcalc.op_norm(fy))
        violation = -low / scale
        if violation > worst:
            worst, worst_index = violation, i
    threshold = MONOTONE_THRESHOLD if 0 < power <= 1 else None
    return ExperimentReport(
        id=f"monotone-p{power:g}-d{e.dim}",
        params={"dim": e.dim, "seed": e.seed, "count": e.count,
                "power": power},
        samples=e.count,
        max_violation=worst,
        worst_seed={"seed": e.seed, "index": worst_index},
        runtime_ms=(time.perf_counter() - start) * 1e3,
        threshold=threshold,
    )


def _psd_power(m: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh((m + matcalc.adjoint(m)) / 2)
    return (v * np.clip(w, 0.0, None) ** t) @ matcalc.adjoint(v)


# ---------------------------------------------------------------------------
# Commutator square-root ratio search

COMMUTATOR_DEGENERATE = 1e-12
_CLIMB_SCALES = (0.5, 0.2, 0.08, 0.03, 0.01)
_CLIMB_MIN_GAIN = 1e-13


def commutator_ratio(a: np.ndarray, b: np.ndarray) -> float | None:
    """||a b^(1/2) - b^(1/2) a|| / ||ab - ba||^(1/2), or None when the
    commutator is degenerate (norm below 1e-12)."""
    a = matcalc.as_matrix(a)
    b = matcalc.as_matrix(b)
    den = matcalc.op_norm(a @ b - b @ a)
    if den < COMMUTATOR_DEGENERATE:
        return None
    s = _psd_power(b, 0.5)
    return matcalc.op_norm(a @ s - s @ a) / math.sqrt(den)


def _normalized_pair(g: np.ndarray, c: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray] | None:
    ng = matcalc.op_norm(g)
    if ng == 0:
        return None
    b0 = matcalc.adjoint(c) @ c
    nb = matcalc.op_norm(b0)
    if nb == 0:
        return None
    return g / ng, b0 / nb


def commutator_sqrt_search(dim: int, seed: int, budget: int,
                           pair_stream: Iterable | None = None
                           ) -> ExperimentReport:
    """Search for the largest commutator square-root ratio.

    Pairs are parameterized by (g, c): a = g/||g|| is a contraction and
    b = c*c/||c*c|| a positive contraction.  The search restarts from
    seeded random parameter pairs and hill-climbs coordinate-wise with
    shrinking steps; every ratio evaluation, including degenerate skips,
    consumes budget.  The running maximum is recorded after each
    improvement, so the trace is monotone by construction, and the best
    parameters are stored in the stats for direct replay.

    ``pair_stream`` replaces the random search with externally supplied
    (g, c) pairs, evaluated in order until the budget runs out.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    start = time.perf_counter()
    evals = 0
    best = -math.inf
    best_restart = 0
    best_pair = None
    trace: list[tuple[int, float]] = []

    def consider(value, g, c, restart) -> bool:
        nonlocal best, best_restart, best_pair
        if value is not None and value > best:
            best = value
            best_restart = restart
            best_pair = (g.copy(), c.copy())
            trace.append((evals, best))
            return True
        return False

    def ratio_of(g, c):
        nonlocal evals
        evals += 1
        pair = _normalized_pair(g, c)
        if pair is None:
            return None
        return commutator_ratio(*pair)

    if pair_stream is not None:
        for idx, (g, c) in enumerate(pair_stream):
            if evals >= budget:
                break
            value = ratio_of(np.asarray(g, dtype=complex),
                             np.asarray(c, dtype=complex))
            consider(value, np.asarray(g, dtype=complex),
                     np.asarray(c, dtype=complex), idx)
        mode = "stream"
        restarts = 0
    else:
        restarts = 0
        while evals < budget:
            rng = stream(seed, restarts, 0)
            g = ginibre(rng, dim)
            c = ginibre(rng, dim)
            current = ratio_of(g, c)
            consider(current, g, c, restarts)
            if current is None:
                current = -math.inf
            for scale in _CLIMB_SCALES:
                if evals >= budget:
                    break
                improved = True
                while improved and evals < budget:
                    improved = False
                    for target in (g, c):
                        for i in range(dim):
                            for j in range(dim):
                                for delta in (scale, -scale, 1j * scale,
                                              -1j * scale):
                                    if evals >= budget:
                                        break
                                    target[i, j] += delta
                                    value = ratio_of(g, c)
                                    if (value is not None
                                            and value > current + _CLIMB_MIN_GAIN):
                                        current = value
                                        consider(value, g, c, restarts)
                                        improved = True
                                    else:
                                        target[i, j] -= delta
            restarts += 1
        mode = "climb"

    stats: dict = {
        "mode": mode,
        "restarts": restarts,
        "trace": [[int(k), float(v)] for k, v in trace],
    }
    if best_pair is not None:
        g, c = best_pair
        stats["best_g"] = [[float(z.real) for z in row] for row in g]
        stats["best_g_imag"] = [[float(z.imag) for z in row] for row in g]
        stats["best_c"] = [[float(z.real) for z in row] for row in c]
        stats["best_c_imag"] = [[float(z.imag) for z in row] for row in c]
    return ExperimentReport(
        id=f"commutator-d{dim}",
        params={"dim": dim, "seed": seed, "budget": budget},
        samples=evals,
        max_violation=best,
        worst_seed={"seed": seed, "index": best_restart},
        runtime_ms=(time.perf_counter() - start) * 1e3,
        threshold=None,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# Positivity transfer

POSITIVITY_THRESHOLD = 1e-8

DEFAULT_POSITIVITY_RELATIONS = """\
var x positive;
var y positive;
var z general;
rel x^(1/2) y x^(1/2) >= 0;
rel z* x z >= 0;
rel x^(1/2) (x + y) x^(1/2) >= 0;
"""


def positivity_transfer_check(relations_text: str, dims: Sequence[int],
                              seed: int, count: int,
                              policy: TolerancePolicy | None = None
                              ) -> ExperimentReport:
    """Check a relation file against random kind-respecting assignments.

    Each sample draws every declared variable according to its kind
    (general variables get general samples) and records the aggregate
    residual of the explicit relations.  For relations that hold
    identically, the worst residual stays at rounding level; a
    polynomial that can evaluate non-Hermitian or indefinite shows up as
    a genuine violation.
    """
    start = time.perf_counter()
    variables, rels = parse_relations(relations_text)
    names = list(variables)
    worst = -math.inf
    worst_index = 0
    worst_dim = dims[0]
    total = 0
    for dim in dims:
        for i in range(count):
            mats = {}
            for role, name in enumerate(names):
                kind = variables[name].kind
                sampler_kind = kind if kind in _SAMPLERS else "general"
                mats[name] = _SAMPLERS[sampler_kind](
                    stream(seed, i, role), dim)
            a = Assignment(mats)
            verdict = check_all(rels, a, policy)
            total += 1
            violation = verdict.residual / max(1.0, a.max_norm())
            if violation > worst:
                worst, worst_index, worst_dim = violation, i, dim
    return ExperimentReport(
        id="positivity",
        params={"dims": list(dims), "seed": seed, "count": count},
        samples=total,
        max_violation=worst,
        worst_seed={"seed": seed, "index": worst_index, "dim": worst_dim},
        runtime_ms=(time.perf_counter() - start) * 1e3,
        threshold=POSITIVITY_THRESHOLD,
    )


# ---------------------------------------------------------------------------
# Clock and shift

def clock_shift_pair(dim: int) -> Assignment:
    """The clock and modular shift unitaries as an assignment (u, v)."""
    return Assignment({"u": model("clock", dim),
                       "v": model("shiftmod", dim)})


def soft_torus_relations(epsilon: float) -> str:
    """Relation-file text for two unitaries with a small commutator."""
    from .ncpoly import format_number
    return (
        "var u unitary;\n"
        "var v unitary;\n"
        f"rel norm(u v - v u) <= {format_number(epsilon)};\n")


# ---------------------------------------------------------------------------
# Reproduction suite

REPRODUCTION_SEEDS = {
    "expnorm": 101,
    "heinz": 202,
    "monotone_sqrt": 303,
    "monotone_square": 404,
    "commutator": 505,
    "positivity": 606,
}


def run_reproduction(commutator_budget: int = 20000) -> list[ExperimentReport]:
    """Run the whole inequality suite with fixed default seeds."""
    reports = [
        exp_norm_experiment(
            Ensemble("general", 6, REPRODUCTION_SEEDS["expnorm"], 1000)),
    ]
    for dim in (3, 4, 5, 6):
        reports.append(heinz_experiment(
            Ensemble("general", dim, REPRODUCTION_SEEDS["heinz"], 125)))
    reports.append(monotone_experiment(
        0.5, Ensemble("order-pair", 4, REPRODUCTION_SEEDS["monotone_sqrt"],
                      1000)))
    reports.append(monotone_experiment(
        2.0, Ensemble("order-pair", 2, REPRODUCTION_SEEDS["monotone_square"],
                      200)))
    for dim in (2, 3, 4, 5, 6):
        reports.append(commutator_sqrt_search(
            dim, REPRODUCTION_SEEDS["commutator"], commutator_budget))
    reports.append(positivity_transfer_check(
        DEFAULT_POSITIVITY_RELATIONS, dims=(2, 3, 4, 5, 6),
        seed=REPRODUCTION_SEEDS["positivity"], count=40))
    return reports
