"""Independent checks of certificates and of trace convexity itself.

``verify_certificate`` rebuilds the hermitian-square sum from the stored
polynomials with plain free-algebra arithmetic (it does not reuse the
certificate expansion) and compares it with the Hessian up to cyclic
equivalence.  The fuzz oracles sample symmetric matrices and test the
tracial inequalities directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .calculus import hessian
from .certificate import Certificate
from .linalg import SAMPLE_RADIUS, random_orthogonal, random_symmetric, random_symmetric_with_spectrum, spectrum_range, symmetric_eigen
from .ncpoly import EXACT, FLOAT, H, X, MatrixAssignment, NcPoly, cyclic_canonical, evaluate, trace_terms
from .unipoly import GLOBAL, INTERVAL, RAY_LEFT, RAY_RIGHT, IntervalSpec, UniPoly

DEFAULT_EPS = 1e-8
DEFAULT_FLOAT_TOL = 1e-9
HYSTERESIS = 10.0
MARGIN_FRACTION = 0.05
MIN_RADIUS = 0.5
EIG_TOL = 1e-6
TRACE_TOL = 1e-8

_LEGAL = {
    GLOBAL: ({"Q"}, set()),
    RAY_RIGHT: ({"Q", "R"}, {"x-b"}),
    RAY_LEFT: ({"Q", "R"}, {"a-x"}),
    INTERVAL: ({"Q", "R", "T", "U"}, {"x-a", "b-x"}),
}


@dataclass
class VerificationReport:
    passed: bool = True
    symbolic_residual: float | None = None
    structural_ok: bool = True
    problems: list = field(default_factory=list)
    trials_run: int = 0
    trials_failed: int = 0
    worst_margin: float | None = None
    witness: dict | None = None
    witness_trial: int | None = None

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        """Combine trial counts; the witness of the earliest failing trial wins."""
        margins = [m for m in (self.worst_margin, other.worst_margin) if m is not None]
        first = self
        if other.witness_trial is not None and (self.witness_trial is None or other.witness_trial < self.witness_trial):
            first = other
        return replace(
            self,
            passed=self.passed and other.passed,
            structural_ok=self.structural_ok and other.structural_ok,
            problems=self.problems + other.problems,
            trials_run=self.trials_run + other.trials_run,
            trials_failed=self.trials_failed + other.trials_failed,
            worst_margin=min(margins) if margins else None,
            witness=first.witness,
            witness_trial=first.witness_trial,
        )

    def to_dict(self) -> dict:
        out = {
            "passed": self.passed,
            "symbolic_residual": self.symbolic_residual,
            "structural_ok": self.structural_ok,
            "problems": list(self.problems),
            "trials_run": self.trials_run,
            "trials_failed": self.trials_failed,
            "worst_margin": self.worst_margin,
        }
        if self.witness is not None:
            out["witness"] = {k: np.asarray(v, dtype=float).tolist() for k, v in self.witness.items()}
            out["witness_trial"] = self.witness_trial
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def render_text(self) -> str:
        lines = ["PASS" if self.passed else "FAIL"]
        if self.symbolic_residual is not None:
            lines.append(f"  symbolic residual: {self.symbolic_residual:.3e}")
        lines.append(f"  structure: {'ok' if self.structural_ok else 'invalid'}")
        lines += [f"    - {p}" for p in self.problems]
        if self.trials_run:
            lines.append(f"  trials: {self.trials_run} run, {self.trials_failed} failed")
            lines.append(f"  worst margin: {self.worst_margin:.6g}")
        if self.witness is not None:
            lines.append(f"  witness (trial {self.witness_trial}):")
            for name, m in self.witness.items():
                rows = np.array2string(np.asarray(m, dtype=float), precision=6, separator=", ")
                lines.append(f"    {name} = " + rows.replace("\n", "\n      "))
        return "\n".join(lines)


# -- symbolic verification ------------------------------------------------------

def _structure(c: Certificate) -> list:
    shapes, weights = _LEGAL[c.interval.kind]
    problems = []
    for i, t in enumerate(c.terms):
        if t.shape not in shapes:
            problems.append(f"term {i}: shape {t.shape} is not allowed on a {c.interval.kind} domain")
        if t.shape == "R" and t.weight not in weights:
            problems.append(f"term {i}: weight {t.weight} is not allowed on a {c.interval.kind} domain")
        if not t.poly.terms:
            problems.append(f"term {i}: zero polynomial")
        for w in t.poly.terms:
            if not set(w) <= {X, H} or w.count(H) != 1:
                problems.append(f"term {i}: word {w} is not of degree one in h")
                break
        if t.scale < 0:
            problems.append(f"term {i}: negative scale")
    return problems


def _linear(c, sign, mode) -> NcPoly:
    """``sign * (x - c)`` in the free algebra."""
    c = c if mode == EXACT else float(c)
    return NcPoly({(X,): sign, (): -sign * c}, mode)


def _sum_of_squares(c: Certificate, mode: str) -> NcPoly:
    iv = c.interval
    lo = {INTERVAL: iv.a, RAY_RIGHT: iv.b}.get(iv.kind)
    hi = {INTERVAL: iv.b, RAY_LEFT: iv.a}.get(iv.kind)
    total = NcPoly({}, mode)
    for t in c.terms:
        r = t.poly if t.poly.mode == mode else t.poly.to_mode(mode)
        rt = r.involute()
        if t.shape == "Q":
            body = rt * r
        elif t.shape == "R":
            w = _linear(lo, 1, mode) if t.weight in ("x-a", "x-b") else _linear(hi, -1, mode)
            body = rt * w * r
        elif t.shape == "T":
            body = rt * _linear(lo, 1, mode) * _linear(hi, -1, mode) * r
        else:
            body = _linear(lo, 1, mode) * rt * _linear(hi, -1, mode) * r
        s = t.scale if mode == EXACT else float(t.scale)
        total = total + body * s
    return total


def verify_certificate(p: UniPoly, c: Certificate, tol: float | None = None) -> VerificationReport:
    """Symbolic residual and structural checks; never raises on a bad certificate.

    In exact mode the default tolerance is 0.  In float mode it is
    ``1e-9 * max(1, max |hessian coefficient|)``.
    """
    problems = _structure(c)
    report = VerificationReport(problems=problems, structural_ok=not problems)
    if problems:
        report.passed = False
        return report
    mode = EXACT if c.mode == EXACT and p.mode == EXACT else FLOAT
    target = hessian(p.to_mode(mode).to_ncpoly())
    diff = cyclic_canonical(_sum_of_squares(c, mode) - target)
    residual = max((abs(v) for v in diff.terms.values()), default=0)
    if tol is None:
        tol = 0 if mode == EXACT else DEFAULT_FLOAT_TOL
    threshold = tol if mode == EXACT else tol * max(1.0, float(target.max_abs_coefficient()))
    report.symbolic_residual = float(residual)
    report.passed = residual <= threshold
    return report


# -- randomized oracles -------------------------------------------------------------

def domain_margin(interval: IntervalSpec) -> float:
    if interval.kind == INTERVAL:
        return MARGIN_FRACTION * float(interval.b - interval.a)
    if interval.kind == GLOBAL:
        return 0.0
    return MARGIN_FRACTION


def _sample_x(n: int, interval: IntervalSpec, rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix with spectrum inside the shrunk domain.

    On unbounded domains the sampling radius is itself log-uniform in
    ``[MIN_RADIUS, SAMPLE_RADIUS]`` so that small spectra near the origin or
    endpoint are visited often.
    """
    delta = domain_margin(interval)
    if interval.kind == INTERVAL:
        return random_symmetric_with_spectrum(n, interval, delta, rng=rng)
    radius = math.exp(rng.uniform(math.log(MIN_RADIUS), math.log(SAMPLE_RADIUS)))
    lo, hi = spectrum_range(interval, delta)
    if interval.kind == GLOBAL:
        lo, hi = -radius, radius
    elif interval.kind == RAY_RIGHT:
        hi = lo + radius
    else:
        lo = hi - radius
    lam = rng.uniform(lo, hi, n)
    Q = random_orthogonal(n, rng)
    M = Q.T @ np.diag(lam) @ Q
    return (M + M.T) / 2


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _fuzz(trials: int, body) -> VerificationReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    report = VerificationReport(worst_margin=math.inf)
    for t in range(trials):
        margin, threshold, witness = body(t)
        report.trials_run += 1
        report.worst_margin = min(report.worst_margin, margin)
        if margin < -HYSTERESIS * threshold:
            report.trials_failed += 1
            if report.witness is None:
                report.witness = witness
                report.witness_trial = t
    report.passed = report.trials_failed == 0
    return report


def trace_positivity_fuzz(p: UniPoly, interval: IntervalSpec, n_max: int, trials: int, seed: int = 0,
                          eps: float = DEFAULT_EPS) -> VerificationReport:
    """Sample ``X`` in the domain and symmetric ``H``; check ``Tr p''(X)[H] >= -eps``."""
    hess = hessian(p.to_float().to_ncpoly())

    def body(t):
        rng = _trial_rng(seed, t)
        n = int(rng.integers(1, n_max + 1))
        Xm = _sample_x(n, interval, rng)
        Hm = random_symmetric(n, rng)
        val, mag = trace_terms(hess, MatrixAssignment({X: Xm, H: Hm}))
        return val, eps * max(1.0, mag), {"X": Xm, "H": Hm}

    return _fuzz(trials, body)


def _trace_poly(coeffs, M: np.ndarray):
    """Trace of ``p(M)`` by Horner's rule, plus ``n * sum |c_j| * ||M||**j``."""
    n = M.shape[0]
    acc = np.zeros_like(M)
    for c in reversed(coeffs):
        acc = acc @ M + c * np.eye(n)
    rho = float(np.linalg.norm(M))
    mag = n * sum(abs(c) * rho ** j for j, c in enumerate(coeffs))
    return float(np.trace(acc)), mag


def midpoint_convexity_fuzz(p: UniPoly, interval: IntervalSpec, n_max: int, trials: int, seed: int = 0,
                            eps: float = DEFAULT_EPS) -> VerificationReport:
    """Check ``(Tr p(X) + Tr p(Y))/2 - Tr p((X+Y)/2) >= -eps`` on sampled pairs.

    Even trials draw ``X`` and ``Y`` independently; odd trials take
    ``Y = (1 - tau) X + tau Z`` with ``tau`` log-uniform in ``[1e-3, 1]`` so
    that short segments inside a small concave region are also probed.
    """
    coeffs = [float(c) for c in p.coeffs]

    def body(t):
        rng = _trial_rng(seed, t)
        n = int(rng.integers(1, n_max + 1))
        Xm = _sample_x(n, interval, rng)
        Zm = _sample_x(n, interval, rng)
        if t % 2:
            tau = 10.0 ** rng.uniform(-3.0, 0.0)
            Ym = (1 - tau) * Xm + tau * Zm
        else:
            Ym = Zm
        tx, mx = _trace_poly(coeffs, Xm)
        ty, my = _trace_poly(coeffs, Ym)
        tm, mm = _trace_poly(coeffs, (Xm + Ym) / 2)
        gap = (tx + ty) / 2 - tm
        return gap, eps * max(1.0, mx + my + mm), {"X": Xm, "Y": Ym}

    return _fuzz(trials, body)


def matrix_nonconvexity_witness(p: UniPoly, n: int, trials: int, seed: int = 0):
    """Search for ``X, H`` with ``p''(X)[H]`` trace-nonnegative but not PSD.

    Returns the first hit as a MatrixAssignment, or None.
    """
    hess = hessian(p.to_float().to_ncpoly())
    glob = IntervalSpec.global_()
    for t in range(trials):
        rng = _trial_rng(seed, t)
        Xm = _sample_x(n, glob, rng)
        Hm = random_symmetric(n, rng)
        A = MatrixAssignment({X: Xm, H: Hm})
        M = evaluate(hess, A)
        M = (M + M.T) / 2
        if float(np.trace(M)) < -TRACE_TOL:
            continue
        if symmetric_eigen(M)[0][0] < -EIG_TOL:
            return A
    return None
