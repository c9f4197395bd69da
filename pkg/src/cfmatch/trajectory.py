"""Idealized trajectories of the greedy process and their error bands.

The process's key random variables concentrate around deterministic curves
parameterized by the step x: the uncovered-vertex and matched-edge
fractions p_V, p_M, the conflict pressure Gamma(x), the available-edge
count h(x), per-vertex degree d(x), partial-matched test densities
z_{j,s}(x), and the semiconflict count c(x). Error functions xi, delta,
eta, zeta_{j,s}, gamma define the permissible deviation bands.

Trajectories are defined on [0, n/k]; the error functions only on [0, m]
with m = (1-mu) n/k. At desk scale the bands are usually vacuous (xi >= 1
because its exponent scales with 300*k*ell*Gamma); band verdicts therefore
always carry an explicit vacuity flag, and an empirical relative-tolerance
band is reported alongside, never conflated with the derived one.

All evaluation is double precision; the counting bound is accumulated in
log space since the counted quantity overflows any float format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InputError

__all__ = [
    "TrajectoryParams",
    "TrajectoryPoint",
    "evaluate",
    "derivative_residuals",
    "tracking_bands",
    "counting_lower_bound",
    "freedman_tail",
]


@dataclass(frozen=True)
class TrajectoryParams:
    """Scale parameters and per-size conflict degree maxima.

    deltas maps conflict size j in [2, ell] to the maximum number of size-j
    conflicts through one host edge (zero for empty layers).
    """

    n: int
    k: int
    d: float
    ell: int
    gamma: float
    mu: float
    eps: float
    deltas: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.ell < 2:
            raise InputError("ell must be >= 2")
        if not (0 < self.mu <= 1 / self.ell):
            raise InputError("mu must lie in (0, 1/ell]")
        if not (0 < self.eps < 1):
            raise InputError("eps must lie in (0, 1)")
        if self.d <= 0 or self.n <= 0 or self.k < 2:
            raise InputError("need d > 0, n > 0, k >= 2")
        for j, v in self.deltas.items():
            if not (2 <= j <= self.ell):
                raise InputError(f"delta size {j} outside [2, ell]")
            if v < 0:
                raise InputError("deltas must be nonnegative")

    @property
    def m(self) -> float:
        """Last tracked step, (1 - mu) n / k."""
        return (1 - self.mu) * self.n / self.k

    def delta(self, j: int) -> float:
        return float(self.deltas.get(j, 0.0))

    def zs_pairs(self) -> list[tuple[int, int]]:
        """(j, s) grid in lexicographic order, j in [1, ell], s in [0, j]."""
        return [(j, s) for j in range(1, self.ell + 1) for s in range(0, j + 1)]


@dataclass
class TrajectoryPoint:
    x: float
    p_V: float
    p_M: float
    Gamma_hat: float
    d_hat: float
    h_hat: float
    c_hat: float
    z_hat: dict[tuple[int, int], float]
    xi: float | None
    delta_err: float | None
    eta: float | None
    zeta: dict[tuple[int, int], float] | None
    gamma_err: float | None


def _pow(base: float, exp: int) -> float:
    # 0^0 := 1 convention
    if exp == 0:
        return 1.0
    return base**exp


def _safe_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def evaluate(p: TrajectoryParams, x: float) -> TrajectoryPoint:
    """All trajectory and error values at step x.

    Error-function fields are None for x beyond m (their domain ends there
    while the trajectories continue to n/k).
    """
    end = p.n / p.k
    if not (0 <= x <= end) and not math.isclose(x, end):
        raise InputError(f"x = {x} outside the trajectory domain [0, {end}]")
    n, k, d, ell, gamma = p.n, p.k, p.d, p.ell, p.gamma
    p_V = 1.0 - k * x / n
    if p_V < 0:
        p_V = 0.0
    p_M = k * x / (d * n)
    Gamma_hat = sum(p.delta(j) * _pow(p_M, j - 1) for j in range(2, ell + 1))
    surv = _pow(p_V, k - 1) * math.exp(-Gamma_hat)
    d_hat = d * surv
    h_hat = (n / k) * p_V * d_hat
    alive_prob = _pow(p_V, k) * math.exp(-Gamma_hat)
    z_hat: dict[tuple[int, int], float] = {}
    for j, s in p.zs_pairs():
        z_hat[(j, s)] = math.comb(j, s) * _pow(alive_prob, s) * _pow(p_M, j - s)
    c_hat = sum(p.delta(j + 1) * z_hat.get((j, 1), 0.0) for j in range(1, ell))

    in_error_domain = x <= p.m or math.isclose(x, p.m)
    if in_error_domain and p_V > 0:
        log_xi = 300 * k * ell * gamma * (-math.log(p_V)) - (p.eps / 32) * math.log(d)
        xi = _safe_exp(log_xi)
        delta_err = xi * d_hat
        eta = xi * h_hat
        zeta: dict[tuple[int, int], float] = {}
        for j, s in p.zs_pairs():
            zeta[(j, s)] = xi * (
                z_hat[(j, s)] + math.comb(j, s) * d_hat**s / (gamma * ell * d**j)
            )
        gamma_err = 2 * sum(
            p.delta(j + 1) * zeta.get((j, 1), 0.0) for j in range(1, ell)
        )
    else:
        xi = delta_err = eta = gamma_err = None
        zeta = None
    return TrajectoryPoint(
        x=x,
        p_V=p_V,
        p_M=p_M,
        Gamma_hat=Gamma_hat,
        d_hat=d_hat,
        h_hat=h_hat,
        c_hat=c_hat,
        z_hat=z_hat,
        xi=xi,
        delta_err=delta_err,
        eta=eta,
        zeta=zeta,
        gamma_err=gamma_err,
    )


# -- derivative identities ----------------------------------------------------


def _direct_derivatives(p: TrajectoryParams, x: float) -> dict:
    """Closed-form derivatives obtained by direct differentiation."""
    n, k, d, ell, gamma = p.n, p.k, p.d, p.ell, p.gamma
    pt = evaluate(p, x)
    p_V, p_M = pt.p_V, pt.p_M
    dp_V = -k / n
    dp_M = k / (d * n)
    dGamma = sum(
        p.delta(j) * (j - 1) * _pow(p_M, j - 2) * dp_M for j in range(2, ell + 1)
    )
    # d_hat = d * p_V^(k-1) * exp(-Gamma)
    dd_hat = d * (
        (k - 1) * _pow(p_V, k - 2) * dp_V * math.exp(-pt.Gamma_hat)
        - _pow(p_V, k - 1) * math.exp(-pt.Gamma_hat) * dGamma
    )
    # h_hat = (n/k) p_V d_hat
    dh_hat = (n / k) * (dp_V * pt.d_hat + p_V * dd_hat)
    # alive probability a = p_V^k exp(-Gamma)
    a = _pow(p_V, k) * math.exp(-pt.Gamma_hat)
    da = k * _pow(p_V, k - 1) * dp_V * math.exp(-pt.Gamma_hat) - a * dGamma
    dz = {}
    for j, s in p.zs_pairs():
        dz[(j, s)] = math.comb(j, s) * (
            s * _pow(a, s - 1) * da * _pow(p_M, j - s)
            + _pow(a, s) * (j - s) * _pow(p_M, j - s - 1) * dp_M
        )
    dc = sum(p.delta(j + 1) * dz.get((j, 1), 0.0) for j in range(1, ell))
    out = {
        "Gamma": dGamma,
        "d_hat": dd_hat,
        "h_hat": dh_hat,
        "z": dz,
        "c_hat": dc,
    }
    if pt.xi is not None and math.isfinite(pt.xi):
        dxi = pt.xi * 300 * k * ell * gamma * (-dp_V / p_V)
        out["xi"] = dxi
        out["delta_err"] = dxi * pt.d_hat + pt.xi * dd_hat
        dzeta = {}
        for j, s in p.zs_pairs():
            base = pt.z_hat[(j, s)] + math.comb(j, s) * pt.d_hat**s / (
                gamma * ell * d**j
            )
            dbase = dz[(j, s)] + math.comb(j, s) * s * _pow(pt.d_hat, s - 1) * dd_hat / (
                gamma * ell * d**j
            )
            dzeta[(j, s)] = dxi * base + pt.xi * dbase
        out["zeta"] = dzeta
    return out


def derivative_residuals(p: TrajectoryParams, x: float, fd_step: float | None = None) -> dict:
    """Check the derivative identities at an interior point x.

    For each identity the result carries |analytic - stated| and the
    relative deviation of a central finite difference from the analytic
    derivative. The stated forms:

        Gamma'   = c_hat / h_hat
        xi'      = 300 k^2 ell Gamma / (n p_V) * xi
        d_hat'   = -((c_hat + (k-1) d_hat) / h_hat) * d_hat
        z_{j,s}' = (s+1)/h_hat * z_{j,s+1} - s (c_hat + k d_hat)/h_hat * z_{j,s}
        delta'   = (300 k^2 ell Gamma/(n p_V) - Gamma' - k(k-1)/(n p_V)) * delta
        zeta'    = (300 k^2 ell Gamma/(n p_V) - s Gamma' - k^2 s/(n p_V)) * zeta
                   + (s+1) xi z_{j,s+1}/h_hat + s C(j,s) xi d_hat^(s+1)/(Gamma ell d^j h_hat)
    """
    end = p.n / p.k
    if not (0 < x < min(end, p.m)):
        raise InputError("x must be interior to the error-function domain")
    if fd_step is None:
        fd_step = max(1e-6 * end, 1e-3)
    fd_step = min(fd_step, x / 2, (min(end, p.m) - x) / 2)
    n, k, d, ell, gamma = p.n, p.k, p.d, p.ell, p.gamma
    pt = evaluate(p, x)
    der = _direct_derivatives(p, x)
    lo = evaluate(p, x - fd_step)
    hi = evaluate(p, x + fd_step)

    def rel(a: float, b: float) -> float:
        scale = max(abs(a), abs(b), 1e-300)
        return abs(a - b) / scale

    res: dict[str, dict] = {}

    def entry(name, analytic, stated, fd):
        res[name] = {
            "analytic": analytic,
            "stated": stated,
            "identity_rel": rel(analytic, stated),
            "fd_rel": rel(fd, analytic),
        }

    inv_pv = 1.0 / (n * pt.p_V)
    entry(
        "Gamma",
        der["Gamma"],
        pt.c_hat / pt.h_hat,
        (hi.Gamma_hat - lo.Gamma_hat) / (2 * fd_step),
    )
    entry(
        "d_hat",
        der["d_hat"],
        -((pt.c_hat + (k - 1) * pt.d_hat) / pt.h_hat) * pt.d_hat,
        (hi.d_hat - lo.d_hat) / (2 * fd_step),
    )
    # h_hat has no separate stated form; check the defining product identity
    res["h_identity"] = {
        "analytic": pt.h_hat,
        "stated": (n / k) * pt.p_V * pt.d_hat,
        "identity_rel": rel(pt.h_hat, (n / k) * pt.p_V * pt.d_hat),
        "fd_rel": rel((hi.h_hat - lo.h_hat) / (2 * fd_step), der["h_hat"]),
    }
    for j, s in p.zs_pairs():
        z_next = pt.z_hat.get((j, s + 1), 0.0)
        stated = (s + 1) / pt.h_hat * z_next - s * (
            pt.c_hat + k * pt.d_hat
        ) / pt.h_hat * pt.z_hat[(j, s)]
        entry(
            f"z_{j}_{s}",
            der["z"][(j, s)],
            stated,
            (hi.z_hat[(j, s)] - lo.z_hat[(j, s)]) / (2 * fd_step),
        )
    if (
        "xi" in der
        and hi.xi is not None
        and lo.xi is not None
        and math.isfinite(hi.xi)
        and math.isfinite(lo.xi)
    ):
        entry(
            "xi",
            der["xi"],
            300 * k * k * ell * gamma * inv_pv * pt.xi,
            (hi.xi - lo.xi) / (2 * fd_step),
        )
        entry(
            "delta_err",
            der["delta_err"],
            (300 * k * k * ell * gamma * inv_pv - der["Gamma"] - k * (k - 1) * inv_pv)
            * pt.delta_err,
            (hi.delta_err - lo.delta_err) / (2 * fd_step),
        )
        for j, s in p.zs_pairs():
            z_next = pt.z_hat.get((j, s + 1), 0.0)
            stated = (
                (300 * k * k * ell * gamma * inv_pv - s * der["Gamma"] - k * k * s * inv_pv)
                * pt.zeta[(j, s)]
                + (s + 1) * pt.xi * z_next / pt.h_hat
                + s * math.comb(j, s) * pt.xi * pt.d_hat ** (s + 1)
                / (gamma * ell * d**j * pt.h_hat)
            )
            entry(
                f"zeta_{j}_{s}",
                der["zeta"][(j, s)],
                stated,
                (hi.zeta[(j, s)] - lo.zeta[(j, s)]) / (2 * fd_step),
            )
    return res


# -- band verdicts -------------------------------------------------------------


def tracking_bands(
    p: TrajectoryParams,
    h_series: Sequence[float],
    rel_tol: float = 0.10,
    d_series: Sequence[float] | None = None,
    c_series: Sequence[float] | None = None,
) -> list[dict]:
    """Per-step verdicts of measured series against derived and empirical bands.

    h_series[i] is the available-edge count after step i (i = 0 is the
    start). Optional d_series / c_series carry per-step mean uncovered
    degrees and semiconflict counts and are checked against their own
    trajectories the same way. Derived bands beyond their domain (i > m)
    are reported as out-of-domain; a derived band wider than the value it
    brackets is flagged vacuous rather than suppressed.
    """
    out = []
    for i, measured in enumerate(h_series):
        if i > p.n / p.k:
            break
        pt = evaluate(p, i)
        row = {
            "step": i,
            "measured": float(measured),
            "h_hat": pt.h_hat,
            "eta": pt.eta,
            "p_V": pt.p_V,
            "in_empirical_band": abs(measured - pt.h_hat) <= rel_tol * pt.h_hat,
        }
        if pt.eta is None:
            row["in_paper_band"] = None
            row["band_vacuous"] = None
        else:
            row["in_paper_band"] = abs(measured - pt.h_hat) <= pt.eta
            row["band_vacuous"] = pt.eta >= pt.h_hat
        if d_series is not None and i < len(d_series) and d_series[i] is not None:
            row["d_measured"] = float(d_series[i])
            row["d_hat"] = pt.d_hat
            row["d_in_empirical_band"] = (
                abs(d_series[i] - pt.d_hat) <= rel_tol * pt.d_hat
            )
            row["d_in_paper_band"] = (
                None if pt.delta_err is None else abs(d_series[i] - pt.d_hat) <= pt.delta_err
            )
        if c_series is not None and i < len(c_series) and c_series[i] is not None:
            row["c_measured"] = float(c_series[i])
            row["c_hat"] = pt.c_hat
            row["c_in_paper_band"] = (
                None if pt.gamma_err is None else abs(c_series[i] - pt.c_hat) <= pt.gamma_err
            )
        out.append(row)
    return out


# -- scalar utilities -----------------------------------------------------------


def counting_lower_bound(p: TrajectoryParams) -> float:
    """Natural log of the lower bound on the number of conflict-free
    matchings of size m: m * [ln((1 - d^(-eps^4)) d) - (k-1) - sum_j
    Delta_j / (j d^(j-1))]."""
    d = p.d
    prefactor = (1 - d ** (-(p.eps**4))) * d
    if prefactor <= 0:
        raise InputError("nonpositive prefactor; needs d > 1")
    correction = sum(
        p.delta(j) / (j * d ** (j - 1)) for j in range(2, p.ell + 1)
    )
    return p.m * (math.log(prefactor) - (p.k - 1) - correction)


def freedman_tail(a: float, b: float, t: float) -> float:
    """Supermartingale tail bound exp(-t^2 / (2a(t+b))), clamped to <= 1.

    a bounds single-step increments, b the accumulated conditional absolute
    drift, t the deviation.
    """
    if a <= 0 or t <= 0:
        raise InputError("freedman_tail needs a > 0 and t > 0")
    if b < 0:
        raise InputError("freedman_tail needs b >= 0")
    return min(1.0, math.exp(-(t * t) / (2 * a * (t + b))))


# -- CSV ---------------------------------------------------------------------


def trajectory_csv_header(p: TrajectoryParams) -> str:
    cols = ["x", "p_V", "p_M", "Gamma", "d_hat", "h_hat", "c_hat"]
    cols += [f"z_{j}_{s}" for j, s in p.zs_pairs()]
    cols += ["xi", "delta", "eta"]
    cols += [f"zeta_{j}_{s}" for j, s in p.zs_pairs()]
    cols += ["gamma"]
    return ",".join(cols)


def trajectory_csv_row(p: TrajectoryParams, pt: TrajectoryPoint) -> str:
    def fmt(v):
        return "" if v is None else repr(float(v))

    vals = [pt.x, pt.p_V, pt.p_M, pt.Gamma_hat, pt.d_hat, pt.h_hat, pt.c_hat]
    vals += [pt.z_hat[(j, s)] for j, s in p.zs_pairs()]
    vals += [pt.xi, pt.delta_err, pt.eta]
    if pt.zeta is None:
        vals += [None] * len(p.zs_pairs())
    else:
        vals += [pt.zeta[(j, s)] for j, s in p.zs_pairs()]
    vals += [pt.gamma_err]
    return ",".join(fmt(v) for v in vals)
