"""Coupled ODE model of house price, supply, and demand.

House price Y responds to the mortgage rate X through a fitted
generalised logistic curve G and to background inflation through a
linear growth term, blended by a coupling weight that tracks the
supply/demand balance:

    dY/dt = alpha * G'(X) * dX/dt + (1 - alpha) * k
    alpha(S, D) = (S/D)^2 / ((S/D)^2 + C^2)
    dS/dt = r * S * (1 - S/K) - c_s * Y
    dD/dt = a * X + b * D

alpha near 1 means the rate channel dominates; alpha below 0.5 means
price growth has decoupled from the rate and runs on inflation alone.
The mortgage rate is exogenous, supplied as a piecewise-linear path in
time (one time unit = one quarter).

Note the demand equation as calibrated has a > 0, so higher rates feed
demand growth; counterintuitive, but it is the calibrated baseline and
is implemented as stated.
"""

from __future__ import annotations

import bisect
import csv
import datetime as dt
import math
from dataclasses import dataclass

from .errors import DataError, NumericsError
from .timeseries import Frequency, TimeSeries, quarter_index


@dataclass(frozen=True)
class LogisticCurve:
    """Five-coefficient generalised logistic linking rate to price.

    G(X) = A - B / (1 + Q*exp(-g*(X - M)))^nu, strictly decreasing for
    B, Q, g, nu > 0, with limits G(-inf) = A and G(+inf) = A - B.
    Units: A, B in $'000; g, M in rate-points; Q, nu dimensionless.
    """

    A: float
    B: float
    Q: float
    g: float
    M: float
    nu: float

    def __post_init__(self) -> None:
        for field in ("A", "B", "Q", "g", "M", "nu"):
            if not math.isfinite(getattr(self, field)):
                raise DataError(f"logistic coefficient {field} must be finite")
        if self.B <= 0 or self.Q <= 0 or self.g <= 0 or self.nu <= 0:
            raise DataError("logistic curve requires B, Q, g, nu > 0")

    def as_dict(self) -> dict[str, float]:
        return {"A": self.A, "B": self.B, "Q": self.Q,
                "g": self.g, "M": self.M, "nu": self.nu}


#: Rate-price curve calibrated on pre-2020 national quarterly data.
DEFAULT_CURVE = LogisticCurve(A=683.8, B=197.7, Q=0.5, g=5.0, M=5.1, nu=10.0)


@dataclass(frozen=True)
class OdeParams:
    """Model parameters (baseline values calibrated on pre-2020 data).

    k     linear growth factor of house price ($'000 per quarter)
    C     switching parameter of the coupling function
    r     logistic growth rate of supply (per quarter)
    K     carrying capacity of supply
    c_s   consumption of supply per unit house price
    a     demand response to the mortgage rate
    b     demand self-growth rate (per quarter)
    curve fitted rate-price logistic
    """

    k: float = 20.0
    C: float = math.sqrt(0.4)
    r: float = 0.5
    K: float = 800.0
    c_s: float = 0.1
    a: float = 1.0
    b: float = 0.02
    curve: LogisticCurve = DEFAULT_CURVE

    def __post_init__(self) -> None:
        for field in ("k", "C", "r", "K", "c_s", "a", "b"):
            if not math.isfinite(getattr(self, field)):
                raise DataError(f"parameter {field} must be finite")
        if self.K <= 0:
            raise DataError("carrying capacity K must be positive")
        if self.C <= 0:
            raise DataError("switching parameter C must be positive")

    def as_dict(self) -> dict[str, float]:
        return {"k": self.k, "C": self.C, "r": self.r, "K": self.K,
                "c_s": self.c_s, "a": self.a, "b": self.b}


SCALAR_PARAM_FIELDS = ("k", "C", "r", "K", "c_s", "a", "b")

DEFAULT_PARAMS = OdeParams()

#: Default initial supply/demand levels: S/D = 2 puts the coupling weight
#: deep in the rate-dominated regime seen before 2020.
DEFAULT_S0 = 400.0
DEFAULT_D0 = 200.0


@dataclass(frozen=True)
class SystemState:
    """Model state at time t (quarters since epoch)."""

    t: float
    Y: float
    S: float
    D: float


def eval_G(curve: LogisticCurve, X: float) -> float:
    """Generalised logistic value A - B/(1 + Q*exp(-g*(X-M)))^nu.

    Guarded against overflow: far left of the midpoint returns A, far
    right the exponent underflows and the value settles at A - B.
    """
    t = -curve.g * (X - curve.M)
    if t >= 700.0:
        return curve.A
    return curve.A - curve.B * math.exp(-curve.nu * math.log1p(curve.Q * math.exp(t)))


def eval_dGdX(curve: LogisticCurve, X: float) -> float:
    """Analytic derivative of eval_G; <= 0 everywhere for a valid curve.

    dG/dX = -B*nu*Q*g * exp(-g(X-M)) * (1 + Q*exp(-g(X-M)))^(-nu-1)
    """
    t = -curve.g * (X - curve.M)
    if t >= 700.0:
        return 0.0
    # exp(t) * (1+Q*exp(t))^(-nu-1) computed in log space to dodge 0*inf.
    log_term = t - (curve.nu + 1.0) * math.log1p(curve.Q * math.exp(t))
    return -curve.B * curve.nu * curve.Q * curve.g * math.exp(log_term)


def alpha(S: float, D: float, C: float) -> float:
    """Coupling weight (S/D)^2 / ((S/D)^2 + C^2), in [0, 1].

    Equals 0.5 exactly when S = C*D; rises towards 1 as supply outpaces
    demand. Requires D > 0.
    """
    if D <= 0.0:
        raise DataError(f"coupling weight needs positive demand, got D={D}")
    ratio = S / D
    r2 = ratio * ratio
    return r2 / (r2 + C * C)


def rhs(state: SystemState, X: float, dXdt: float, params: OdeParams) -> tuple[float, float, float]:
    """Time derivatives (dY, dS, dD) at the given state and rate input."""
    a_w = alpha(state.S, state.D, params.C)
    dY = a_w * eval_dGdX(params.curve, X) * dXdt + (1.0 - a_w) * params.k
    dS = params.r * state.S * (1.0 - state.S / params.K) - params.c_s * state.Y
    dD = params.a * X + params.b * state.D
    return dY, dS, dD


@dataclass(frozen=True)
class RatePath:
    """Exogenous mortgage-rate path, piecewise-linear between knots.

    Knot times are in quarters.  The derivative is piecewise-constant and
    right-continuous at knots.  When built from a dated quarterly series,
    knot i sits at the quarter offset from the epoch date.
    """

    ts: tuple[float, ...]
    xs: tuple[float, ...]
    epoch: dt.date | None = None

    _COVERAGE_TOL = 1e-9

    def __post_init__(self) -> None:
        if len(self.ts) != len(self.xs) or len(self.ts) < 2:
            raise DataError("rate path needs at least two (t, x) knots")
        for t0, t1 in zip(self.ts, self.ts[1:]):
            if t1 <= t0:
                raise DataError("rate path knot times must strictly increase")

    @classmethod
    def from_series(cls, series: TimeSeries, epoch: dt.date | None = None) -> "RatePath":
        """Build from a quarterly rate series; t=0 at the epoch's quarter."""
        if series.frequency is not Frequency.QUARTERLY:
            raise DataError(
                f"rate path needs a quarterly series, got {series.frequency.value}"
            )
        if epoch is None:
            epoch = series.dates[0]
        base = quarter_index(epoch)
        ts = tuple(float(quarter_index(d) - base) for d in series.dates)
        return cls(ts, tuple(series.values), epoch)

    @classmethod
    def constant(cls, x: float, t0: float, t1: float) -> "RatePath":
        if t1 <= t0:
            raise DataError("constant rate path needs t1 > t0")
        return cls((t0, t1), (x, x))

    def date_to_t(self, d: dt.date) -> float:
        if self.epoch is None:
            raise DataError("rate path has no date epoch")
        return float(quarter_index(d) - quarter_index(self.epoch))

    def covers(self, t0: float, t1: float) -> bool:
        tol = self._COVERAGE_TOL
        return self.ts[0] - tol <= t0 and t1 <= self.ts[-1] + tol

    def _segment(self, t: float) -> int:
        if not self.covers(t, t):
            raise DataError(
                f"rate path covers [{self.ts[0]}, {self.ts[-1]}], asked for t={t}"
            )
        i = bisect.bisect_right(self.ts, t) - 1
        return min(max(i, 0), len(self.ts) - 2)

    def rate(self, t: float) -> float:
        i = self._segment(t)
        w = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i])
        w = min(max(w, 0.0), 1.0)
        return self.xs[i] + w * (self.xs[i + 1] - self.xs[i])

    def slope(self, t: float) -> float:
        i = self._segment(t)
        return (self.xs[i + 1] - self.xs[i]) / (self.ts[i + 1] - self.ts[i])


@dataclass(frozen=True)
class Trajectory:
    """Simulation output: state and coupling weight at every step."""

    t: tuple[float, ...]
    Y: tuple[float, ...]
    S: tuple[float, ...]
    D: tuple[float, ...]
    alpha: tuple[float, ...]
    clamped: bool = False
    first_clamp_t: float | None = None

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> SystemState:
        return SystemState(self.t[i], self.Y[i], self.S[i], self.D[i])

    def peak_alpha(self) -> tuple[float, float]:
        """(time, value) of the maximum coupling weight."""
        i = max(range(len(self.alpha)), key=self.alpha.__getitem__)
        return self.t[i], self.alpha[i]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "Y", "S", "D", "alpha"])
            for row in zip(self.t, self.Y, self.S, self.D, self.alpha):
                writer.writerow([repr(v) for v in row])


def simulate(
    initial: SystemState,
    rates: RatePath,
    params: OdeParams,
    t_end: float,
    dt_step: float = 0.05,
) -> Trajectory:
    """Integrate the system with classical fixed-step RK4.

    The rate path must cover [initial.t, t_end].  Supply is clamped at
    zero if consumption drives it negative (the clamp is recorded on the
    trajectory).  A non-finite state aborts with NumericsError.
    """
    if dt_step <= 0.0:
        raise DataError("dt must be positive")
    if t_end < initial.t - 1e-12:
        raise DataError(f"t_end={t_end} precedes start t={initial.t}")
    if not rates.covers(initial.t, max(t_end, initial.t)):
        raise DataError(
            f"rate path covers [{rates.ts[0]}, {rates.ts[-1]}] but the "
            f"integration needs [{initial.t}, {t_end}]"
        )

    def f(t: float, Y: float, S: float, D: float) -> tuple[float, float, float]:
        return rhs(SystemState(t, Y, S, D), rates.rate(t), rates.slope(t), params)

    span = t_end - initial.t
    n_full = int(math.floor(span / dt_step + 1e-9))
    remainder = span - n_full * dt_step
    has_tail = remainder > 1e-9 * max(1.0, abs(span))

    t, Y, S, D = initial.t, initial.Y, initial.S, initial.D
    ts = [t]
    Ys = [Y]
    Ss = [S]
    Ds = [D]
    alphas = [alpha(S, D, params.C)]
    clamped = False
    first_clamp: float | None = None

    total_steps = n_full + (1 if has_tail else 0)
    for step in range(total_steps):
        h = dt_step if step < n_full else remainder
        t_next = initial.t + (step + 1) * dt_step if step < n_full else t_end

        k1 = f(t, Y, S, D)
        k2 = f(t + h / 2, Y + h / 2 * k1[0], S + h / 2 * k1[1], D + h / 2 * k1[2])
        k3 = f(t + h / 2, Y + h / 2 * k2[0], S + h / 2 * k2[1], D + h / 2 * k2[2])
        k4 = f(t + h, Y + h * k3[0], S + h * k3[1], D + h * k3[2])
        Y += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        S += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        D += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        t = t_next

        if not (math.isfinite(Y) and math.isfinite(S) and math.isfinite(D)):
            raise NumericsError(f"blow-up at t={t:.6g}")
        if S < 0.0:
            S = 0.0
            if not clamped:
                clamped = True
                first_clamp = t

        ts.append(t)
        Ys.append(Y)
        Ss.append(S)
        Ds.append(D)
        alphas.append(alpha(S, D, params.C))

    return Trajectory(
        tuple(ts), tuple(Ys), tuple(Ss), tuple(Ds), tuple(alphas),
        clamped=clamped, first_clamp_t=first_clamp,
    )
