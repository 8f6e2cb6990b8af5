"""Dipole fluctuation spectrum of a single adatom.

The dipole operator is diagonal in the vibrational basis,
mu = sum_i mu_i |i><i|, and the populations relax under the master
equation d<rho>/dt = M <rho>.  Two independent routes to the two-sided
spectrum S(omega) = int dtau (<mu(tau) mu(0)> - <mu>^2) e^{i omega tau}
are implemented:

* correlation_modes: detailed balance makes A = D^{-1/2} M D^{1/2}
  symmetric (D = diag of the stationary state), so the correlation
  function is an exact finite sum of decaying exponentials and the
  spectrum an exact sum of origin-centered Lorentzians
  S(omega) = sum_k w_k 2 lambda_k / (omega^2 + lambda_k^2).
  This is the primary method: no frequency grid error, manifestly
  non-negative weights.

* spectrum_via_ode: integrates the regression equations for the
  population correlations <rho_i(tau) rho_k(0)> directly, in the reduced
  form obtained by eliminating the last level through sum_i rho_i = 1
  (an (N-1)-block with a constant inhomogeneity, plus the separate
  equation for the eliminated level), then cosine-transforms the
  assembled correlation function.  Serves as the independent cross-check.

Both use the convention S(omega) two-sided in angular frequency, with
sum rule int S(omega) domega / 2 pi = Var(mu).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dipoles import DipoleLadder
from .errors import AnalysisError, DomainError, ModelError, NumericalError
from .phonons import RateMatrix, bose_occupation
from .units import HBAR, KB


@dataclass(frozen=True)
class DipoleSpectrum:
    """Lorentzian-mode decomposition of S_mu plus dipole statistics.

    modes: decay rates lambdas (1/s, all > 0) with spectral weights
    (C^2 m^2, all >= 0 up to round-off); their sum equals the variance.
    """

    lambdas: np.ndarray
    weights: np.ndarray
    mean_dipole: float
    variance: float
    temperature: float

    def __post_init__(self):
        if np.any(self.lambdas <= 0):
            raise NumericalError("all mode decay rates must be positive")
        if self.variance > 0:
            if self.weights.min() < -1e-12 * self.variance:
                raise NumericalError("negative spectral weight beyond round-off")
            if abs(self.weights.sum() - self.variance) > 1e-8 * self.variance:
                raise NumericalError(
                    "mode weights do not add up to the dipole variance")

    @property
    def n_modes(self):
        return len(self.lambdas)


def correlation_modes(r: RateMatrix, p0, ladder: DipoleLadder) -> DipoleSpectrum:
    """Spectral decomposition of the symmetrized generator.

    With D = diag(p0), A = D^{-1/2} M D^{1/2} must be symmetric (detailed
    balance); its eigenpairs (lambda_k <= 0, v_k) give the correlation
    C(tau) = sum_k w_k exp(lambda_k |tau|) with w_k = (v_k . w)^2 and
    w_i = mu_i sqrt(p0_i).  The single zero mode carries <mu>^2 and is
    excluded.
    """
    p0 = np.asarray(p0, dtype=float)
    mu = np.asarray(ladder.mu, dtype=float)
    if np.any(p0 <= 0):
        raise ModelError(
            "stationary populations must be strictly positive for the mode "
            "decomposition (T > 0)")
    M = r.generator
    d = np.sqrt(p0)
    A = M * (d[None, :] / d[:, None])
    asym = np.abs(A - A.T).max()
    if asym > 1e-8 * np.abs(A).max():
        raise NumericalError(
            f"detailed balance violation: symmetrized generator asymmetry "
            f"{asym:.3e} exceeds tolerance")
    lam, V = np.linalg.eigh(0.5 * (A + A.T))
    izero = int(np.argmax(lam))
    scale = np.abs(M).max()
    if abs(lam[izero]) > 1e-10 * scale:
        raise NumericalError("no zero mode found in the symmetrized generator")
    w = mu * d
    proj = V.T @ w
    keep = np.arange(len(lam)) != izero
    if np.any(lam[keep] >= 0):
        raise NumericalError("non-decaying mode besides the stationary one")
    mean = float(p0 @ mu)
    variance = float(p0 @ mu ** 2 - mean ** 2)
    return DipoleSpectrum(lambdas=-lam[keep], weights=proj[keep] ** 2,
                          mean_dipole=mean, variance=variance,
                          temperature=r.temperature)


def evaluate_spectrum(spec: DipoleSpectrum, omega):
    """S_mu(omega) as the exact Lorentzian sum; even in omega."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros_like(omega, dtype=float)
    for lam, wk in zip(spec.lambdas, spec.weights):
        out = out + wk * 2.0 * lam / (omega ** 2 + lam * lam)
    return out if out.ndim else float(out)


def _filon_cos(tau, c, omega):
    """Integral of a piecewise-linear c(tau) times cos(omega tau), exact
    per segment; robust for omega far above the grid Nyquist estimate."""
    h = tau[1] - tau[0]
    if omega * tau[-1] < 1e-8:
        return float(np.trapezoid(c, dx=h) if hasattr(np, "trapezoid")
                     else np.trapz(c, dx=h))
    s = np.sin(omega * tau)
    cs = np.cos(omega * tau)
    slope = np.diff(c) / h
    term1 = np.dot(c[:-1], s[1:] - s[:-1]) / omega
    term2 = np.dot(slope, h * s[1:] / omega + (cs[1:] - cs[:-1]) / omega ** 2)
    return term1 + term2


def correlation_via_ode(r: RateMatrix, p0, ladder: DipoleLadder, tau):
    """Dipole autocorrelation C(tau) from the regression equations.

    Integrates, for every initial level k, the reduced correlation system
    (i < N):

        d/dtau <rho_i(tau) rho_k(0)> =
            sum_{j<N} (M_ij - M_iN) <rho_j(tau) rho_k(0)> + M_iN p0_k

    together with the separate equation for the eliminated level N, from
    the initial condition <rho_i(0) rho_k(0)> = delta_ik p0_k.  All the
    two-point correlations are then contracted with the dipole ladder and
    <mu>^2 is subtracted.  Independent of the mode decomposition.
    """
    p0 = np.asarray(p0, dtype=float)
    mu = np.asarray(ladder.mu, dtype=float)
    tau = np.asarray(tau, dtype=float)
    M = r.generator
    n = len(p0)
    last = n - 1

    m_red = M[:last, :last] - M[:last, last][:, None]
    b = M[:last, last]
    row_n = M[last, :last] - M[last, last]
    m_nn = M[last, last]

    # State vector: the (n-1) x n block X[i, k], then the row for level N.
    x0 = np.zeros((last, n))
    x0[np.arange(last), np.arange(last)] = p0[:last]
    xn0 = np.zeros(n)
    xn0[last] = p0[last]
    y0 = np.concatenate([x0.ravel(), xn0])

    bp = np.outer(b, p0)

    def rhs(_t, y):
        x = y[: last * n].reshape(last, n)
        dx = m_red @ x + bp
        dxn = row_n @ x + m_nn * p0
        return np.concatenate([dx.ravel(), dxn])

    jac = np.zeros((n * n, n * n))
    jac[: last * n, : last * n] = np.kron(m_red, np.eye(n))
    jac[last * n:, : last * n] = np.kron(row_n[None, :], np.eye(n))

    sol = solve_ivp(rhs, (0.0, tau[-1]), y0, method="BDF",
                    jac=lambda t, y: jac, rtol=1e-9, atol=1e-13,
                    dense_output=True)
    if not sol.success:
        raise NumericalError(f"correlation ODE integration failed: {sol.message}")

    mean_sq = float(p0 @ mu) ** 2
    c = np.empty(len(tau))
    chunk = max(1, 20_000_000 // (n * n))
    for start in range(0, len(tau), chunk):
        block = sol.sol(tau[start:start + chunk])
        x = block[: last * n].reshape(last, n, -1)
        xn = block[last * n:]
        corr = np.einsum("i,ikt,k->t", mu[:last], x, mu)
        corr += mu[last] * (mu @ xn)
        c[start:start + chunk] = corr - mean_sq
    return c


def spectrum_via_ode(r: RateMatrix, p0, ladder: DipoleLadder, omegas,
                     tau_max, n_steps=200_000):
    """Regression-equation route to S_mu, sampled at the given omegas.

    The correlation function from `correlation_via_ode` on a uniform tau
    grid is cosine-transformed with a piecewise-linear (Filon) rule, so
    high frequencies carry no extra discretization error.  tau_max should
    exceed ~10 correlation times; n_steps sets the tau sampling.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    tau = np.linspace(0.0, tau_max, n_steps)
    c = correlation_via_ode(r, p0, ladder, tau)
    return np.array([2.0 * _filon_cos(tau, c, w) for w in omegas])


def integrate_spectrum(spec: DipoleSpectrum):
    """One-sided integral of S_mu over omega by adaptive quadrature.

    Integrated as omega = c tan(theta) with c the geometric mean of the
    mode rates: each Lorentzian becomes a smooth bounded integrand on
    [0, pi/2] no matter how many decades the rates span.  Together with
    the sum rule int S domega / pi = Var this cross-checks the weights.
    """
    from scipy.integrate import quad

    c = float(np.exp(np.mean(np.log(spec.lambdas))))

    def mapped(theta):
        t = math.tan(theta)
        return evaluate_spectrum(spec, c * t) * c * (1.0 + t * t)

    knees = sorted(set(float(np.arctan(l / c)) for l in spec.lambdas))
    val, err = quad(mapped, 0.0, 0.5 * math.pi, points=knees, limit=400)
    if err > 1e-4 * abs(val):
        raise NumericalError("spectrum quadrature did not converge")
    return val


def two_level_limit(mu0, mu1, gamma0, nu10, T, omega):
    """Low-temperature closed form: a single thermally activated Lorentzian
    of width gamma0 and weight (mu0 - mu1)^2 exp(-hbar nu10 / kB T)."""
    if T <= 0:
        raise DomainError("two-level limit requires T > 0")
    omega = np.asarray(omega, dtype=float)
    out = ((mu0 - mu1) ** 2 * 2.0 * gamma0 / (omega ** 2 + gamma0 ** 2)
           * math.exp(-HBAR * nu10 / (KB * T)))
    return out if out.ndim else float(out)


def crossover_frequency(gamma0, nu10, T):
    """Knee between the flat and the falling part: gamma0 (n(nu10) + 1)."""
    if T < 0:
        raise DomainError("temperature must be non-negative")
    n = bose_occupation(nu10, T) if T > 0 else 0.0
    return gamma0 * (n + 1.0)


def omega_grid(gamma0, omega_min=1e-3, omega_max=1e4, points_per_decade=60):
    """Logarithmic angular-frequency grid in units of gamma0."""
    decades = math.log10(omega_max / omega_min)
    n = max(2, int(round(decades * points_per_decade)) + 1)
    return gamma0 * np.logspace(math.log10(omega_min), math.log10(omega_max), n)


def fit_loglog_slope(omegas, values, window):
    """Least-squares slope of log S vs log omega inside window = (lo, hi).

    Returns (slope, standard_error).  Needs at least 8 positive samples in
    the window.
    """
    omegas = np.asarray(omegas, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    m = (omegas >= lo) & (omegas <= hi)
    if m.sum() < 8:
        raise AnalysisError(
            f"only {int(m.sum())} points inside window [{lo:.3g}, {hi:.3g}]; "
            "need at least 8")
    if np.any(values[m] <= 0):
        raise AnalysisError("spectrum values must be positive for a log-log fit")
    x = np.log(omegas[m])
    y = np.log(values[m])
    n = len(x)
    xm = x - x.mean()
    slope = float(np.dot(xm, y) / np.dot(xm, xm))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = max(n - 2, 1)
    stderr = float(np.sqrt(resid @ resid / dof / np.dot(xm, xm)))
    return slope, stderr


def empirical_knee(omegas, values):
    """Locate the crossover out of the white-noise plateau.

    The plateau level is read off the low-frequency end; a log-log line is
    fitted over the first decade after the spectrum has dropped to half
    the plateau, and the knee is where that line meets the plateau.
    """
    omegas = np.asarray(omegas, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(omegas)
    omegas, values = omegas[order], values[order]
    plateau = float(np.median(values[:5]))
    below = np.flatnonzero(values <= 0.5 * plateau)
    if len(below) == 0:
        raise AnalysisError("spectrum never drops below half the plateau")
    w_half = omegas[below[0]]
    slope, _ = fit_loglog_slope(omegas, values, (w_half, 10.0 * w_half))
    # Intercept of the fitted line through the half point.
    i0 = below[0]
    log_knee = np.log(omegas[i0]) + (np.log(plateau) - np.log(values[i0])) / slope
    return float(np.exp(log_knee))


def arrhenius_fit(temps, values):
    """Fit F(T) = S_T exp(-T0 / T) on the rising flank below the peak.

    Returns (S_T, T0, residual_rms).  The flank (all samples at
    temperatures strictly below the peak) must be monotonically rising.
    """
    temps = np.asarray(temps, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(temps) < 4:
        raise AnalysisError("need at least 4 temperatures")
    if np.any(values <= 0):
        raise AnalysisError("values must be positive")
    order = np.argsort(temps)
    temps, values = temps[order], values[order]
    ipeak = int(np.argmax(values))
    flank = slice(0, ipeak)
    t_f, v_f = temps[flank], values[flank]
    if len(t_f) < 2:
        raise AnalysisError("no rising flank below the peak")
    if np.any(np.diff(values[: ipeak + 1]) <= 0):
        raise AnalysisError("rising flank is not monotonic")
    x = 1.0 / t_f
    y = np.log(v_f)
    xm = x - x.mean()
    slope = float(np.dot(xm, y) / np.dot(xm, xm))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return math.exp(intercept), -slope, rms
