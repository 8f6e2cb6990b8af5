"""Command line front end: adnoise <subcommand> [options].

Subcommands map one-to-one onto the quantities of interest:

  states      level structure and wavefunctions of the surface well
  dipoles     vibrationally averaged induced dipole ladder
  rates       phonon transition rates and Debye mask at one temperature
  spectrum    dipole fluctuation spectrum per temperature
  tempsweep   temperature dependence in three frequency regimes + fit
  mc-scaling  Monte Carlo distance scaling of the field noise
  heat        electric-field noise and heating rate at the trap frequency
  validate    run the internal invariant checks

Exit codes: 0 ok, 2 configuration error, 3 model error, 4 numerical error.
"""

import argparse
import math
import sys
from functools import cached_property
from pathlib import Path

import numpy as np

from . import __version__, boundstates, dipoles, phonons, spectrum, trapnoise
from .config import RunConfig, override, parse_config, serialize_config
from .errors import (AdnoiseError, ConfigurationError, DomainError,
                     ModelError, NumericalError)
from .tables import emit_table
from .units import DEBYE, E_CHARGE, HBAR, KB

TWO_PI = 2.0 * math.pi


class Pipeline:
    """Lazy orchestration of potential -> states -> dipoles -> rates."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.params = cfg.potential
        self.material = cfg.material

    @cached_property
    def grid(self):
        return boundstates.auto_grid(self.params, self.cfg.solver.n_points)

    @cached_property
    def states(self):
        return boundstates.solve(self.params, self.grid,
                                 self.cfg.solver.max_states)

    @cached_property
    def nu10(self):
        """Exact fundamental splitting (E1 - E0)/hbar, rad/s."""
        return self.states.splitting(1, 0)

    @cached_property
    def gamma0(self):
        """Exact zero-temperature 1 -> 0 decay rate, 1/s."""
        rate, masked = phonons.transition_rate(self.states, self.material,
                                               1, 0, 0.0)
        if masked:
            raise ModelError(
                f"{self.params.name}: the fundamental transition exceeds the "
                "Debye cutoff; no single-phonon decay scale exists")
        return rate

    @cached_property
    def ladder(self):
        if self.params.polarizability is None:
            raise ConfigurationError(
                f"{self.params.name}: polarizability is required for dipole "
                "calculations; set potential.polarizability")
        return dipoles.dipole_ladder(self.states, self.params.polarizability,
                                     self.cfg.spectrum.image_factor)

    @cached_property
    def coupling(self):
        return boundstates.coupling_matrix(self.states)

    def kelvin(self, tspec):
        value, unit = tspec
        if unit == "K":
            return value
        return value * HBAR * self.nu10 / KB

    def temp_tag(self, tspec):
        value, unit = tspec
        return f"kT_{value:g}nu10" if unit == "nu10" else f"T_{value:g}K"

    def rate_matrix(self, T):
        return phonons.build_rate_matrix(self.states, self.material, T,
                                         coupling=self.coupling)

    def spectrum_at(self, T):
        r = self.rate_matrix(T)
        p0 = phonons.stationary_distribution(r)
        return spectrum.correlation_modes(r, p0, self.ladder)

    def omega_grid(self):
        sp = self.cfg.spectrum
        return spectrum.omega_grid(self.gamma0, sp.omega_min, sp.omega_max,
                                   sp.points_per_decade)

    def header(self, command, extra=()):
        lines = [f"adnoise {__version__}", f"command: {command}",
                 f"seed: {self.cfg.seed}"]
        lines += list(extra)
        lines.append("resolved configuration:")
        lines += ["  " + ln for ln in serialize_config(self.cfg).splitlines()]
        return lines

    def derived_header(self):
        try:
            gamma0_line = (f"gamma0_exact: {self.gamma0 / TWO_PI / 1e6:.6g} "
                           "MHz (over 2 pi)")
        except ModelError:
            gamma0_line = ("gamma0_exact: undefined (fundamental transition "
                           "above the Debye cutoff)")
        return [
            f"n_states: {self.states.n_states} "
            f"(near-zero discarded: {self.states.near_zero_discarded})",
            f"nu10_exact: {self.nu10 / TWO_PI / 1e12:.6g} THz",
            gamma0_line,
        ]


def cmd_states(pipe: Pipeline, outdir: Path):
    s = pipe.states
    z = s.grid.z()
    header = pipe.header("states", pipe.derived_header() + [
        "energies_meV: " + ", ".join(f"{e / (1e-3 * E_CHARGE):.6g}"
                                     for e in s.energies)])
    columns = [("z", "m"), ("U", "J")]
    columns += [(f"psi_{i}", "1/sqrt(m)") for i in range(s.n_states)]
    rows = [[z[k], s.potential_values[k], *(s.wavefunctions[i][k]
                                            for i in range(s.n_states))]
            for k in range(len(z))]
    return [emit_table(outdir / "states.csv", columns, rows, header)]


def cmd_dipoles(pipe: Pipeline, outdir: Path):
    s = pipe.states
    mu = pipe.ladder.mu
    header = pipe.header("dipoles", pipe.derived_header() + [
        f"image_factor: {pipe.cfg.spectrum.image_factor!r}",
        f"ladder_monotonic_decreasing: {bool(np.all(np.diff(mu) < 0))}"])
    columns = [("i", "1"), ("E", "meV"), ("mu", "D")]
    rows = [[i, s.energies[i] / (1e-3 * E_CHARGE), mu[i] / DEBYE]
            for i in range(s.n_states)]
    return [emit_table(outdir / "dipoles.csv", columns, rows, header)]


def cmd_rates(pipe: Pipeline, outdir: Path):
    T = pipe.kelvin(pipe.cfg.spectrum.temperatures[0])
    r = pipe.rate_matrix(T)
    header = pipe.header("rates", pipe.derived_header() + [
        f"temperature: {T:.6g} K",
        f"debye_frequency: {pipe.material.debye_frequency / 1e12:.6g} THz"])
    columns = [("i", "1"), ("f", "1"), ("delta_nu", "THz"),
               ("gamma", "1/s"), ("masked", "bool")]
    rows = []
    n = pipe.states.n_states
    for i in range(n):
        for f in range(n):
            if i == f:
                continue
            dnu = pipe.states.splitting(i, f) / TWO_PI / 1e12
            rows.append([i, f, dnu, r.gamma[i, f], bool(r.cutoff_mask[i, f])])
    return [emit_table(outdir / "rates.csv", columns, rows, header)]


def cmd_spectrum(pipe: Pipeline, outdir: Path):
    omegas = pipe.omega_grid()
    paths = []
    for tspec in pipe.cfg.spectrum.temperatures:
        T = pipe.kelvin(tspec)
        spec = pipe.spectrum_at(T)
        values = spectrum.evaluate_spectrum(spec, omegas)
        wc = spectrum.crossover_frequency(pipe.gamma0, pipe.nu10, T)
        header = pipe.header("spectrum", pipe.derived_header() + [
            f"temperature: {T:.6g} K ({tspec[0]:g} {tspec[1]})",
            f"crossover_omega_c: {wc / pipe.gamma0:.6g} gamma0",
            f"variance: {spec.variance / DEBYE ** 2:.6g} D^2"])
        columns = [("omega_over_gamma0", "1"), ("S_mu", "D^2/Hz")]
        rows = [[w / pipe.gamma0, v / DEBYE ** 2]
                for w, v in zip(omegas, values)]
        name = f"spectrum_{pipe.temp_tag(tspec)}.csv"
        paths.append(emit_table(outdir / name, columns, rows, header))
    return paths


def cmd_tempsweep(pipe: Pipeline, outdir: Path):
    ts = pipe.cfg.tempsweep
    t_lo, t_hi = pipe.kelvin(ts.t_min), pipe.kelvin(ts.t_max)
    temps = np.linspace(t_lo, t_hi, ts.n_temps)
    w_mid = ts.arrhenius_omega * pipe.gamma0
    w_hi = ts.highfreq_omega * pipe.gamma0
    rows = []
    for T in temps:
        spec = pipe.spectrum_at(T)
        s0 = spectrum.evaluate_spectrum(spec, 0.0)
        s_mid = spectrum.evaluate_spectrum(spec, w_mid)
        s_hi = spectrum.evaluate_spectrum(spec, w_hi)
        rows.append([KB * T / (HBAR * pipe.nu10), T, s0 / DEBYE ** 2,
                     s_mid / DEBYE ** 2, s_hi / DEBYE ** 2])
    mid_vals = np.array([r[3] for r in rows])
    fit_lines = []
    try:
        s_t, t0, resid = spectrum.arrhenius_fit(temps, mid_vals)
        fit_lines = [
            f"arrhenius_fit at omega = {ts.arrhenius_omega:g} gamma0: "
            f"S_T = {s_t:.6g} D^2/Hz, T0 = {t0:.6g} K "
            f"({t0 * KB / pipe.params.U0:.4g} U0/kB), residual_rms = {resid:.3g}"]
    except AdnoiseError as exc:
        fit_lines = [f"arrhenius_fit: not available ({exc})"]
    header = pipe.header("tempsweep", pipe.derived_header() + fit_lines)
    columns = [("kT_over_hnu10", "1"), ("T", "K"), ("S_white", "D^2/Hz"),
               (f"S_{ts.arrhenius_omega:g}gamma0", "D^2/Hz"),
               (f"S_{ts.highfreq_omega:g}gamma0", "D^2/Hz")]
    return [emit_table(outdir / "tempsweep.csv", columns, rows, header)]


def cmd_mc_scaling(pipe: Pipeline, outdir: Path):
    cfg = pipe.cfg
    mc = cfg.montecarlo
    # Work in units of the minimum spacing d0; the fitted exponent is
    # scale-invariant, so S_mu enters only as a common factor.
    base = trapnoise.sample_surface(mc.n_dipoles, mc.extent, 1.0,
                                    seed=cfg.mc_seed)
    trap = trapnoise.TrapConfig(distance=mc.d_values[0],
                                trap_frequency=TWO_PI * cfg.trap.frequency,
                                ion_mass=cfg.trap.ion_mass,
                                charge=cfg.trap.charge, axis=cfg.trap.axis)
    result = trapnoise.distance_scaling_fit(base, 1.0, trap, mc.d_values,
                                            n_seeds=mc.n_seeds)
    k_kernel = trapnoise.kernel_integral_constant()
    sigma = mc.n_dipoles / mc.extent ** 2
    ratios = [m / (sigma * k_kernel / (trapnoise.FOUR_PI_EPS0 ** 2 * d ** 4))
              for d, m in zip(result.distances, result.means)]
    header = pipe.header("mc-scaling", [
        f"n_dipoles: {mc.n_dipoles}, extent: {mc.extent:g} d0, "
        f"n_seeds: {mc.n_seeds}, seed: {cfg.mc_seed}",
        f"fitted_exponent: {result.exponent:.6g} +/- {result.stderr:.3g}",
        f"surface_average_constant: {trapnoise.SURFACE_AVERAGE_CONSTANT!r}",
        f"kernel_integral_constant: {k_kernel:.9g} (= 3 pi / 4; the ratio to "
        "3/8 is exactly 2 pi, a spectral-convention difference)",
        "S_E columns are per unit S_mu, distances in units of d0"])
    columns = [("d_over_d0", "1"), ("S_E_mean", "(V/m)^2 per (C m)^2"),
               ("S_E_stderr", "(V/m)^2 per (C m)^2"), ("mc_over_plane", "1"),
               ("n_seeds", "1")]
    rows = [[d, m, s, r, result.n_seeds]
            for d, m, s, r in zip(result.distances, result.means,
                                  result.stderrs, ratios)]
    return [emit_table(outdir / "mc_scaling.csv", columns, rows, header)]


def cmd_heat(pipe: Pipeline, outdir: Path):
    cfg = pipe.cfg
    trap = trapnoise.TrapConfig(distance=cfg.trap.distance,
                                trap_frequency=TWO_PI * cfg.trap.frequency,
                                ion_mass=cfg.trap.ion_mass,
                                charge=cfg.trap.charge, axis=cfg.trap.axis)
    rows = []
    for tspec in cfg.spectrum.temperatures:
        T = pipe.kelvin(tspec)
        spec = pipe.spectrum_at(T)
        s_mu = spectrum.evaluate_spectrum(spec, trap.trap_frequency)
        s_e = trapnoise.analytic_field_noise(cfg.trap.coverage, s_mu,
                                             trap.distance)
        rows.append([T, trap.trap_frequency, s_mu / DEBYE ** 2, s_e,
                     trapnoise.heating_rate(trap, s_e)])
    header = pipe.header("heat", pipe.derived_header() + [
        f"coverage: {cfg.trap.coverage:.6g} 1/m^2, "
        f"distance: {cfg.trap.distance:.6g} m",
        "field noise uses the surface-averaged 3/8 transfer"])
    columns = [("T", "K"), ("omega_t", "rad/s"), ("S_mu", "D^2/Hz"),
               ("S_E", "(V/m)^2/Hz"), ("ndot", "1/s")]
    return [emit_table(outdir / "heating.csv", columns, rows, header)]


def cmd_validate(pipe: Pipeline, outdir: Path):
    from .validate import run_checks
    results = run_checks()
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failed += 0 if ok else 1
    if failed:
        raise NumericalError(f"{failed} invariant check(s) failed")
    print(f"all {len(results)} invariant checks passed")
    return []


_COMMANDS = {
    "states": cmd_states,
    "dipoles": cmd_dipoles,
    "rates": cmd_rates,
    "spectrum": cmd_spectrum,
    "tempsweep": cmd_tempsweep,
    "mc-scaling": cmd_mc_scaling,
    "heat": cmd_heat,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="adnoise",
        description="Adatom dipole-fluctuation noise and ion heating rates")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="configuration document (see README)")
        p.add_argument("--preset", default=None,
                       help="adsorption system preset, e.g. Ne-Au")
        p.add_argument("--output", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--temperature", default=None,
                       help="comma-separated list, e.g. '0.2 nu10, 5 K'")
    return parser


def load_config(args) -> RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read {args.config}: {exc}") from None
    elif args.preset is not None:
        text = f"preset = {args.preset}\n"
    else:
        raise ConfigurationError("either --config or --preset is required")
    if args.config is not None and args.preset is not None:
        text = f"preset = {args.preset}\n" + text
    cfg = parse_config(text)
    return override(cfg, output=args.output, seed=args.seed,
                    temperatures=args.temperature)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        pipe = Pipeline(cfg)
        outdir = Path(cfg.output)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = _COMMANDS[args.command](pipe, outdir)
        for path in paths:
            print(f"wrote {path}")
        return 0
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
