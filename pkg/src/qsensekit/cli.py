"""Command-line front end: subcommand dispatch, CSV emission, reproducibility.

Every output starts with a single metadata comment line recording the tool
version, the constants revision and, for stochastic runs, the seed.  Files are
written atomically (temp file then rename).  Exit codes: 0 success, 1
computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass

from . import __version__
from .constants import CONSTANTS_REVISION
from . import circuit_elements, coupled_mode, noise_network, photon_statistics
from . import radiometry, sensitivity

_FMT = "{:.12g}".format


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    args: argparse.Namespace

    @property
    def output(self):
        return getattr(self.args, "output", None)

    @property
    def seed(self):
        return getattr(self.args, "seed", None)

    @property
    def quiet(self) -> bool:
        return bool(getattr(self.args, "quiet", False))


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("-o", "--output", help="output CSV path (default: stdout)")
    parser.add_argument("--seed", type=int, help="RNG seed for stochastic runs")
    parser.add_argument("--quiet", action="store_true", help="suppress notes on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsensekit",
        description="Noise and sensitivity modelling for quantum-limited receivers",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("radiometry", help="thermal power and fluctuation statistics")
    p.add_argument("--temperature", type=float, required=True, help="source T, K")
    p.add_argument("--nu-lo", type=float, required=True, help="band start, Hz")
    p.add_argument("--nu-hi", type=float, required=True, help="band stop, Hz")
    p.add_argument("--geometry", choices=["tem", "halfspace", "cone"], default="tem")
    p.add_argument("--area", type=float, default=1.0, help="source area, m^2")
    p.add_argument("--wavelength", type=float, default=1.0, help="wavelength, m")
    p.add_argument("--theta", type=float, help="cone half angle, rad")
    p.add_argument("--tau", type=float, default=1.0, help="integration time, s")
    p.add_argument("--points", type=int, default=64, help="quadrature hint")
    _add_common(p)

    p = sub.add_parser("photonstats", help="Poisson-mixture photon counting Monte Carlo")
    p.add_argument("--mean-occupancy", type=float, required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--model", choices=["fixed", "gaussian"], default="gaussian")
    _add_common(p)

    p = sub.add_parser("detector", help="coupled-mode kernel operations")
    p.add_argument("action", choices=["modes", "couple"])
    p.add_argument("inputs", nargs="+", help="kernel file(s)")
    _add_common(p)

    p = sub.add_parser("network", help="signal-flow-graph wave and noise solver")
    p.add_argument("action", choices=["solve", "correlations"])
    p.add_argument("netlist", help="netlist file")
    p.add_argument("--freq", type=float, help="frequency, Hz (overrides the netlist)")
    _add_common(p)

    p = sub.add_parser("circuit", help="resonator quadratures and material constants")
    p.add_argument("action", choices=["resonator", "materials"])
    p.add_argument("--f0", type=float, help="resonance frequency, Hz")
    p.add_argument("--q", type=float, help="quality factor")
    p.add_argument("--capacitance", type=float, help="C in farads")
    p.add_argument("--inductance", type=float, help="L in henries")
    p.add_argument("--temperature", type=float, default=0.0, help="bath T, K")
    p.add_argument("--input", dest="materials_input", help="materials CSV to read")
    _add_common(p)

    p = sub.add_parser("compare", help="detector-vs-amplifier sensitivity curves")
    p.add_argument("--fig7", action="store_true",
                   help="emit the default five-family comparison dataset")
    p.add_argument("--nep", type=float, help="detector NEP, W/Hz^0.5")
    p.add_argument("--bandwidth", type=float, help="pre-detection bandwidth, Hz")
    p.add_argument("--resolution", type=float, help="spectral resolution R")
    p.add_argument("--nu0", type=float, help="centre frequency, Hz")
    p.add_argument("--nu-min", type=float, default=1e8)
    p.add_argument("--nu-max", type=float, default=1e13)
    p.add_argument("--points-per-decade", type=int, default=10)
    _add_common(p)

    return parser


def parse_config(argv) -> RunConfig:
    """Parse and validate arguments; argparse exits with code 2 on usage errors."""
    parser = build_parser()
    args = parser.parse_args(argv)

    paths = []
    if args.subcommand == "detector":
        expected = {"modes": 1, "couple": 2}[args.action]
        if len(args.inputs) != expected:
            parser.error(f"detector {args.action} takes {expected} kernel file(s)")
        paths = args.inputs
    elif args.subcommand == "network":
        paths = [args.netlist]
    elif args.subcommand == "circuit" and args.materials_input:
        paths = [args.materials_input]
    for path in paths:
        if not os.path.isfile(path) or not os.access(path, os.R_OK):
            parser.error(f"cannot read input file {path!r}")

    if args.subcommand == "circuit" and args.action == "resonator":
        if args.f0 is None or args.q is None:
            parser.error("circuit resonator needs --f0 and --q")
        if (args.capacitance is None) == (args.inductance is None):
            parser.error("give exactly one of --capacitance or --inductance")
    if args.subcommand == "compare" and not args.fig7:
        if args.nep is None:
            parser.error("compare needs --fig7 or --nep")
        if args.bandwidth is None and (args.resolution is None or args.nu0 is None):
            parser.error("--nep needs --bandwidth or both --resolution and --nu0")
    return RunConfig(args.subcommand, args)


def _metadata_line(seed=None) -> str:
    line = f"# qsensekit={__version__} constants={CONSTANTS_REVISION}"
    if seed is not None:
        line += f" seed={seed}"
    return line


def _write_output(path, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _note(cfg: RunConfig, message: str):
    if not cfg.quiet:
        print(message, file=sys.stderr)


def _run_radiometry(cfg: RunConfig) -> str:
    a = cfg.args
    if a.geometry == "tem":
        etendue = radiometry.EtendueSpec.tem_line()
    elif a.geometry == "halfspace":
        etendue = radiometry.EtendueSpec.half_space(a.area, a.wavelength)
    else:
        if a.theta is None:
            raise ValueError("cone geometry needs --theta")
        etendue = radiometry.EtendueSpec.cone(a.area, a.wavelength, a.theta)
    src = radiometry.ThermalSource(a.temperature, etendue)
    band = radiometry.SpectralBand(a.nu_lo, a.nu_hi, a.points)
    integ = radiometry.IntegrationSpec(a.tau)
    power = radiometry.thermal_power(src, band)
    fluct = radiometry.power_fluctuation(src, band, integ)
    header = ("mode_count,power_W,fluct_classical_W2,fluct_quantum_W2,"
              "fluct_total_W2,radiometer_dT_K,crossover_Hz")
    if a.temperature > 0.0:
        d_t = radiometry.radiometer_resolution(a.temperature, band.width, a.tau)
        crossover = radiometry.crossover_frequency(a.temperature)
    else:
        d_t = 0.0
        crossover = 0.0
    row = ",".join(_FMT(v) for v in (
        radiometry.mode_count(etendue), power, fluct.classical, fluct.quantum,
        fluct.total, d_t, crossover))
    return "\n".join([_metadata_line(), header, row]) + "\n"


def _run_photonstats(cfg: RunConfig) -> str:
    a = cfg.args
    seed = a.seed if a.seed is not None else 0
    model = (photon_statistics.AmplitudeModel.FIXED_AMPLITUDE if a.model == "fixed"
             else photon_statistics.AmplitudeModel.COMPLEX_GAUSSIAN)
    stats = photon_statistics.sample_counts(photon_statistics.MixtureConfig(
        a.mean_occupancy, a.samples, model, seed))
    summary = (f"# mean={_FMT(stats.sample_mean)} variance={_FMT(stats.sample_variance)}"
               f" classical={_FMT(stats.classical_part)}"
               f" poisson={_FMT(stats.poisson_part)} rng={stats.rng_algorithm}")
    return "\n".join([_metadata_line(seed), summary,
                      photon_statistics.histogram_csv(stats).rstrip("\n")]) + "\n"


def _run_detector(cfg: RunConfig) -> str:
    a = cfg.args
    if a.action == "modes":
        kernel = coupled_mode.load_kernel(a.inputs[0])
        modes = coupled_mode.diagonalize(kernel)
        body = coupled_mode.modeset_csv(modes).rstrip("\n")
        return "\n".join([_metadata_line(), body]) + "\n"
    response = coupled_mode.load_kernel(a.inputs[0])
    field_corr = coupled_mode.load_kernel(a.inputs[1])
    det = coupled_mode.diagonalize(response)
    fld = coupled_mode.diagonalize(field_corr)
    s = coupled_mode.coupling(det, fld)
    power_modal = coupled_mode.detected_power_modal(det, fld, s)
    power_trace = coupled_mode.detected_power_trace(response, field_corr)
    lines = [_metadata_line(),
             f"# power_modal_W_per_Hz={_FMT(power_modal)}"
             f" power_trace_W_per_Hz={_FMT(power_trace)}",
             "detector_mode,field_mode,re,im,abs2"]
    for m in range(s.shape[0]):
        for n in range(s.shape[1]):
            z = s.values[m, n]
            lines.append(f"{m},{n},{_FMT(z.real)},{_FMT(z.imag)},{_FMT(abs(z) ** 2)}")
    return "\n".join(lines) + "\n"


def _run_network(cfg: RunConfig) -> str:
    a = cfg.args
    graph, netlist_freq = noise_network.load_netlist(a.netlist)
    freq = a.freq if a.freq is not None else netlist_freq
    if a.action == "solve":
        amplitudes = noise_network.solve_waves(graph)
        lines = [_metadata_line(), "node,re,im,power_W_per_Hz"]
        for name, d in zip(graph.nodes, amplitudes):
            lines.append(f"{name},{_FMT(d.real)},{_FMT(d.imag)},{_FMT(abs(d) ** 2)}")
        return "\n".join(lines) + "\n"
    n_s = graph.source_correlation(freq)
    n_c = noise_network.propagate_correlations(graph, n_s)
    body = noise_network.correlation_csv(n_c).rstrip("\n")
    return "\n".join([_metadata_line(), body]) + "\n"


def _run_circuit(cfg: RunConfig) -> str:
    a = cfg.args
    if a.action == "materials":
        if a.materials_input:
            with open(a.materials_input, "r", encoding="utf-8") as fh:
                materials = circuit_elements.materials_from_csv(fh.read())
        else:
            materials = circuit_elements.BUILTIN_MATERIALS
        flux = circuit_elements.flux_quantum()
        body = circuit_elements.materials_csv(materials).rstrip("\n")
        return "\n".join([_metadata_line(), f"# flux_quantum_Wb={_FMT(flux)}",
                          body]) + "\n"
    omega0 = 2.0 * math.pi * a.f0
    if a.capacitance is not None:
        cap = a.capacitance
        ind = 1.0 / (omega0 ** 2 * cap)
    else:
        ind = a.inductance
        cap = 1.0 / (omega0 ** 2 * ind)
    res = circuit_elements.ResonatorSpec.from_lc(ind, cap, a.q, a.temperature)
    dv2, di2 = circuit_elements.quadrature_variance(res)
    header = "f0_Hz,Q,L_H,C_F,T_K,dv2_V2,di2_A2,noise_bandwidth_Hz,crossover_T_K"
    row = ",".join(_FMT(v) for v in (
        a.f0, a.q, ind, cap, a.temperature, dv2, di2,
        circuit_elements.lorentzian_noise_bandwidth(a.f0, a.q),
        circuit_elements.classical_quantum_crossover_temperature(a.f0)))
    return "\n".join([_metadata_line(), header, row]) + "\n"


def _run_compare(cfg: RunConfig) -> str:
    a = cfg.args
    if a.fig7:
        grid = sensitivity.default_frequency_grid(a.nu_min, a.nu_max,
                                                  a.points_per_decade)
        table = sensitivity.figure7_dataset(sensitivity.default_figure7_specs(), grid)
        return "\n".join([_metadata_line(), table.to_csv().rstrip("\n")]) + "\n"
    if a.bandwidth is not None:
        t_en = sensitivity.nep_to_temperature(a.nep, a.bandwidth)
    else:
        t_en = sensitivity.nep_to_temperature_resolved(
            sensitivity.DetectorSpec(a.nep, a.nu0, resolution=a.resolution))
    return "\n".join([_metadata_line(), "T_equiv_K", _FMT(t_en)]) + "\n"


_DISPATCH = {
    "radiometry": _run_radiometry,
    "photonstats": _run_photonstats,
    "detector": _run_detector,
    "network": _run_network,
    "circuit": _run_circuit,
    "compare": _run_compare,
}


def run(cfg: RunConfig) -> int:
    """Execute a parsed configuration; returns the process exit code."""
    try:
        text = _DISPATCH[cfg.subcommand](cfg)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_output(cfg.output, text)
    if cfg.output is not None:
        _note(cfg, f"wrote {cfg.output}")
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
