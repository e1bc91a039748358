"""Directed signal-flow-graph solver with noise-wave and vacuum bookkeeping.

A network is a set of named nodes carrying travelling-wave amplitudes,
connected by edges with complex gains.  Node amplitudes follow
d = (I - C)^(-1) n for injected source amplitudes n, and source correlation
matrices map to output correlation matrices through the same kernel
(the connection matrix method).  Noise temperatures use the Rayleigh-Jeans
convention T = E[aa*]/k throughout; no occupancy correction is applied here.

Netlist text format (``#`` comments allowed)::

    z0 50                     # optional, ohms
    freq 5e9                  # optional default frequency, Hz
    node <name>
    edge <from> <to> <re> <im>
    source <node> wave <re> <im>
    source <node> thermal <T_kelvin>
    source <node> vacuum
    source <node> power <W_per_Hz>

Wave sources are deterministic amplitudes entering the solve; the other kinds
populate the diagonal of the source correlation matrix (thermal as k*T,
vacuum as the half-photon hbar*omega/2, power as a literal spectral density).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import BOLTZMANN, HBAR, PLANCK

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10


class NetlistError(ValueError):
    """Raised when a netlist file cannot be parsed."""


class UnstableGraphError(RuntimeError):
    """Flow graph has a resonant loop: the connection matrix does not converge."""

    def __init__(self, spectral_radius: float, loop=None, loop_gain: float | None = None):
        self.spectral_radius = spectral_radius
        self.loop = tuple(loop) if loop else None
        self.loop_gain = loop_gain
        msg = f"unstable flow graph: spectral radius {spectral_radius:.6g} >= 1"
        if self.loop:
            path = " -> ".join(self.loop + (self.loop[0],))
            label = "resonant loop" if loop_gain >= 1.0 - 1e-12 else "strongest loop found"
            msg += f"; {label} {path} with |loop gain| = {loop_gain:.6g}"
        super().__init__(msg)


@dataclass(frozen=True)
class SourceSpec:
    """A wave or noise source attached to a node."""

    kind: str  # "wave" | "thermal" | "vacuum" | "power"
    amplitude: complex = 0.0  # wave amplitude, sqrt(W/Hz) units
    temperature: float = 0.0  # K, for thermal sources
    psd: float = 0.0  # W/Hz, for explicit power sources

    def correlation(self, frequency: float | None) -> float:
        if self.kind == "wave":
            return 0.0
        if self.kind == "thermal":
            return BOLTZMANN * self.temperature
        if self.kind == "power":
            return self.psd
        if self.kind == "vacuum":
            if frequency is None:
                raise ValueError("vacuum sources need a frequency")
            return 0.5 * HBAR * (2.0 * math.pi * frequency)
        raise ValueError(f"unknown source kind {self.kind!r}")


class FlowGraph:
    """Mutable builder for a scattering flow graph; solves are pure functions."""

    def __init__(self, z0: float = 50.0):
        if z0 <= 0.0:
            raise ValueError("reference impedance must be positive")
        self.z0 = z0
        self.nodes: list[str] = []
        self._index: dict[str, int] = {}
        self._edges: dict[tuple[str, str], complex] = {}
        self.sources: dict[str, SourceSpec] = {}

    def add_node(self, name: str):
        if name in self._index:
            raise ValueError(f"duplicate node name {name!r}")
        self._index[name] = len(self.nodes)
        self.nodes.append(name)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown node {name!r}") from None

    def add_edge(self, src: str, dst: str, gain: complex):
        key = (src, dst)
        self.index(src), self.index(dst)
        if key in self._edges:
            raise ValueError(f"duplicate edge {src!r} -> {dst!r}")
        self._edges[key] = complex(gain)

    def set_source(self, node: str, spec: SourceSpec):
        self.index(node)
        self.sources[node] = spec

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def connection_matrix(self) -> np.ndarray:
        """Matrix C with C[i, j] the gain of the edge from node j to node i."""
        c = np.zeros((self.n_nodes, self.n_nodes), dtype=complex)
        for (src, dst), gain in self._edges.items():
            c[self.index(dst), self.index(src)] = gain
        return c

    def source_vector(self) -> np.ndarray:
        n = np.zeros(self.n_nodes, dtype=complex)
        for name, spec in self.sources.items():
            if spec.kind == "wave":
                n[self.index(name)] = spec.amplitude
        return n

    def source_correlation(self, frequency: float | None = None) -> "CorrelationMatrix":
        diag = np.zeros(self.n_nodes)
        for name, spec in self.sources.items():
            diag[self.index(name)] = spec.correlation(frequency)
        return CorrelationMatrix(np.diag(diag).astype(complex), tuple(self.nodes))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Hermitian PSD noise-wave correlation matrix; diagonal entries are W/Hz."""

    values: np.ndarray
    ports: tuple[str, ...] = field(default=())

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("correlation matrix must be square")
        ports = tuple(self.ports) if self.ports else tuple(
            f"p{i}" for i in range(v.shape[0]))
        if len(ports) != v.shape[0]:
            raise ValueError("port names must match matrix size")
        scale = float(np.max(np.abs(v))) or 1.0
        if float(np.max(np.abs(v - v.conj().T))) > HERMITICITY_TOL * scale:
            raise ValueError("correlation matrix is not Hermitian within tolerance")
        evals = np.linalg.eigvalsh(0.5 * (v + v.conj().T))
        top = max(float(evals[-1]), 0.0)
        if float(evals[0]) < -PSD_TOL * max(top, 1e-300):
            raise ValueError(
                f"correlation matrix is not PSD: min eigenvalue {evals[0]:.3e}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "ports", ports)

    @property
    def temperatures(self) -> np.ndarray:
        """Diagonal spectral powers expressed as Rayleigh-Jeans temperatures, K."""
        return np.real(np.diag(self.values)) / BOLTZMANN


def _spectral_radius(c: np.ndarray) -> float:
    if c.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(c))))


def _find_resonant_loop(c: np.ndarray, names: list[str], max_steps: int = 50000):
    """Best-effort search for a simple cycle with |gain product| >= 1.

    Returns (loop node names, |gain|) for the offending loop, or the strongest
    loop found if none reaches unity, or None when no cycle exists or the
    search budget runs out before finding one.
    """
    n = c.shape[0]
    out = [list(np.nonzero(c[:, j])[0]) for j in range(n)]
    best: tuple[float, list[int]] | None = None
    steps = 0
    for start in range(n):
        stack = [(start, 1.0 + 0.0j, [start])]
        while stack and steps < max_steps:
            node, prod, path = stack.pop()
            steps += 1
            for nxt in out[node]:
                gain = prod * c[nxt, node]
                if nxt == start:
                    mag = abs(gain)
                    if best is None or mag > best[0]:
                        best = (mag, path)
                    if mag >= 1.0 - 1e-12:
                        return [names[i] for i in path], mag
                elif nxt > start and nxt not in path:
                    stack.append((nxt, gain, path + [nxt]))
    if best is not None:
        return [names[i] for i in best[1]], best[0]
    return None


def _solve_kernel(graph: FlowGraph) -> np.ndarray:
    c = graph.connection_matrix()
    rho = _spectral_radius(c)
    if rho >= 1.0:
        found = _find_resonant_loop(c, graph.nodes)
        if found:
            raise UnstableGraphError(rho, found[0], found[1])
        raise UnstableGraphError(rho)
    return np.eye(graph.n_nodes) - c


def solve_waves(graph: FlowGraph, sources=None) -> np.ndarray:
    """Node wave amplitudes d = (I - C)^(-1) n.

    ``sources`` may be an explicit amplitude vector; by default the graph's
    wave sources are used.  The solve is refined until the residual satisfies
    ||(I - C) d - n|| < 1e-12 ||n||.
    """
    a = _solve_kernel(graph)
    n = graph.source_vector() if sources is None else np.asarray(sources, dtype=complex)
    if n.shape != (graph.n_nodes,):
        raise ValueError("source vector length must match the node count")
    d = np.linalg.solve(a, n)
    norm = float(np.linalg.norm(n))
    if norm > 0.0:
        residual = float(np.linalg.norm(a @ d - n))
        if residual > 1e-12 * norm:
            d = d + np.linalg.solve(a, n - a @ d)
            residual = float(np.linalg.norm(a @ d - n))
            if residual > 1e-12 * norm:
                raise RuntimeError(
                    f"wave solve residual {residual:.3e} exceeds tolerance")
    return d


def propagate_correlations(graph: FlowGraph, n_s: CorrelationMatrix) -> CorrelationMatrix:
    """Output correlation matrix N_c = K N_s K^H with K = (I - C)^(-1)."""
    if len(n_s.ports) != graph.n_nodes:
        raise ValueError("source correlation size must match the node count")
    a = _solve_kernel(graph)
    x = np.linalg.solve(a, n_s.values)
    n_c = np.linalg.solve(a, x.conj().T).conj().T
    n_c = 0.5 * (n_c + n_c.conj().T)
    return CorrelationMatrix(n_c, tuple(graph.nodes))


@dataclass(frozen=True)
class AmplifierNoiseModel:
    """Input-referred amplifier noise waves as equivalent temperatures.

    ``t_a`` is the wave effectively incident on the input, ``t_b`` the wave
    travelling away from it, and ``t_c`` with phase ``phi_c`` their
    correlation, bounded by sqrt(t_a * t_b).
    """

    t_a: float  # K
    t_b: float  # K
    t_c: float = 0.0  # K
    phi_c: float = 0.0  # rad
    s_matrix: np.ndarray | None = None  # optional 2x2 scattering matrix

    def __post_init__(self):
        if self.t_a < 0.0 or self.t_b < 0.0:
            raise ValueError("noise temperatures must be non-negative")
        bound = math.sqrt(self.t_a * self.t_b)
        if not 0.0 <= self.t_c <= bound * (1.0 + 1e-12):
            raise ValueError("correlation temperature must lie in [0, sqrt(t_a*t_b)]")
        if self.s_matrix is not None:
            s = np.asarray(self.s_matrix, dtype=complex)
            if s.shape != (2, 2):
                raise ValueError("scattering matrix must be 2x2")
            object.__setattr__(self, "s_matrix", s)


@dataclass(frozen=True)
class SourceReflection:
    """Source reflection coefficient seen from the amplifier input."""

    magnitude: float
    phase: float = 0.0  # rad

    def __post_init__(self):
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError("|Gamma| must lie in [0, 1]")

    @property
    def gamma(self) -> complex:
        return self.magnitude * cmath.exp(1j * self.phase)


def noise_temperature(amp: AmplifierNoiseModel, src: SourceReflection) -> float:
    """Amplifier noise temperature with a mismatched source.

    T_n = T_a + |Gamma|^2 T_b + 2 T_c |Gamma| cos(phi_c + phi_src); valid
    regardless of the amplifier's own input match.
    """
    g = src.magnitude
    return (amp.t_a + g * g * amp.t_b
            + 2.0 * amp.t_c * g * math.cos(amp.phi_c + src.phase))


def resonant_input_enhancement(gamma_src: complex, gamma_amp: complex) -> float:
    """Resonant noise-wave build-up factor 1/|1 - Gamma_src * Gamma_amp|^2."""
    if abs(gamma_src) > 1.0 or abs(gamma_amp) > 1.0:
        raise ValueError("reflection coefficients must have magnitude <= 1")
    prod = complex(gamma_src) * complex(gamma_amp)
    if abs(prod) >= 1.0:
        raise ValueError("|Gamma_src * Gamma_amp| >= 1: input line is unstable")
    return 1.0 / abs(1.0 - prod) ** 2


@dataclass(frozen=True)
class QuantumPort:
    """State of a travelling-wave port at angular frequency omega."""

    omega: float  # rad/s
    state: str = "vacuum"  # "vacuum" | "thermal" | "coherent" | "occupancy"
    temperature: float = 0.0  # K
    power: float = 0.0  # W/Hz carried by a coherent tone
    mean_occupancy: float = 0.0

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.state not in ("vacuum", "thermal", "coherent", "occupancy"):
            raise ValueError(f"unknown port state {self.state!r}")
        if self.mean_occupancy < 0.0:
            raise ValueError("occupancy must be non-negative")

    @classmethod
    def vacuum(cls, omega: float) -> "QuantumPort":
        return cls(omega)

    @classmethod
    def thermal(cls, omega: float, temperature: float) -> "QuantumPort":
        return cls(omega, "thermal", temperature=temperature)

    @classmethod
    def coherent(cls, omega: float, power: float) -> "QuantumPort":
        return cls(omega, "coherent", power=power)

    @classmethod
    def with_occupancy(cls, omega: float, mean_occupancy: float) -> "QuantumPort":
        return cls(omega, "occupancy", mean_occupancy=mean_occupancy)

    @property
    def occupancy(self) -> float:
        if self.state == "thermal":
            if self.temperature <= 0.0:
                return 0.0
            x = HBAR * self.omega / (BOLTZMANN * self.temperature)
            return 1.0 / math.expm1(x) if x < 700.0 else math.exp(-x)
        if self.state == "occupancy":
            return self.mean_occupancy
        return 0.0

    @property
    def spectral_density(self) -> float:
        """One-sided symmetrised spectral density hbar*omega*(n + 1/2), W/Hz."""
        if self.state == "coherent":
            return self.power + 0.5 * HBAR * self.omega
        return HBAR * self.omega * (self.occupancy + 0.5)


@dataclass(frozen=True)
class QuantumTwoPortResult:
    output_psd: float  # W/Hz leaving port 2
    added_psd: float  # W/Hz contributed by the internal noise operator
    noise_commutator: float  # realised [n, n^dagger] of the noise operator
    commutator_residual: float  # realised minus required; zero for the minimal model
    augmented_ports: tuple[int, ...]  # ports auto-filled with vacuum


def quantum_two_port(s_matrix, ports=None) -> QuantumTwoPortResult:
    """Output spectral density and minimal added noise of a quantised two-port.

    The outgoing wave at port 2 is b2 = S21 a1 + S22 a2 + n.  Preserving the
    bosonic commutator of b2 requires [n, n^dagger] = 1 - sum_k |S_2k|^2; the
    minimal model realises that deficit with a single auxiliary vacuum mode,
    adding (hbar*omega/2)*|1 - sum_k |S_2k|^2| of noise.  Ports not supplied
    are augmented with vacuum states and reported, since undriven ports still
    carry half-photon fluctuations.
    """
    s = np.asarray(s_matrix, dtype=complex)
    if s.shape != (2, 2):
        raise ValueError("scattering matrix must be 2x2")
    if ports is None:
        ports = [None, None]
    ports = list(ports)
    if len(ports) != 2:
        raise ValueError("a two-port takes two port states")
    omega = next((p.omega for p in ports if p is not None), None)
    if omega is None:
        raise ValueError("at least one port must specify its frequency")
    augmented = []
    for k in range(2):
        if ports[k] is None:
            ports[k] = QuantumPort.vacuum(omega)
            augmented.append(k)
        elif ports[k].omega != omega:
            raise ValueError("all ports must share one frequency")
    gain_sum = float(abs(s[1, 0]) ** 2 + abs(s[1, 1]) ** 2)
    deficit = 1.0 - gain_sum
    added = 0.5 * HBAR * omega * abs(deficit)
    output = sum(abs(s[1, k]) ** 2 * ports[k].spectral_density for k in range(2)) + added
    # single auxiliary mode: n = sqrt(deficit) c (loss) or sqrt(-deficit) c^dagger
    # (gain); either way the realised commutator equals the deficit.
    realised = deficit
    return QuantumTwoPortResult(float(output), added, realised, realised - deficit,
                                tuple(augmented))


def sql_noise_temperature(gain_power: float, nu: float) -> float:
    """Minimum input-referred noise temperature of a phase-preserving amplifier.

    (h*nu/2k)(1 - 1/G); tends to the standard quantum limit h*nu/2k at high
    gain.  Only defined for power gain >= 1.
    """
    if nu <= 0.0:
        raise ValueError("frequency must be positive")
    if not gain_power >= 1.0:
        raise ValueError("the bound applies to power gain >= 1")
    quantum_temp = 0.5 * PLANCK * nu / BOLTZMANN
    if math.isinf(gain_power):
        return quantum_temp
    return quantum_temp * (1.0 - 1.0 / gain_power)


def parse_netlist(text: str) -> tuple[FlowGraph, float | None]:
    """Parse netlist text; returns the flow graph and its default frequency."""
    graph = FlowGraph()
    frequency = None
    pending_z0 = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0].lower()
        try:
            if key == "z0":
                pending_z0 = float(tokens[1])
            elif key == "freq":
                frequency = float(tokens[1])
            elif key == "node":
                graph.add_node(tokens[1])
            elif key == "edge":
                src, dst, re, im = tokens[1], tokens[2], float(tokens[3]), float(tokens[4])
                graph.add_edge(src, dst, complex(re, im))
            elif key == "source":
                node, kind = tokens[1], tokens[2].lower()
                if kind == "wave":
                    spec = SourceSpec("wave", amplitude=complex(float(tokens[3]),
                                                                float(tokens[4])))
                elif kind == "thermal":
                    spec = SourceSpec("thermal", temperature=float(tokens[3]))
                elif kind == "vacuum":
                    spec = SourceSpec("vacuum")
                elif kind == "power":
                    spec = SourceSpec("power", psd=float(tokens[3]))
                else:
                    raise NetlistError(f"line {lineno}: unknown source kind {kind!r}")
                graph.set_source(node, spec)
            else:
                raise NetlistError(f"line {lineno}: unknown directive {key!r}")
        except NetlistError:
            raise
        except (IndexError, ValueError) as exc:
            raise NetlistError(f"line {lineno}: {exc}") from exc
    if pending_z0 is not None:
        if pending_z0 <= 0.0:
            raise NetlistError("z0 must be positive")
        graph.z0 = pending_z0
    return graph, frequency


def load_netlist(path) -> tuple[FlowGraph, float | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_netlist(fh.read())


def correlation_csv(corr: CorrelationMatrix) -> str:
    """Correlation matrix and derived temperatures as CSV, ports in the header."""
    header = ["port"]
    for name in corr.ports:
        header += [f"re_{name}", f"im_{name}"]
    header.append("T_kelvin")
    lines = [",".join(header)]
    temps = corr.temperatures
    for i, name in enumerate(corr.ports):
        row = [name]
        for j in range(len(corr.ports)):
            z = corr.values[i, j]
            row += [f"{z.real:.12g}", f"{z.imag:.12g}"]
        row.append(f"{temps[i]:.12g}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
