"""Discretised response-tensor algebra for multimode power detectors.

A detector's energy-absorbing behaviour and a partially coherent field are
both represented by Hermitian kernels sampled on a common quadrature grid
(polarisation components, when present, are folded into the point index).
Diagonalising the kernels gives the detector reception modes and the natural
field modes; detected power is then a weighted sum over mode overlaps, or
equivalently a weighted trace of the kernel product.

Kernel text format (whitespace separated, ``#`` comments allowed)::

    kind response|field
    freq <Hz>
    point <pos...> <weight>    # one line per grid point, positions then weight
    matrix
    <re im re im ...>          # one line per row, interleaved re/im pairs

Mode sets are exported as CSV with one row per mode: the weight followed by
interleaved re/im vector components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .radiometry import SpectralBand
from .constants import PLANCK

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10
WEIGHT_CUTOFF = 1e-12


class KernelFormatError(ValueError):
    """Raised when a kernel file cannot be parsed."""


class NonHermitianError(ValueError):
    """Input kernel is not Hermitian within tolerance."""

    def __init__(self, max_asymmetry: float, scale: float):
        self.max_asymmetry = max_asymmetry
        super().__init__(
            f"kernel is not Hermitian: max |K - K^H| = {max_asymmetry:.3e} "
            f"exceeds {HERMITICITY_TOL:g} * scale ({scale:.3e})"
        )


class KernelKind(Enum):
    RESPONSE = "response"
    FIELD_CORRELATION = "field"


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered sample points on the reference surface with quadrature weights."""

    positions: np.ndarray  # (n, dim), metres
    weights: np.ndarray  # (n,), positive

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.shape[0] == 1 and np.asarray(self.positions).ndim == 1:
            pos = pos.T
        w = np.asarray(self.weights, dtype=float)
        if pos.shape[0] != w.shape[0]:
            raise ValueError("positions and weights must have matching length")
        if np.any(w <= 0.0):
            raise ValueError("quadrature weights must be positive")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @property
    def n_points(self) -> int:
        return self.weights.shape[0]

    def matches(self, other: "Grid") -> bool:
        return (
            self.positions.shape == other.positions.shape
            and np.allclose(self.positions, other.positions, rtol=1e-12, atol=1e-15)
            and np.allclose(self.weights, other.weights, rtol=1e-12, atol=1e-15)
        )

    @classmethod
    def unit(cls, n: int) -> "Grid":
        """n points with unit weights (the trivial quadrature)."""
        return cls(np.arange(n, dtype=float)[:, None], np.ones(n))

    @classmethod
    def trapezoid_1d(cls, lo: float, hi: float, n: int) -> "Grid":
        x = np.linspace(lo, hi, n)
        dx = (hi - lo) / (n - 1)
        w = np.full(n, dx)
        w[0] = w[-1] = 0.5 * dx
        return cls(x[:, None], w)


def _check_grids(a: Grid, b: Grid):
    if not a.matches(b):
        raise ValueError("grid mismatch: operands are sampled on different grids")


@dataclass(frozen=True, eq=False)
class SampledKernel:
    """Hermitian kernel sampled on a grid at a single frequency.

    ``reactive`` holds any anti-Hermitian remainder of the supplied matrix
    (energy storage rather than dissipation); it never enters power
    calculations.
    """

    grid: Grid
    values: np.ndarray  # (n, n) complex
    kind: KernelKind
    frequency: float  # Hz
    reactive: np.ndarray | None = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise ValueError(f"kernel must be {n}x{n} to match its grid")
        if self.frequency <= 0.0:
            raise ValueError("frequency must be positive")
        scale = float(np.max(np.abs(v))) or 1.0
        asym = float(np.max(np.abs(v - v.conj().T)))
        if asym > HERMITICITY_TOL * scale:
            raise NonHermitianError(asym, scale)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_general(cls, grid: Grid, values, kind: KernelKind,
                     frequency: float) -> "SampledKernel":
        """Split a general matrix into its Hermitian (dissipative) part, keeping
        the anti-Hermitian (reactive) remainder on the side."""
        v = np.asarray(values, dtype=complex)
        herm = 0.5 * (v + v.conj().T)
        anti = 0.5 * (v - v.conj().T)
        return cls(grid, herm, kind, frequency, reactive=anti)


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Eigenmodes of a sampled kernel: weights descending, vectors orthonormal
    under the grid's weighted inner product."""

    weights: np.ndarray  # (m,)
    vectors: np.ndarray  # (n, m), columns are modes
    grid: Grid

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.vectors, dtype=complex)
        if v.shape != (self.grid.n_points, w.shape[0]):
            raise ValueError("vectors must be (n_points, n_modes)")
        if w.size:
            if np.any(np.diff(w) > 0.0):
                raise ValueError("weights must be in descending order")
            top = max(float(w.max()), 0.0)
            if float(w.min()) < -PSD_TOL * max(top, 1e-300):
                raise ValueError("mode weights are negative beyond tolerance")
            gram = v.conj().T @ (self.grid.weights[:, None] * v)
            if float(np.max(np.abs(gram - np.eye(w.size)))) > 1e-10:
                raise ValueError("mode vectors are not orthonormal under the grid")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    @property
    def n_modes(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Weighted overlaps between detector reception modes and field modes."""

    values: np.ndarray  # (m_detector, n_field)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.size and float(np.max(np.abs(v))) > 1.0 + 1e-10:
            raise ValueError("coupling entries must not exceed unit magnitude")
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class ResponsePhase:
    """Phase of a detector response at carrier angular frequency omega0."""

    theta: float  # rad, in [-pi, pi]
    omega0: float  # rad/s

    def __post_init__(self):
        if not -math.pi <= self.theta <= math.pi:
            raise ValueError("theta must lie in [-pi, pi]")
        if self.omega0 <= 0.0:
            raise ValueError("omega0 must be positive")


def diagonalize(kernel: SampledKernel) -> ModeSet:
    """Weighted Hermitian eigendecomposition of a sampled kernel.

    Solves the continuous eigenproblem integral K(r, r') v(r') dr' = w v(r)
    on the quadrature grid; the returned vectors are orthonormal under the
    weighted inner product and modes with weight below 1e-12 of the maximum
    are discarded as numerical rank noise.
    """
    sw = np.sqrt(kernel.grid.weights)
    sym = sw[:, None] * kernel.values * sw[None, :]
    sym = 0.5 * (sym + sym.conj().T)
    evals, evecs = np.linalg.eigh(sym)
    evals = evals[::-1]
    evecs = evecs[:, ::-1]
    top = max(float(evals[0]), 0.0) if evals.size else 0.0
    if evals.size and float(evals[-1]) < -PSD_TOL * max(top, 1e-300):
        raise ValueError(
            f"kernel is not positive semidefinite: min eigenvalue {evals[-1]:.3e}"
        )
    keep = evals > WEIGHT_CUTOFF * top
    vectors = evecs[:, keep] / sw[:, None]
    return ModeSet(evals[keep], vectors, kernel.grid)


def reconstruct(modes: ModeSet) -> np.ndarray:
    """Kernel matrix rebuilt from a mode set, sum of w_m v_m v_m^H."""
    return (modes.vectors * modes.weights[None, :]) @ modes.vectors.conj().T


def coupling(detector: ModeSet, field_modes: ModeSet) -> CouplingMatrix:
    """Overlap matrix S[m, n] between detector and field modes on a shared grid."""
    _check_grids(detector.grid, field_modes.grid)
    w = detector.grid.weights
    s = detector.vectors.conj().T @ (w[:, None] * field_modes.vectors)
    return CouplingMatrix(s)


def detected_power_modal(detector: ModeSet, field_modes: ModeSet,
                         s: CouplingMatrix) -> float:
    """Detected spectral power as sum over modes of a_m b_n |S_mn|^2 (W/Hz)."""
    if s.shape != (detector.n_modes, field_modes.n_modes):
        raise ValueError("coupling matrix shape does not match the mode sets")
    overlap = np.abs(s.values) ** 2
    return float(detector.weights @ overlap @ field_modes.weights)


def detected_power_trace(response: SampledKernel, field_corr: SampledKernel) -> float:
    """Detected spectral power as the weighted trace of the kernel product.

    Reference form for cross-checks against the modal sum.
    """
    _check_grids(response.grid, field_corr.grid)
    w = response.grid.weights
    val = np.einsum("i,ij,j,ji->", w, response.values, w, field_corr.values)
    return float(val.real)


@dataclass(frozen=True)
class OutputCovariance:
    """Covariance of two detector outputs, split into wave and shot parts."""

    classical: float  # W^2
    shot: float  # W^2

    @property
    def total(self) -> float:
        return self.classical + self.shot


def output_covariance(response_a: SampledKernel, response_b: SampledKernel,
                      field_corr: SampledKernel, tau: float, same_detector: bool,
                      band: SpectralBand) -> OutputCovariance:
    """Covariance of the outputs of two detectors viewing the same field.

    The classical term is the weighted trace of D_a E D_b E scaled by the
    bandwidth; the photon shot term h*nu*Tr[D_a E] is only included when the
    two responses belong to the same detector, since photon absorption in
    different detectors is uncorrelated.  The kernels are treated as constant
    across the (narrow) band.
    """
    _check_grids(response_a.grid, field_corr.grid)
    _check_grids(response_b.grid, field_corr.grid)
    if tau <= 0.0:
        raise ValueError("integration time must be positive")
    w = field_corr.grid.weights
    chain = np.einsum(
        "i,ij,j,jk,k,kl,l,li->",
        w, response_a.values, w, field_corr.values,
        w, response_b.values, w, field_corr.values,
    )
    classical = band.width / tau * float(chain.real)
    shot = 0.0
    if same_detector:
        tr_ae = np.einsum("i,ij,j,ji->", w, response_a.values, w, field_corr.values)
        # exact integral of h*nu over the band
        shot = 0.5 * PLANCK * (band.nu_hi ** 2 - band.nu_lo ** 2) / tau * float(tr_ae.real)
    return OutputCovariance(classical, shot)


@dataclass(frozen=True, eq=False)
class HomodyneWaveform:
    """Instantaneous detected power over one oscillation period."""

    dissipative_avg: float
    reactive_avg: float
    times: np.ndarray
    power: np.ndarray


def homodyne_components(phase: ResponsePhase, n_samples: int = 256) -> HomodyneWaveform:
    """Time structure of single-tone power detection for a response phase theta.

    The instantaneous power (1 + cos(2 w0 t)) cos(theta) + sin(2 w0 t) sin(theta)
    splits into a dissipative part whose time average is cos(theta) (the power
    factor) and a reactive part that averages to zero, describing energy
    sloshing in and out of the detector.
    """
    period = math.pi / phase.omega0
    t = np.linspace(0.0, period, n_samples, endpoint=False)
    power = ((1.0 + np.cos(2.0 * phase.omega0 * t)) * math.cos(phase.theta)
             + np.sin(2.0 * phase.omega0 * t) * math.sin(phase.theta))
    return HomodyneWaveform(math.cos(phase.theta), 0.0, t, power)


def modeset_csv(modes: ModeSet) -> str:
    """Mode set as CSV: one row per mode, weight then re/im vector components."""
    header = ["weight"]
    for j in range(modes.grid.n_points):
        header += [f"re_{j}", f"im_{j}"]
    lines = [",".join(header)]
    for m in range(modes.n_modes):
        row = [f"{modes.weights[m]:.12g}"]
        for j in range(modes.grid.n_points):
            z = modes.vectors[j, m]
            row += [f"{z.real:.12g}", f"{z.imag:.12g}"]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def dump_kernel(kernel: SampledKernel) -> str:
    """Kernel in the structured text format understood by :func:`parse_kernel`.

    Entries carry 17 significant digits so floats round-trip exactly.
    """
    lines = [f"kind {kernel.kind.value}", f"freq {kernel.frequency:.17g}"]
    for pos, w in zip(kernel.grid.positions, kernel.grid.weights):
        coords = " ".join(f"{p:.17g}" for p in pos)
        lines.append(f"point {coords} {w:.17g}")
    lines.append("matrix")
    for row in kernel.values:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def parse_kernel(text: str) -> SampledKernel:
    """Parse the structured kernel text format."""
    kind = None
    freq = None
    points: list[list[float]] = []
    matrix_rows: list[list[complex]] = []
    in_matrix = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if in_matrix:
            try:
                nums = [float(tok) for tok in tokens]
            except ValueError as exc:
                raise KernelFormatError(f"line {lineno}: bad matrix entry") from exc
            if len(nums) % 2:
                raise KernelFormatError(
                    f"line {lineno}: matrix rows need interleaved re/im pairs")
            matrix_rows.append([complex(nums[i], nums[i + 1])
                                for i in range(0, len(nums), 2)])
            continue
        key = tokens[0].lower()
        if key == "kind":
            if len(tokens) != 2:
                raise KernelFormatError(f"line {lineno}: kind takes one value")
            try:
                kind = {"response": KernelKind.RESPONSE,
                        "field": KernelKind.FIELD_CORRELATION}[tokens[1].lower()]
            except KeyError as exc:
                raise KernelFormatError(
                    f"line {lineno}: kind must be 'response' or 'field'") from exc
        elif key == "freq":
            if len(tokens) != 2:
                raise KernelFormatError(f"line {lineno}: freq takes one value")
            freq = float(tokens[1])
        elif key == "point":
            if len(tokens) < 3:
                raise KernelFormatError(
                    f"line {lineno}: point needs position(s) and a weight")
            points.append([float(tok) for tok in tokens[1:]])
        elif key == "matrix":
            in_matrix = True
        else:
            raise KernelFormatError(f"line {lineno}: unknown directive {key!r}")
    if kind is None or freq is None or not points or not matrix_rows:
        raise KernelFormatError("kernel file needs kind, freq, points and a matrix")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise KernelFormatError("all point lines must have the same arity")
    pts = np.array(points)
    grid = Grid(pts[:, :-1], pts[:, -1])
    n = grid.n_points
    if len(matrix_rows) != n or any(len(r) != n for r in matrix_rows):
        raise KernelFormatError(f"matrix must be {n}x{n} to match the grid")
    return SampledKernel(grid, np.array(matrix_rows), kind, freq)


def load_kernel(path) -> SampledKernel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kernel(fh.read())
