"""Covariance-matrix algebra for multimode Gaussian optical states.

All variances are expressed in shot-noise units (SNU): the vacuum state has
quadrature variance 1. An N-mode state is described by a real symmetric
2N x 2N covariance matrix; mode k occupies rows and columns 2k and 2k+1
(q quadrature before p). Symplectic transformations act as ``S @ cov @ S.T``
and preserve the symplectic spectrum. All states are zero-mean, so first
moments are never tracked.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import DomainError, PhysicalityError, UnsupportedCaseError, UsageError

SIGMA_Z = np.diag([1.0, -1.0])

# Symplectic eigenvalues this far below 1 are rounding noise and get clamped
# to exactly 1; below the physicality threshold they are treated as a genuine
# uncertainty-principle violation.
CLAMP_TOL = 1e-9
PHYSICALITY_TOL = 1e-6

_SYMMETRY_TOL = 1e-12


class Quadrature(enum.Enum):
    """Quadrature selected by a homodyne measurement."""

    Q = 0
    P = 1


class CovMatrix:
    """Covariance matrix of an N-mode Gaussian state, in shot-noise units.

    The constructor symmetrizes its input and rejects matrices whose
    asymmetry exceeds rounding scale (1e-12 relative to the largest entry).
    Physicality (all symplectic eigenvalues >= 1) is not enforced here; it is
    checked wherever the spectrum is actually computed.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray | Sequence[Sequence[float]]):
        arr = np.array(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise UsageError(f"covariance matrix must be square, got shape {arr.shape}")
        if arr.shape[0] % 2 or arr.shape[0] == 0:
            raise UsageError(f"covariance matrix needs an even dimension, got {arr.shape[0]}")
        scale = max(1.0, float(np.max(np.abs(arr))))
        asym = float(np.max(np.abs(arr - arr.T)))
        if asym > _SYMMETRY_TOL * scale:
            raise DomainError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
        self.data = 0.5 * (arr + arr.T)

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    def __repr__(self) -> str:  # pragma: no cover
        return f"CovMatrix(n_modes={self.n_modes})"


class SympMatrix:
    """Real symplectic matrix: satisfies S @ Omega @ S.T == Omega."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray | Sequence[Sequence[float]]):
        arr = np.array(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise UsageError(f"symplectic matrix must be square with even dimension, got {arr.shape}")
        omega = symplectic_form(arr.shape[0] // 2)
        residual = float(np.max(np.abs(arr @ omega @ arr.T - omega)))
        if residual > _SYMMETRY_TOL:
            raise DomainError(f"matrix is not symplectic (residual {residual:.3e})")
        self.data = arr

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    def __matmul__(self, other: "SympMatrix") -> "SympMatrix":
        if not isinstance(other, SympMatrix):
            return NotImplemented
        return SympMatrix(self.data @ other.data)

    def __repr__(self) -> str:  # pragma: no cover
        return f"SympMatrix(n_modes={self.n_modes})"


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form: n copies of [[0, 1], [-1, 0]]."""
    if n_modes < 1:
        raise UsageError("n_modes must be at least 1")
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def epr_state(variance: float) -> CovMatrix:
    """Two-mode squeezed vacuum with quadrature variance ``variance`` per arm.

    The arms are correlated through sqrt(variance**2 - 1) * sigma_z
    off-diagonal blocks; the state is pure (both symplectic eigenvalues 1)
    for every admissible variance.

    Args:
        variance: single-arm quadrature variance in SNU, must be >= 1.
    """
    if variance < 1.0:
        raise DomainError(f"EPR variance must be >= 1 SNU, got {variance}")
    c = math.sqrt(variance * variance - 1.0)
    out = np.zeros((4, 4))
    out[:2, :2] = variance * np.eye(2)
    out[2:, 2:] = variance * np.eye(2)
    out[:2, 2:] = c * SIGMA_Z
    out[2:, :2] = c * SIGMA_Z
    return CovMatrix(out)


def thermal_state(variance: float) -> CovMatrix:
    """Single-mode thermal state with isotropic quadrature variance."""
    if variance < 1.0:
        raise DomainError(f"thermal variance must be >= 1 SNU, got {variance}")
    return CovMatrix(variance * np.eye(2))


def vacuum_state(n_modes: int = 1) -> CovMatrix:
    """n-mode vacuum: the identity matrix."""
    if n_modes < 1:
        raise UsageError("n_modes must be at least 1")
    return CovMatrix(np.eye(2 * n_modes))


def direct_sum(states: Iterable[CovMatrix]) -> CovMatrix:
    """Block-diagonal combination of independent states.

    The mode count adds up and the symplectic spectrum of the result is the
    union of the spectra of the parts.
    """
    blocks = list(states)
    if not blocks:
        raise UsageError("direct_sum needs at least one state")
    dim = sum(b.data.shape[0] for b in blocks)
    out = np.zeros((dim, dim))
    offset = 0
    for b in blocks:
        d = b.data.shape[0]
        out[offset : offset + d, offset : offset + d] = b.data
        offset += d
    return CovMatrix(out)


def beamsplitter(n_modes: int, mode_i: int, mode_j: int, transmittance: float) -> SympMatrix:
    """Beamsplitter of given transmittance T acting on two modes.

    The 4x4 sub-block on (mode_i, mode_j) is
    ``[[sqrt(T) I, +sqrt(1-T) I], [-sqrt(1-T) I, sqrt(T) I]]``:
    mode_i receives the +sqrt(1-T) admixture of mode_j, mode_j the
    -sqrt(1-T) admixture of mode_i. All other modes are untouched.

    Args:
        n_modes: total number of modes of the transform.
        mode_i: index of the transmitted-signal arm.
        mode_j: index of the ancilla arm.
        transmittance: power transmittance in [0, 1].
    """
    if not 0.0 <= transmittance <= 1.0:
        raise DomainError(f"transmittance must lie in [0, 1], got {transmittance}")
    if mode_i == mode_j:
        raise UsageError("beamsplitter needs two distinct modes")
    for m in (mode_i, mode_j):
        if not 0 <= m < n_modes:
            raise UsageError(f"mode index {m} out of range for {n_modes} modes")
    c = math.sqrt(transmittance)
    s = math.sqrt(1.0 - transmittance)
    out = np.eye(2 * n_modes)
    eye2 = np.eye(2)
    out[2 * mode_i : 2 * mode_i + 2, 2 * mode_i : 2 * mode_i + 2] = c * eye2
    out[2 * mode_j : 2 * mode_j + 2, 2 * mode_j : 2 * mode_j + 2] = c * eye2
    out[2 * mode_i : 2 * mode_i + 2, 2 * mode_j : 2 * mode_j + 2] = s * eye2
    out[2 * mode_j : 2 * mode_j + 2, 2 * mode_i : 2 * mode_i + 2] = -s * eye2
    return SympMatrix(out)


def mode_permutation(n_modes: int, new_order: Sequence[int]) -> SympMatrix:
    """Permutation acting on whole mode blocks.

    ``new_order[k]`` names the input mode placed at output slot k, so
    ``mode_permutation(5, [0, 2, 3, 4, 1])`` moves mode 1 to the last slot
    and shifts modes 2..4 up by one. The result is orthogonal and symplectic.
    """
    if sorted(new_order) != list(range(n_modes)):
        raise DomainError(f"{list(new_order)} is not a permutation of 0..{n_modes - 1}")
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for slot, src in enumerate(new_order):
        out[2 * slot : 2 * slot + 2, 2 * src : 2 * src + 2] = np.eye(2)
    return SympMatrix(out)


def apply_symplectic(transform: SympMatrix, cov: CovMatrix) -> CovMatrix:
    """Propagate a state through a symplectic transform: S @ cov @ S.T.

    The product is re-symmetrized to wipe rounding asymmetry; the symplectic
    spectrum is preserved.
    """
    if transform.data.shape != cov.data.shape:
        raise UsageError(
            f"dimension mismatch: transform is {transform.data.shape}, state is {cov.data.shape}"
        )
    out = transform.data @ cov.data @ transform.data.T
    return CovMatrix(0.5 * (out + out.T))


def extract_modes(cov: CovMatrix, modes: Sequence[int]) -> CovMatrix:
    """Marginal state of the listed modes (rows/columns of their blocks)."""
    if len(set(modes)) != len(modes):
        raise UsageError("mode list contains duplicates")
    for m in modes:
        if not 0 <= m < cov.n_modes:
            raise UsageError(f"mode index {m} out of range for {cov.n_modes} modes")
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
    return CovMatrix(cov.data[np.ix_(idx, idx)])


def clamp_spectrum(values: np.ndarray) -> np.ndarray:
    """Clamp near-unit symplectic eigenvalues, reject unphysical ones.

    Values in [1 - 1e-9, 1) become exactly 1; anything below 1 - 1e-6 raises
    PhysicalityError naming the offending value.
    """
    values = np.asarray(values, dtype=float)
    if np.any(values < 1.0 - PHYSICALITY_TOL):
        worst = float(values.min())
        raise PhysicalityError(f"symplectic eigenvalue {worst:.9g} violates the uncertainty bound")
    return np.where((values >= 1.0 - CLAMP_TOL) & (values < 1.0), 1.0, values)


def symplectic_eigenvalues(cov: CovMatrix) -> np.ndarray:
    """Symplectic spectrum of a physical state, in descending order.

    Computed as the positive square roots of the eigenvalues of
    ``-(Omega @ cov)**2``, which is similar to a symmetric positive matrix;
    this keeps the computation in real arithmetic. Each eigenvalue appears
    twice in that product, so adjacent pairs of the sorted spectrum are
    averaged before the square root.
    """
    omega = symplectic_form(cov.n_modes)
    m = omega @ cov.data
    squared = np.linalg.eigvals(-m @ m).real
    squared = np.sort(np.maximum(squared, 0.0))
    nus = np.sqrt(0.5 * (squared[0::2] + squared[1::2]))
    return clamp_spectrum(nus[::-1])


def two_mode_eigs(a: float, b: float, c: float) -> tuple[float, float]:
    """Symplectic eigenvalues of [[a I, c sigma_z], [c sigma_z, b I]].

    Returns ``(z + (b - a)) / 2`` and ``(z - (b - a)) / 2`` with
    ``z = sqrt((a + b)**2 - 4 c**2)``; agrees with the generic solver on the
    assembled 4x4 matrix. The same clamping policy as the generic solver is
    applied to the results.
    """
    disc = (a + b) ** 2 - 4.0 * c * c
    if disc < 0.0:
        raise DomainError(f"negative discriminant {disc:.3e} for a={a}, b={b}, c={c}")
    z = math.sqrt(disc)
    nu1, nu2 = clamp_spectrum(np.array([0.5 * (z + (b - a)), 0.5 * (z - (b - a))]))
    return float(nu1), float(nu2)


def _partition_at(cov: CovMatrix, mode: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Permute the measured mode last and split into (kept, cross, measured)."""
    n = cov.n_modes
    if not 0 <= mode < n:
        raise UsageError(f"mode index {mode} out of range for {n} modes")
    if n == 1:
        raise UsageError("cannot condition away the only mode")
    order = [m for m in range(n) if m != mode] + [mode]
    rearranged = apply_symplectic(mode_permutation(n, order), cov).data
    return rearranged[:-2, :-2], rearranged[:-2, -2:], rearranged[-2:, -2:]


def condition_heterodyne(cov: CovMatrix, mode: int) -> CovMatrix:
    """State of the remaining modes after heterodyning ``mode``.

    Requires the measured mode to be isotropic (equal q/p variances, no q-p
    correlation); the remaining block is then
    ``kept - cross @ cross.T / (V_B + 1)`` with V_B the measured variance.
    """
    kept, cross, measured = _partition_at(cov, mode)
    aniso = max(abs(measured[0, 0] - measured[1, 1]), abs(measured[0, 1]))
    if aniso > 1e-9:
        raise UnsupportedCaseError(
            f"heterodyne conditioning needs an isotropic measured mode (deviation {aniso:.3e})"
        )
    v_b = 0.5 * (measured[0, 0] + measured[1, 1])
    out = kept - (cross @ cross.T) / (v_b + 1.0)
    return CovMatrix(0.5 * (out + out.T))


def condition_homodyne(cov: CovMatrix, mode: int, quad: Quadrature) -> CovMatrix:
    """State of the remaining modes after homodyning one quadrature of ``mode``.

    Only the measured-quadrature column of the cross correlations enters:
    ``kept - outer(c_q, c_q) / V_B(quad)``.
    """
    kept, cross, measured = _partition_at(cov, mode)
    k = quad.value
    v_b = measured[k, k]
    if v_b <= 1e-12:
        raise DomainError(f"measured quadrature variance {v_b:.3e} is not positive")
    col = cross[:, k : k + 1]
    out = kept - (col @ col.T) / v_b
    return CovMatrix(0.5 * (out + out.T))


def _binary_term(x: float) -> float:
    # x * log2(x) with the continuous limit 0 at x = 0
    return x * math.log2(x) if x > 0.0 else 0.0


def von_neumann_entropy(eigs: Iterable[float]) -> float:
    """Entropy in bits of a Gaussian state from its symplectic spectrum.

    Each eigenvalue contributes
    ``(nu+1)/2 * log2((nu+1)/2) - (nu-1)/2 * log2((nu-1)/2)``; the second
    term is dropped for nu - 1 < 1e-12 (continuous limit of x log x).
    Eigenvalues below 1 beyond rounding tolerance are rejected.
    """
    total = 0.0
    for nu in eigs:
        if nu < 1.0 - CLAMP_TOL:
            raise DomainError(f"symplectic eigenvalue {nu} is below 1")
        total += _binary_term((nu + 1.0) / 2.0)
        if nu - 1.0 >= 1e-12:
            total -= _binary_term((nu - 1.0) / 2.0)
    return total
