"""
Eigenvalue spectra of symmetric correlation matrices by cyclic Jacobi rotations.

Each sweep visits every off-diagonal pair once using the round-robin
(tournament) ordering: a sweep is split into steps of disjoint pairs, and all
rotations in a step are applied together as one orthogonal similarity
transform. Stacks of matrices are processed in a single batch, which is how
the monthly pipeline runs a whole panel through the solver at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from plungekit.corrnet import CorrelationMatrix
from plungekit.errors import InputError, NumericalError

OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: tuple[float, ...]  # descending
    iterations: int

    @property
    def lecm(self) -> float:
        return self.eigenvalues[0]

    @property
    def second(self) -> float | None:
        return self.eigenvalues[1] if len(self.eigenvalues) > 1 else None

    @property
    def third(self) -> float | None:
        return self.eigenvalues[2] if len(self.eigenvalues) > 2 else None


@dataclass(frozen=True)
class SpectrumRow:
    month: object
    lecm: float
    second: float | None
    third: float | None
    flagged: bool


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Steps of disjoint (p, q) pairs, p < q, jointly covering every pair once."""
    m = n + (n % 2)
    players = list(range(m))
    steps = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = zip(*pairs)
            steps.append((np.array(p), np.array(q)))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(steps)


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    off = a * (1.0 - np.eye(a.shape[-1]))
    return np.sqrt(np.sum(off * off, axis=(-2, -1)))


def _rotate_step(a: np.ndarray, p: np.ndarray, q: np.ndarray, eye: np.ndarray) -> np.ndarray:
    apq = a[:, p, q]
    diff = a[:, q, q] - a[:, p, p]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = diff / (2.0 * apq)
        # theta = +-inf (apq == 0 or negligible) gives t = 0; 0/0 is masked below
        t = np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0))
    t[apq == 0] = 0.0
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    rot = eye.repeat(a.shape[0], axis=0)
    rot[:, p, p] = c
    rot[:, q, q] = c
    rot[:, p, q] = s
    rot[:, q, p] = -s
    a = np.swapaxes(rot, 1, 2) @ a @ rot
    a[:, p, q] = 0.0
    a[:, q, p] = 0.0
    return a


def jacobi_eigenvalues(stack, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues of a stack of symmetric matrices.

    Returns ``(eigenvalues, sweeps)`` where ``eigenvalues`` has shape
    ``(B, N)`` sorted descending per row and ``sweeps`` holds the number of
    full sweeps each matrix needed to bring its off-diagonal Frobenius norm
    under ``tol``.

    Raises NumericalError if any matrix is still above ``tol`` after
    ``max_sweeps`` sweeps.
    """
    a = np.array(stack, dtype=float)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise InputError(f"expected a stack of square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix contains non-finite entries")
    asym = np.max(np.abs(a - np.swapaxes(a, 1, 2))) if a.size else 0.0
    if asym > SYMMETRY_TOL:
        raise InputError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    a = (a + np.swapaxes(a, 1, 2)) * 0.5

    b, n, _ = a.shape
    sweeps = np.zeros(b, dtype=int)
    steps = _round_robin(n)
    eye = np.eye(n)[None]
    active = np.flatnonzero(_offdiag_norm(a) >= tol)
    for sweep in range(1, max_sweeps + 1):
        if active.size == 0:
            break
        sub = a[active]
        for p, q in steps:
            sub = _rotate_step(sub, p, q, eye)
        sub = (sub + np.swapaxes(sub, 1, 2)) * 0.5
        a[active] = sub
        sweeps[active] = sweep
        active = active[_offdiag_norm(sub) >= tol]
    if active.size:
        raise NumericalError(f"Jacobi solver did not converge in {max_sweeps} sweeps")

    eig = np.sort(np.einsum("...ii->...i", a), axis=1)[:, ::-1]
    return eig, sweeps


def eigen_spectrum(c: CorrelationMatrix | np.ndarray) -> SpectrumResult:
    values = c.values if isinstance(c, CorrelationMatrix) else np.asarray(c, dtype=float)
    if values.ndim != 2 or values.shape[0] < 1:
        raise InputError("eigen_spectrum needs a non-empty square matrix")
    eig, sweeps = jacobi_eigenvalues(values)
    return SpectrumResult(tuple(eig[0].tolist()), int(sweeps[0]))


def spectrum_series(metrics) -> list[SpectrumRow]:
    """LECM, second and third eigenvalue per month, chronologically."""
    rows = [
        SpectrumRow(m.month, m.spectrum.lecm, m.spectrum.second, m.spectrum.third, m.degenerate)
        for m in metrics
    ]
    return sorted(rows, key=lambda r: r.month)
