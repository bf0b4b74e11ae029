"""Parity-resolved diagonalization, gaps, and level-crossing detection.

The Hamiltonian commutes with the parity operator, so every eigenvector
carries a label +/-1.  Degenerate clusters are rotated to simultaneous parity
eigenvectors; crossings of adjacent levels are located by tracking the swap of
the energy-sorted parity labels along a coupling scan and refining with
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, NumericFailureError
from .operators import (
    HERMITICITY_TOL,
    ModelParams,
    assemble_hamiltonian,
    hermiticity_defect,
    parity_operator,
)

DEGENERACY_FRACTION = 1e-10    # cluster threshold, fraction of spectral span
PARITY_PURITY_TOL = 1e-8
GAP_CLOSURE_FRACTION = 1e-3    # crossing accepted when gap < this * omega0
BISECTION_DEPTH = 14


@dataclass
class EigenSystem:
    """Sorted eigenvalues, orthonormal eigenvectors, and parity labels.

    energies  ascending real eigenvalues
    states    eigenvector columns, states[:, n] belongs to energies[n]
    parities  +1/-1 labels from the parity expectation of each state
    """

    energies: np.ndarray
    states: np.ndarray
    parities: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.shape[0]


def diagonalize(h: np.ndarray, parity: np.ndarray) -> EigenSystem:
    """Diagonalize a Hermitian matrix and resolve parity labels.

    Within numerically degenerate clusters the eigenvectors are rotated to be
    simultaneous eigenvectors of the parity operator; every eigenvector phase
    is fixed so its largest-magnitude component is real positive.
    """
    h = np.asarray(h)
    parity = np.asarray(parity)
    if h.shape != parity.shape or h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidInputError(f"shape mismatch: h {h.shape}, parity {parity.shape}")
    if hermiticity_defect(h) >= HERMITICITY_TOL:
        raise InvalidInputError(
            f"matrix is not Hermitian within {HERMITICITY_TOL}: defect {hermiticity_defect(h):.3e}"
        )

    # Real-symmetric fast path: the model Hamiltonian has no complex entries.
    is_real = np.max(np.abs(h.imag)) < 1e-14 if np.iscomplexobj(h) else True
    work = h.real.copy() if is_real else h
    try:
        energies, states = np.linalg.eigh(work)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(f"eigensolver failed: {exc}") from None
    states = states.astype(complex)

    span = max(float(energies[-1] - energies[0]), 1.0)
    cluster_tol = DEGENERACY_FRACTION * span

    # Rotate each degenerate cluster to simultaneous parity eigenvectors.
    start = 0
    n = energies.shape[0]
    while start < n:
        stop = start + 1
        while stop < n and energies[stop] - energies[stop - 1] < cluster_tol:
            stop += 1
        if stop - start > 1:
            block = states[:, start:stop]
            sub = block.conj().T @ (parity @ block)
            sub = 0.5 * (sub + sub.conj().T)
            _, rot = np.linalg.eigh(sub)
            states[:, start:stop] = block @ rot
        start = stop

    # Fix the global phase of every column.
    for k in range(n):
        col = states[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        states[:, k] = col * (pivot.conj() / abs(pivot))

    pvals = np.real(np.einsum("ij,ij->j", states.conj(), parity @ states))
    if np.min(np.abs(pvals)) <= 1.0 - PARITY_PURITY_TOL:
        worst = int(np.argmin(np.abs(pvals)))
        raise NumericFailureError(
            f"state {worst} is not a parity eigenstate: <P> = {pvals[worst]:.12f}"
        )
    return EigenSystem(energies=energies, states=states, parities=np.sign(pvals))


def gaps(eigs: EigenSystem) -> np.ndarray:
    """Antisymmetric gap matrix: gaps[k, j] = E_k - E_j."""
    e = eigs.energies
    return e[:, None] - e[None, :]


def gc_analytic(p: ModelParams) -> Optional[float]:
    """First-order ground-state critical coupling, if finite.

    Returns None when the denominator u(1+r^2)/omega0 + 1 - r^2 is <= 0, in
    which case the ground level has no finite first-order crossing.
    """
    d = p.delta / p.omega0
    uu = p.u / p.omega0
    if abs(uu) >= 1.0:
        raise InvalidParameterError(f"|u| must be < omega0, got u={p.u}")
    denom = uu * (1.0 + p.r**2) + 1.0 - p.r**2
    if denom <= 0.0:
        return None
    return p.omega0 * math.sqrt(d * (1.0 - uu**2) / denom)


@dataclass
class CriticalPoints:
    """Detected level crossings along a coupling scan.

    gc_analytic        closed-form ground crossing, or None
    gc_numeric         refined ground crossing (value, half_width), or None
    excited_crossings  list of ((n, n+1), value, half_width) for tracked pairs
    """

    gc_analytic: Optional[float]
    gc_numeric: Optional[tuple[float, float]]
    excited_crossings: list = field(default_factory=list)

    def all_crossings(self) -> list:
        out = []
        if self.gc_numeric is not None:
            out.append(((0, 1), self.gc_numeric[0], self.gc_numeric[1]))
        out.extend(self.excited_crossings)
        return sorted(out, key=lambda item: item[1])


def _with_g(p: ModelParams, g: float) -> ModelParams:
    return replace(p, g=float(g))


def find_crossings(
    p: ModelParams,
    g_min: float,
    g_max: float,
    steps: int,
    levels: Sequence[tuple[int, int]] = ((0, 1), (1, 2), (2, 3)),
) -> CriticalPoints:
    """Scan the coupling axis and locate parity-swap level crossings.

    For each tracked adjacent pair (n, n+1) the scan looks for grid intervals
    where the parity label of level n changes; each detection is refined by
    bisection to a bracket of width (g_max - g_min)/2**14 and accepted when
    the pair gap at the refined point is below the closure threshold.  The
    closure test also rejects swaps of level n caused by a crossing of the
    pair below it.
    """
    if not g_min < g_max:
        raise InvalidParameterError(f"need g_min < g_max, got [{g_min}, {g_max}]")
    if steps < 8:
        raise InvalidParameterError(f"need steps >= 8, got {steps}")
    for lo, hi in levels:
        if hi != lo + 1 or lo < 0:
            raise InvalidParameterError(f"tracked pairs must be adjacent, got ({lo}, {hi})")

    parity = parity_operator(p.n_tr)
    max_level = max(hi for _, hi in levels)
    closure = GAP_CLOSURE_FRACTION * p.omega0
    grid = np.linspace(g_min, g_max, int(steps))

    def labels_at(g: float):
        eigs = diagonalize(assemble_hamiltonian(_with_g(p, g)), parity)
        return eigs.parities[: max_level + 1], eigs.energies[: max_level + 2]

    scan = [labels_at(g) for g in grid]

    found: dict[tuple[int, int], list[tuple[float, float]]] = {pair: [] for pair in levels}
    for i in range(len(grid) - 1):
        labels_lo, _ = scan[i]
        labels_hi, _ = scan[i + 1]
        for pair in levels:
            n = pair[0]
            if labels_lo[n] == labels_hi[n]:
                continue
            lo, hi = float(grid[i]), float(grid[i + 1])
            ref = labels_lo[n]
            for _ in range(BISECTION_DEPTH):
                mid = 0.5 * (lo + hi)
                labels_mid, _ = labels_at(mid)
                if labels_mid[n] == ref:
                    lo = mid
                else:
                    hi = mid
            center = 0.5 * (lo + hi)
            _, energies = labels_at(center)
            if energies[n + 1] - energies[n] < closure:
                found[pair].append((center, 0.5 * (hi - lo)))

    ground = found.get((0, 1), [])
    gc_numeric = ground[0] if ground else None
    excited = []
    for pair in levels:
        if pair == (0, 1):
            for extra in found[pair][1:]:
                excited.append((pair, extra[0], extra[1]))
            continue
        for value, half in found[pair]:
            excited.append((pair, value, half))
    excited.sort(key=lambda item: item[1])
    return CriticalPoints(
        gc_analytic=gc_analytic(p), gc_numeric=gc_numeric, excited_crossings=excited
    )


def truncation_report(
    p: ModelParams,
    observable: Callable[[ModelParams], float],
    delta_ntr: int = 40,
    tol: float = 1e-6,
) -> tuple[float, bool]:
    """Evaluate an observable at n_tr and n_tr + delta_ntr and compare.

    Returns the value at the requested truncation and a convergence flag:
    relative agreement within tol, or absolute agreement when the values are
    below 1e-6 in magnitude.
    """
    if delta_ntr < 10:
        raise InvalidParameterError(f"delta_ntr must be >= 10, got {delta_ntr}")
    v1 = float(observable(p))
    v2 = float(observable(p.with_n_tr(p.n_tr + delta_ntr)))
    scale = max(abs(v1), abs(v2))
    if scale < 1e-6:
        converged = abs(v2 - v1) < tol
    else:
        converged = abs(v2 - v1) / scale < tol
    return v1, converged
