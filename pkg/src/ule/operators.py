"""Dense Hermitian operator algebra for finite open quantum systems.

Everything here works on plain complex numpy arrays. The structured results
(eigendecompositions, Bohr-frequency decompositions) are small frozen
dataclasses holding arrays that must not be mutated after construction.

Conventions: hbar = k_B = 1, energies in units of the global exchange scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def frobenius(a) -> float:
    """Frobenius norm of a matrix."""
    return float(np.linalg.norm(np.asarray(a)))


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a^dagger)/2."""
    return 0.5 * (a + a.conj().T)


def max_asymmetry(a: np.ndarray) -> float:
    """Largest entrywise deviation from Hermiticity, |a - a^dagger|_max."""
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def require_hermitian(a, tol: float = 1e-12, name: str = "operator") -> np.ndarray:
    """Validate that `a` is a square Hermitian matrix.

    The asymmetry tolerance is relative to the largest entry magnitude.
    Returns the array as complex128 (no copy if already suitable).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    asym = max_asymmetry(a)
    if asym > tol * max(scale, 1.0):
        raise ValueError(
            f"{name} is not Hermitian: max asymmetry {asym:.3e} "
            f"exceeds {tol:.1e} * max|entry| = {tol * max(scale, 1.0):.3e}"
        )
    return a


def require_density_matrix(rho, herm_tol: float = 1e-12, trace_tol: float = 1e-10,
                           eig_floor: float = -1e-10, name: str = "rho") -> np.ndarray:
    """Validate Hermiticity, unit trace and positive semidefiniteness of a state."""
    rho = require_hermitian(rho, tol=herm_tol, name=name)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"{name} has trace {tr}, expected 1 within {trace_tol:.1e}")
    wmin = float(np.linalg.eigvalsh(hermitize(rho))[0])
    if wmin < eig_floor:
        raise ValueError(f"{name} has minimum eigenvalue {wmin:.3e} below {eig_floor:.1e}")
    return rho


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian operator.

    energies : (d,) ascending eigenvalues E_m
    basis    : (d, d) unitary whose columns are the eigenvectors |m>
    """

    energies: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size

    def projector(self, m: int) -> np.ndarray:
        """Rank-one projector |m><m| in the original basis."""
        v = self.basis[:, m]
        return np.outer(v, v.conj())

    def to_eigenbasis(self, a: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ a @ self.basis

    def from_eigenbasis(self, a: np.ndarray) -> np.ndarray:
        return self.basis @ a @ self.basis.conj().T

    def reconstruct(self) -> np.ndarray:
        """Sum_m E_m |m><m|, which must reproduce the source operator."""
        return (self.basis * self.energies) @ self.basis.conj().T


def eigendecompose(h, tol: float = 1e-12) -> EigenDecomposition:
    """Eigendecompose a Hermitian matrix with a fixed phase convention.

    Each eigenvector is rephased so its largest-magnitude component is real
    and positive (ties broken by lowest row index, which is what argmax
    does). This makes every downstream matrix reproducible run to run.

    Raises ValueError for non-Hermitian input, reporting the max asymmetry.
    """
    h = require_hermitian(h, tol=tol, name="H")
    energies, basis = np.linalg.eigh(h)
    basis = np.array(basis, dtype=complex)
    for m in range(energies.size):
        v = basis[:, m]
        j = int(np.argmax(np.abs(v)))
        piv = v[j]
        basis[:, m] = v * (piv.conjugate() / abs(piv))
    eig = EigenDecomposition(energies=energies, basis=basis)

    d = eig.dim
    unit = np.max(np.abs(basis.conj().T @ basis - np.eye(d)))
    if unit > 1e-10:
        raise ValueError(f"eigenbasis failed unitarity check: {unit:.3e}")
    hnorm = frobenius(h)
    rec = frobenius(eig.reconstruct() - h)
    if rec > 1e-10 * max(hnorm, 1.0):
        raise ValueError(f"eigendecomposition failed reconstruction check: {rec:.3e}")
    return eig


@dataclass(frozen=True)
class BohrDecomposition:
    """Decomposition of a coupling operator over Bohr frequencies.

    The operator X is split as X = sum_w A(w) where A(w) collects the
    matrix elements <m|X|n> between eigenstates separated by E_n - E_m = w,
    after binning the d^2 raw gaps with tolerance `gap_tolerance`.

    frequencies     : (K,) sorted bin representatives, exactly symmetric
                      under negation
    components      : (K, d, d) stack, components[k] = A(frequencies[k]) in
                      the original basis
    gap_tolerance   : the binning width used
    eig             : the eigensystem the decomposition refers to
    coupling_eigen  : X in the eigenbasis (Hermitized)
    bin_index       : (d, d) int array, bin_index[m, n] = bin k such that
                      E_n - E_m belongs to frequencies[k]

    Frequencies whose component vanishes identically are dropped (always in
    +/- pairs, so the symmetry invariants survive). bin_index entries of
    dropped bins point at an arbitrary kept bin; every coupling element
    under them is exactly zero, so coefficient lookups through bin_index
    stay correct.
    """

    frequencies: np.ndarray
    components: np.ndarray
    gap_tolerance: float
    eig: EigenDecomposition
    coupling_eigen: np.ndarray
    bin_index: np.ndarray

    @property
    def dim(self) -> int:
        return self.eig.dim

    @property
    def nfreq(self) -> int:
        return self.frequencies.size

    def component(self, w: float) -> np.ndarray:
        """A(w) for a frequency that is exactly one of the representatives."""
        k = int(np.searchsorted(self.frequencies, w))
        if k >= self.nfreq or self.frequencies[k] != w:
            raise KeyError(f"{w} is not a Bohr frequency of this decomposition")
        return self.components[k]

    def component_eigen(self, k: int) -> np.ndarray:
        """A(frequencies[k]) expressed in the eigenbasis (masked X)."""
        return np.where(self.bin_index == k, self.coupling_eigen, 0.0)

    def frequency_sum(self) -> np.ndarray:
        return self.components.sum(axis=0)


def _cluster_gaps(values: np.ndarray, eps: float):
    """Single-linkage 1-d clustering: split sorted values where the step
    between neighbours exceeds eps. Returns (labels into sorted-cluster
    order, representatives). Rejects chained clusters wider than eps.
    """
    order = np.argsort(values, kind="stable")
    sv = values[order]
    boundaries = np.nonzero(np.diff(sv) > eps)[0]
    starts = np.concatenate(([0], boundaries + 1))
    ends = np.concatenate((boundaries + 1, [sv.size]))
    labels = np.empty(values.size, dtype=np.intp)
    reps = np.empty(starts.size)
    for k, (i0, i1) in enumerate(zip(starts, ends)):
        spread = sv[i1 - 1] - sv[i0]
        if spread > eps:
            raise ValueError(
                f"ambiguous gap binning: cluster spread {spread:.3e} exceeds "
                f"gap tolerance {eps:.3e}; distinct Bohr gaps are closer than "
                "the requested tolerance"
            )
        labels[order[i0:i1]] = k
        reps[k] = sv[i0:i1].mean()
    return labels, reps


def bohr_decompose(x, eig: EigenDecomposition, gap_tolerance: float | None = None) -> BohrDecomposition:
    """Split a Hermitian coupling operator over the Bohr frequencies of `eig`.

    A(w) = sum over pairs (m, n) with E_n - E_m = w of |m><m| X |n><n|.
    Gaps are binned by single-linkage clustering with width `gap_tolerance`
    (default 1e-9 * max(1, |H| scale)); the representative frequency of each
    bin is the mean of its members, symmetrized so that the frequency list
    is exactly closed under negation and A(-w) = A(w)^dagger to rounding.
    """
    x = require_hermitian(x, name="X")
    d = eig.dim
    if x.shape[0] != d:
        raise ValueError(f"X has dim {x.shape[0]} but eigensystem has dim {d}")
    if gap_tolerance is None:
        scale = float(np.max(np.abs(eig.energies))) if d else 0.0
        gap_tolerance = 1e-9 * max(1.0, scale)
    if not gap_tolerance > 0:
        raise ValueError("gap_tolerance must be positive")

    energies = eig.energies
    gaps = (energies[None, :] - energies[:, None]).ravel()  # [m, n] -> E_n - E_m
    labels, reps = _cluster_gaps(gaps, gap_tolerance)
    bin_index = labels.reshape(d, d)

    # The raw gap multiset is exactly symmetric under negation, so the sorted
    # clusters mirror pairwise; enforce exact antisymmetry of representatives.
    reps = 0.5 * (reps - reps[::-1])

    xe = hermitize(eig.to_eigenbasis(x))
    keep = np.array([np.any(np.where(bin_index == k, xe, 0.0)) for k in range(reps.size)])
    if not keep.any():
        keep[int(np.argmin(np.abs(reps)))] = True  # X = 0: keep the zero bin
    new_of_old = np.zeros(reps.size, dtype=np.intp)  # dropped bins park at new index 0
    new_of_old[keep] = np.arange(int(keep.sum()))
    bin_index = new_of_old[bin_index]
    reps = reps[keep]

    comps = np.zeros((reps.size, d, d), dtype=complex)
    for k in range(reps.size):
        # entries inherited from dropped bins are exactly zero in xe
        masked = np.where(bin_index == k, xe, 0.0)
        comps[k] = eig.from_eigenbasis(masked)

    dec = BohrDecomposition(
        frequencies=reps,
        components=comps,
        gap_tolerance=float(gap_tolerance),
        eig=eig,
        coupling_eigen=xe,
        bin_index=bin_index,
    )

    xnorm = max(frobenius(x), 1.0)
    if frobenius(dec.frequency_sum() - x) > 1e-12 * xnorm:
        raise ValueError("Bohr components do not sum back to X")
    for k in range(reps.size):
        if frobenius(comps[reps.size - 1 - k] - comps[k].conj().T) > 1e-12 * xnorm:
            raise ValueError("A(-w) != A(w)^dagger beyond tolerance")
    return dec


def gibbs_state(eig: EigenDecomposition, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H)/Z of the eigensystem's operator.

    Populations are computed from energies shifted by the ground energy, so
    arbitrarily large beta is safe (the state limits to the ground
    projector).
    """
    if not (beta >= 0 and np.isfinite(beta)):
        raise ValueError(f"beta must be finite and non-negative, got {beta}")
    w = np.exp(-beta * (eig.energies - eig.energies[0]))
    p = w / w.sum()
    return (eig.basis * p) @ eig.basis.conj().T


def gibbs_populations(eig: EigenDecomposition, beta: float) -> np.ndarray:
    """Eigenbasis populations of the Gibbs state (same shift convention)."""
    if not (beta >= 0 and np.isfinite(beta)):
        raise ValueError(f"beta must be finite and non-negative, got {beta}")
    w = np.exp(-beta * (eig.energies - eig.energies[0]))
    return w / w.sum()


def thermal_shift_residual(rho_th: np.ndarray, a: np.ndarray, w: float, beta: float) -> float:
    """Frobenius norm of rho_th A(w) - e^(beta w) A(w) rho_th.

    Vanishes (to rounding) when A(w) is an exact Bohr component of the
    Hamiltonian that generated rho_th.
    """
    return frobenius(rho_th @ a - np.exp(beta * w) * (a @ rho_th))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2) * trace norm of rho - sigma."""
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(rho - sigma)))))
