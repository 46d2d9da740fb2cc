"""Assembly of the quantum master equation generator.

The generator acts on a density matrix as

    drho/dt = -i [H + Lam, rho] + sum_c ( L_c rho L_c^dag - (1/2){L_c^dag L_c, rho} )

with, per noise channel (coupling operator X, bath g and f),

    L_mn   = 2 pi sqrt(gamma) g(E_n - E_m) X_mn      (eigenbasis elements)
    Lam_mn = sum_l f(E_l - E_m, E_n - E_l) X_ml X_ln

Superoperators use column stacking: vec(A rho B) = (B^T kron A) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bath import BathSpec, QuadratureSpec, f_table, jump_spectral
from .operators import (
    BohrDecomposition,
    EigenDecomposition,
    bohr_decompose,
    frobenius,
    hermitize,
    require_hermitian,
)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class NoiseChannel:
    """One bath attached to the system through a Hermitian coupling operator."""

    coupling_op: np.ndarray
    bath: BathSpec

    def __post_init__(self):
        object.__setattr__(self, "coupling_op",
                           require_hermitian(self.coupling_op, name="X"))


@dataclass(frozen=True)
class UleGenerator:
    """Hamiltonian, Lamb shift and jump operators of the master equation.

    `lamb_shift` is the zero matrix when the generator was built with the
    Lamb shift disabled.
    """

    hamiltonian: np.ndarray
    lamb_shift: np.ndarray
    jumps: list

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class Superoperator:
    """Dense matrix form of a generator on column-stacked states.

    When the generator's operator factors are known they are kept alongside
    the matrix so that time propagation can apply the generator with d x d
    matrix products instead of a d^2 x d^2 matrix-vector product. Both
    application paths represent the same linear map.
    """

    dim: int
    matrix: np.ndarray
    hamiltonian: np.ndarray | None = None
    jumps: list | None = None
    _jump_squares: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.jumps is not None and self._jump_squares is None:
            object.__setattr__(self, "_jump_squares",
                               [l.conj().T @ l for l in self.jumps])

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        """Generator action on a d x d matrix."""
        if self.hamiltonian is not None:
            h = self.hamiltonian
            out = -1j * (h @ rho - rho @ h)
            for l, ll in zip(self.jumps or [], self._jump_squares or []):
                out += l @ rho @ l.conj().T
                out -= 0.5 * (ll @ rho + rho @ ll)
            return out
        return unvec(self.matrix @ vec(rho), self.dim)

    def apply_vec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def trace_preservation_defect(self) -> float:
        """Max entry of <<I| applied to the matrix; zero for trace preservation."""
        row = vec(np.eye(self.dim)).conj() @ self.matrix
        return float(np.max(np.abs(row)))


def build_jump_operator(eig: EigenDecomposition, channel: NoiseChannel) -> np.ndarray:
    """Jump operator with eigenbasis elements 2 pi sqrt(gamma) g(E_n - E_m) X_mn.

    Built elementwise from the exact eigenvalue gaps (no binning needed) and
    rotated back to the input basis.
    """
    xe = eig.to_eigenbasis(channel.coupling_op)
    gaps = eig.energies[None, :] - eig.energies[:, None]
    le = 2.0 * np.pi * np.sqrt(channel.bath.coupling) * jump_spectral(channel.bath, gaps) * xe
    return eig.from_eigenbasis(le)


def jump_operator_bohr_sum(bohr: BohrDecomposition, bath: BathSpec) -> np.ndarray:
    """Jump operator as the Bohr sum 2 pi sqrt(gamma) sum_w g(w) A(w).

    Redundant second construction kept as a cross-check of
    :func:`build_jump_operator`.
    """
    g = jump_spectral(bath, bohr.frequencies)
    l = np.einsum("k,kmn->mn", g, bohr.components)
    return 2.0 * np.pi * np.sqrt(bath.coupling) * l


def lamb_shift_pairs(bohr: BohrDecomposition):
    """Distinct (E1, E2) bin-representative pairs occurring in the Lamb-shift sum.

    The triple sum over levels (m, l, n) only ever calls f at
    (E_l - E_m, E_n - E_l), i.e. at (bin[m, l], bin[l, n]).
    """
    k1 = bohr.bin_index[:, :, None]           # bin of E_l - E_m at [m, l, n]
    k2 = bohr.bin_index[None, :, :]           # bin of E_n - E_l at [m, l, n]
    flat = np.unique(k1 * bohr.nfreq + k2)
    freqs = bohr.frequencies
    return [(float(freqs[i // bohr.nfreq]), float(freqs[i % bohr.nfreq])) for i in flat]


def build_lamb_shift(eig: EigenDecomposition, channel: NoiseChannel,
                     quad: QuadratureSpec = QuadratureSpec(),
                     bohr: BohrDecomposition | None = None) -> np.ndarray:
    """Lamb-shift operator Lam_mn = sum_l f(E_l - E_m, E_n - E_l) X_ml X_ln.

    f is evaluated once per distinct binned gap pair (memoized table) and
    the triple sum is assembled from the cached values. Hermiticity follows
    from the swap symmetry f(E1, E2) = f(-E2, -E1) and is asserted.
    """
    if bohr is None:
        bohr = bohr_decompose(channel.coupling_op, eig)
    d = eig.dim
    if channel.bath.coupling == 0.0:
        return np.zeros((d, d), dtype=complex)
    table = f_table(channel.bath, lamb_shift_pairs(bohr), quad)
    fgrid = np.zeros((bohr.nfreq, bohr.nfreq))
    for (e1, e2), val in table.items():
        i = int(np.searchsorted(bohr.frequencies, e1))
        j = int(np.searchsorted(bohr.frequencies, e2))
        fgrid[i, j] = val
    coeff = fgrid[bohr.bin_index[:, :, None], bohr.bin_index[None, :, :]]
    xe = bohr.coupling_eigen
    lam_e = np.einsum("ml,ln,mln->mn", xe, xe, coeff)
    lam = eig.from_eigenbasis(lam_e)
    defect = frobenius(lam - lam.conj().T)
    if defect > 1e-8 * max(frobenius(lam), 1e-300):
        raise ValueError(f"Lamb shift failed Hermiticity check: {defect:.3e}")
    return hermitize(lam)


def lamb_shift_bohr_sum(bohr: BohrDecomposition, bath: BathSpec,
                        quad: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """Lamb shift as the double Bohr sum sum_{w1,w2} f(w1, w2) A(w1) A(w2).

    Independent construction used to cross-check :func:`build_lamb_shift`.
    """
    d = bohr.dim
    if bath.coupling == 0.0:
        return np.zeros((d, d), dtype=complex)
    table = f_table(bath, lamb_shift_pairs(bohr), quad)
    lam_e = np.zeros((d, d), dtype=complex)
    freqs = bohr.frequencies
    for i in range(bohr.nfreq):
        a_i = bohr.component_eigen(i)
        for j in range(bohr.nfreq):
            # eigenbasis components keep structural zeros exact, so every
            # surviving product pair is covered by the level triple sum
            prod = a_i @ bohr.component_eigen(j)
            if not np.any(prod):
                continue
            lam_e += table[(float(freqs[i]), float(freqs[j]))] * prod
    return bohr.eig.from_eigenbasis(lam_e)


def build_generator(eig: EigenDecomposition, channels,
                    quad: QuadratureSpec = QuadratureSpec(),
                    include_lamb_shift: bool = True) -> UleGenerator:
    """Assemble jump operators (and optionally the Lamb shift) for channels.

    With `include_lamb_shift` false the Lamb shift is the zero matrix and no
    quadrature runs.
    """
    if isinstance(channels, NoiseChannel):
        channels = [channels]
    h = eig.reconstruct()
    d = eig.dim
    lam = np.zeros((d, d), dtype=complex)
    jumps = []
    for ch in channels:
        jumps.append(build_jump_operator(eig, ch))
        if include_lamb_shift:
            lam = lam + build_lamb_shift(eig, ch, quad)
    return UleGenerator(hamiltonian=h, lamb_shift=lam, jumps=jumps)


def channels_compose(gens) -> UleGenerator:
    """Merge per-channel generators sharing a Hamiltonian.

    Jump lists concatenate and Lamb shifts add. Mismatched Hamiltonians are
    rejected.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    h = gens[0].hamiltonian
    scale = max(frobenius(h), 1.0)
    for g in gens[1:]:
        if g.hamiltonian.shape != h.shape or frobenius(g.hamiltonian - h) > 1e-12 * scale:
            raise ValueError("generators do not share the same Hamiltonian")
    lam = sum((g.lamb_shift for g in gens[1:]), start=gens[0].lamb_shift)
    jumps = [l for g in gens for l in g.jumps]
    return UleGenerator(hamiltonian=h, lamb_shift=lam, jumps=jumps)


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i [h, rho] on column-stacked states."""
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(jumps) -> np.ndarray:
    """Matrix of the Lindblad dissipator for the given jump operators."""
    d = jumps[0].shape[0] if jumps else 0
    out = None
    for l in jumps:
        eye = np.eye(d, dtype=complex)
        ll = l.conj().T @ l
        term = np.kron(l.conj(), l) - 0.5 * np.kron(eye, ll) - 0.5 * np.kron(ll.T, eye)
        out = term if out is None else out + term
    return out


def build_liouvillian(gen: UleGenerator, include_lamb_shift: bool = True) -> Superoperator:
    """Full superoperator of the master equation.

    `include_lamb_shift` selects H + Lam or the bare H as the coherent part;
    the generator's jump operators always enter the dissipator.
    """
    h_eff = gen.hamiltonian + gen.lamb_shift if include_lamb_shift else gen.hamiltonian
    h_eff = hermitize(h_eff)
    mat = hamiltonian_superop(h_eff)
    if gen.jumps:
        mat = mat + dissipator_superop(gen.jumps)
    sop = Superoperator(dim=gen.dim, matrix=mat, hamiltonian=h_eff, jumps=list(gen.jumps))
    defect = sop.trace_preservation_defect()
    scale = max(1.0, float(np.max(np.abs(mat))))
    if defect > 1e-10 * scale:
        raise ValueError(f"Liouvillian is not trace preserving: defect {defect:.3e}")
    return sop


def build_secular_generator(bohr: BohrDecomposition, channel: NoiseChannel,
                            quad: QuadratureSpec = QuadratureSpec(),
                            include_lamb_shift: bool = True) -> Superoperator:
    """Conventional (secular) generator obtained by keeping only matched
    Bohr-frequency pairs.

    Dissipator: sum_w (2 pi)^2 gamma g(w)^2 [ A(w) rho A(w)^dag
    - (1/2){A(w)^dag A(w), rho} ]; coherent part: H plus the secular Lamb
    shift sum_w f(w, -w) A(w) A(-w). The Gibbs state of H is stationary for
    this generator.
    """
    bath = channel.bath
    d = bohr.dim
    g = jump_spectral(bath, bohr.frequencies)
    jumps = [2.0 * np.pi * np.sqrt(bath.coupling) * g[k] * bohr.components[k]
             for k in range(bohr.nfreq)]
    h_eff = bohr.eig.reconstruct()
    if include_lamb_shift and bath.coupling > 0.0:
        pairs = [(float(w), float(-w)) for w in bohr.frequencies]
        table = f_table(bath, pairs, quad)
        lam = np.zeros((d, d), dtype=complex)
        for k, w in enumerate(bohr.frequencies):
            lam += table[(float(w), float(-w))] * (
                bohr.components[k] @ bohr.components[bohr.nfreq - 1 - k])
        h_eff = h_eff + hermitize(lam)
    mat = hamiltonian_superop(h_eff) + dissipator_superop(jumps)
    sop = Superoperator(dim=d, matrix=mat, hamiltonian=h_eff, jumps=jumps)
    defect = sop.trace_preservation_defect()
    scale = max(1.0, float(np.max(np.abs(mat))))
    if defect > 1e-10 * scale:
        raise ValueError(f"secular generator is not trace preserving: defect {defect:.3e}")
    return sop
