"""Gibbs-state stationarity diagnostics.

The dissipator and Lamb-shift commutator applied to the thermal state admit
closed Bohr-sum forms,

    D[rho_th] = -2 pi^2 gamma sum_{w1,w2} (1 - e^(beta (w2-w1)/2))^2
                 g(w1) g(w2) A(w1)^dag A(w2) rho_th,

    [Lam, rho_th] = sum_{w1,w2} f(w1, w2) (1 - e^(beta (w1+w2)))
                     A(w1) A(w2) rho_th,

derived from the thermal shift identity rho_th A(w) = e^(beta w) A(w) rho_th
and the detailed-balance relation g(-w) = e^(-beta w/2) g(w). Both are
evaluated here independently of the direct generator application, so the
pair of routes cross-validates the generator, the Bohr decomposition and
the bath. Restricting the double sums to matched frequencies (w1 = w2,
respectively w1 = -w2) kills both expressions identically, which is the
conventional-Lindblad limit where the Gibbs state is stationary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bath import BathSpec, QuadratureSpec, f_table, jump_spectral
from .dynamics import SteadyStateError, expectation, steady_state
from .generator import (
    NoiseChannel,
    build_generator,
    build_jump_operator,
    build_lamb_shift,
    build_liouvillian,
    lamb_shift_pairs,
)
from .operators import (
    BohrDecomposition,
    EigenDecomposition,
    bohr_decompose,
    eigendecompose,
    frobenius,
    gibbs_populations,
    gibbs_state,
    trace_distance,
)


@dataclass(frozen=True)
class ResidualReport:
    """Frobenius norms of the Gibbs-state residuals, in units of gamma.

    The direct/formula pairs must agree within the recorded tolerances; the
    secular norms must vanish at rounding scale.
    """

    dissipator_direct_norm: float
    dissipator_formula_norm: float
    dissipator_mismatch: float
    dissipator_mismatch_tol: float
    lambshift_direct_norm: float
    lambshift_formula_norm: float
    lambshift_mismatch: float
    lambshift_mismatch_tol: float
    secular_dissipator_norm: float
    secular_lambshift_norm: float
    gamma: float

    def rows(self):
        """(quantity, norm) pairs for tabular output."""
        return [
            ("dissipator_direct_norm", self.dissipator_direct_norm),
            ("dissipator_formula_norm", self.dissipator_formula_norm),
            ("dissipator_mismatch", self.dissipator_mismatch),
            ("lambshift_direct_norm", self.lambshift_direct_norm),
            ("lambshift_formula_norm", self.lambshift_formula_norm),
            ("lambshift_mismatch", self.lambshift_mismatch),
            ("secular_dissipator_norm", self.secular_dissipator_norm),
            ("secular_lambshift_norm", self.secular_lambshift_norm),
        ]


@dataclass(frozen=True)
class DeviationReport:
    """Level-resolved comparison of a steady state against the Gibbs state.

    Deviations are carried both absolutely and relative to the thermal
    population of each level: the relative columns expose the structure
    where the ground level stays close while sparsely occupied levels
    deviate by large factors.
    """

    energies: np.ndarray
    diag_steady: np.ndarray
    diag_thermal: np.ndarray
    max_abs_diag_deviation: float
    max_rel_diag_deviation: float
    trace_distance: float
    rho11_gap: float
    rho11_rel_gap: float
    observable_gap: float | None = None

    def rows(self):
        """(n, E_n, rho_nn, rho_nn_th) rows, n starting at 1."""
        return [(n + 1, self.energies[n], self.diag_steady[n], self.diag_thermal[n])
                for n in range(self.energies.size)]


def dissipator_on_gibbs_direct(jump_op, rho_th) -> np.ndarray:
    """L rho_th L^dag - (1/2){L^dag L, rho_th} exactly as in the generator."""
    ld = jump_op.conj().T
    ldl = ld @ jump_op
    return jump_op @ rho_th @ ld - 0.5 * (ldl @ rho_th + rho_th @ ldl)


def _coeff3(grid, bohr, first_transposed: bool):
    """Level-resolved coefficient tensor for a Bohr-frequency double sum.

    With first_transposed, entry [m, l, n] = grid[bin(E_m - E_l), bin(E_n - E_l)]
    (the A^dag A product ordering); otherwise grid[bin(E_l - E_m), bin(E_n - E_l)]
    (the A A ordering).
    """
    bi = bohr.bin_index
    k1 = bi.T[:, :, None] if first_transposed else bi[:, :, None]
    return grid[k1, bi[None, :, :]]


def dissipator_on_gibbs_formula(bohr: BohrDecomposition, bath: BathSpec,
                                beta: float, rho_th) -> np.ndarray:
    """Bohr-sum form of the dissipator applied to the Gibbs state.

    The double frequency sum is evaluated levelwise: the (w1, w2) term
    coefficient is looked up per eigenbasis element of A(w1)^dag A(w2).
    """
    w = bohr.frequencies
    g = jump_spectral(bath, w)
    kms = np.exp(0.5 * beta * (w[None, :] - w[:, None]))
    grid = -2.0 * np.pi**2 * bath.coupling * (1.0 - kms) ** 2 * np.outer(g, g)
    xe = bohr.coupling_eigen
    coeff = _coeff3(grid, bohr, first_transposed=True)
    s_e = np.einsum("lm,ln,mln->mn", xe.conj(), xe, coeff)
    s = bohr.eig.from_eigenbasis(s_e)
    return s @ rho_th


def lambshift_on_gibbs_direct(lamb_shift, rho_th) -> np.ndarray:
    """Commutator [Lam, rho_th]."""
    return lamb_shift @ rho_th - rho_th @ lamb_shift


def lambshift_on_gibbs_formula(bohr: BohrDecomposition, bath: BathSpec,
                               quad: QuadratureSpec, beta: float, rho_th) -> np.ndarray:
    """Bohr-sum form of the Lamb-shift commutator on the Gibbs state."""
    w = bohr.frequencies
    nf = w.size
    table = f_table(bath, lamb_shift_pairs(bohr), quad)
    fgrid = np.zeros((nf, nf))
    for (e1, e2), val in table.items():
        i = int(np.searchsorted(w, e1))
        j = int(np.searchsorted(w, e2))
        fgrid[i, j] = val
    grid = fgrid * (1.0 - np.exp(beta * (w[:, None] + w[None, :])))
    xe = bohr.coupling_eigen
    coeff = _coeff3(grid, bohr, first_transposed=False)
    s_e = np.einsum("ml,ln,mln->mn", xe, xe, coeff)
    s = bohr.eig.from_eigenbasis(s_e)
    return s @ rho_th


def secular_residuals(bohr: BohrDecomposition, bath: BathSpec,
                      quad: QuadratureSpec, beta: float, rho_th):
    """Norms of the matched-frequency restrictions of both residual sums.

    The w1 = w2 restriction of the dissipator sum carries the factor
    (1 - e^0)^2 and the w1 = -w2 restriction of the Lamb-shift sum the
    factor (1 - e^0); both vanish identically, including at large beta
    where the unmatched terms would grow exponentially. Returned as
    (dissipator_norm, lambshift_norm) for the numerical assertion.
    """
    w = bohr.frequencies
    nf = w.size
    g = jump_spectral(bath, w)
    xe = bohr.coupling_eigen

    diag_grid = np.zeros((nf, nf))
    idx = np.arange(nf)
    diag_grid[idx, idx] = (-2.0 * np.pi**2 * bath.coupling
                           * (1.0 - np.exp(0.5 * beta * (w - w))) ** 2 * g * g)
    coeff = _coeff3(diag_grid, bohr, first_transposed=True)
    r8 = bohr.eig.from_eigenbasis(
        np.einsum("lm,ln,mln->mn", xe.conj(), xe, coeff)) @ rho_th

    pairs = [(float(v), float(-v)) for v in w]
    table = f_table(bath, pairs, quad) if bath.coupling > 0 else {p: 0.0 for p in pairs}
    anti_grid = np.zeros((nf, nf))
    for k, v in enumerate(w):
        anti_grid[k, nf - 1 - k] = table[(float(v), float(-v))] * (
            1.0 - np.exp(beta * (v + w[nf - 1 - k])))
    coeff = _coeff3(anti_grid, bohr, first_transposed=False)
    r9 = bohr.eig.from_eigenbasis(
        np.einsum("ml,ln,mln->mn", xe, xe, coeff)) @ rho_th
    return frobenius(r8), frobenius(r9)


def gibbs_residual_report(eig: EigenDecomposition, channel: NoiseChannel,
                          quad: QuadratureSpec = QuadratureSpec(),
                          include_lamb_shift: bool = True,
                          bohr: BohrDecomposition | None = None) -> ResidualReport:
    """Evaluate all Gibbs residuals for one channel by both routes.

    Norms are reported in units of gamma so baselines compare across
    couplings. With include_lamb_shift false the Lamb-shift entries are
    zero and no quadrature runs for them.
    """
    bath = channel.bath
    beta = bath.beta
    if bohr is None:
        bohr = bohr_decompose(channel.coupling_op, eig)
    rho_th = gibbs_state(eig, beta)
    unit = bath.coupling if bath.coupling > 0 else 1.0

    jump = build_jump_operator(eig, channel)
    d_direct = dissipator_on_gibbs_direct(jump, rho_th)
    d_formula = dissipator_on_gibbs_formula(bohr, bath, beta, rho_th)
    d_mismatch = frobenius(d_direct - d_formula)

    if include_lamb_shift and bath.coupling > 0:
        lam = build_lamb_shift(eig, channel, quad, bohr=bohr)
        l_direct = lambshift_on_gibbs_direct(lam, rho_th)
        l_formula = lambshift_on_gibbs_formula(bohr, bath, quad, beta, rho_th)
        l_mismatch = frobenius(l_direct - l_formula)
        l_direct_norm = frobenius(l_direct)
        l_formula_norm = frobenius(l_formula)
        l_tol = 1e-6 * max(l_direct_norm, 1e-300)
    else:
        l_direct_norm = l_formula_norm = l_mismatch = 0.0
        l_tol = 0.0

    r8, r9 = secular_residuals(bohr, bath, quad, beta, rho_th)

    return ResidualReport(
        dissipator_direct_norm=frobenius(d_direct) / unit,
        dissipator_formula_norm=frobenius(d_formula) / unit,
        dissipator_mismatch=d_mismatch / unit,
        dissipator_mismatch_tol=1e-10 * frobenius(d_direct) / unit,
        lambshift_direct_norm=l_direct_norm / unit,
        lambshift_formula_norm=l_formula_norm / unit,
        lambshift_mismatch=l_mismatch / unit,
        lambshift_mismatch_tol=l_tol / unit,
        secular_dissipator_norm=r8 / unit,
        secular_lambshift_norm=r9 / unit,
        gamma=bath.coupling,
    )


def gibbs_deviation(rho_ss, eig: EigenDecomposition, beta: float,
                    observable=None, rel_floor: float = 1e-300) -> DeviationReport:
    """Compare a steady state against the Gibbs state of the eigensystem.

    Diagonals are taken in the energy eigenbasis. rho11 refers to the
    lowest-energy level. When `observable` is given the report includes
    |<O>_ss - <O>_th|.
    """
    p_th = gibbs_populations(eig, beta)
    rho_e = eig.to_eigenbasis(rho_ss)
    diag = np.real(np.diagonal(rho_e)).copy()
    for name, vals in (("steady", diag), ("thermal", p_th)):
        if abs(vals.sum() - 1.0) > 1e-10:
            raise ValueError(f"{name} diagonals sum to {vals.sum()}, not 1")
    dev = np.abs(diag - p_th)
    rel = dev / np.maximum(p_th, rel_floor)
    rho_th = gibbs_state(eig, beta)
    obs_gap = None
    if observable is not None:
        obs_gap = abs(expectation(rho_ss, observable) - expectation(rho_th, observable))
    return DeviationReport(
        energies=eig.energies.copy(),
        diag_steady=diag,
        diag_thermal=p_th,
        max_abs_diag_deviation=float(dev.max()),
        max_rel_diag_deviation=float(rel.max()),
        trace_distance=trace_distance(rho_ss, rho_th),
        rho11_gap=float(dev[0]),
        rho11_rel_gap=float(rel[0]),
        observable_gap=obs_gap,
    )


@dataclass(frozen=True)
class TrendSystem:
    """Fixed Hamiltonian and coupling swept over bath parameters."""

    hamiltonian: np.ndarray
    coupling_op: np.ndarray
    cutoff: float = 100.0
    include_lamb_shift: bool = False
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    observable: np.ndarray | None = None


@dataclass(frozen=True)
class SweepResult:
    temperatures: list
    couplings: list
    cells: dict          # (T, gamma) -> DeviationReport
    errors: dict         # (T, gamma) -> str


def three_level_baseline() -> TrendSystem:
    """Reference system for residual and trend baselines.

    Three levels at energies (0, 1, 3) with an all-ones coupling operator:
    every Bohr frequency pair carries a nonzero cross term, so the Gibbs
    residuals are manifestly nonzero and the steady state is unique.
    """
    h = np.diag([0.0, 1.0, 3.0]).astype(complex)
    x = np.ones((3, 3), dtype=complex)
    return TrendSystem(hamiltonian=h, coupling_op=x)


def trend_sweep(system: TrendSystem, temperatures, couplings) -> SweepResult:
    """Steady-state Gibbs deviation over a (temperature, coupling) grid.

    Failing cells are recorded and the sweep continues.
    """
    temperatures = [float(t) for t in temperatures]
    couplings = [float(g) for g in couplings]
    if not temperatures or not couplings:
        raise ValueError("temperature and coupling lists must be non-empty")
    if min(temperatures) <= 0 or min(couplings) <= 0:
        raise ValueError("sweep values must be positive")
    eig = eigendecompose(system.hamiltonian)
    cells: dict = {}
    errors: dict = {}
    for t in temperatures:
        for gam in couplings:
            bath = BathSpec(temperature=t, coupling=gam, cutoff=system.cutoff)
            channel = NoiseChannel(coupling_op=system.coupling_op, bath=bath)
            try:
                gen = build_generator(eig, channel, system.quad,
                                      include_lamb_shift=system.include_lamb_shift)
                sop = build_liouvillian(gen, include_lamb_shift=system.include_lamb_shift)
                rho_ss = steady_state(sop).state
                cells[(t, gam)] = gibbs_deviation(rho_ss, eig, bath.beta,
                                                  observable=system.observable)
            except (SteadyStateError, ValueError, RuntimeError) as exc:
                errors[(t, gam)] = str(exc)
    return SweepResult(temperatures=temperatures, couplings=couplings,
                       cells=cells, errors=errors)


def sweep_monotonicity(result: SweepResult, tol: float = 1e-10):
    """Soft monotonicity of trace distance along both sweep axes.

    Trace distance should not increase with temperature (per coupling) nor
    with decreasing coupling (per temperature). Ties and sub-tolerance
    inversions are not violations; at most one is allowed per line. Returns
    (ok, violations) where violations lists the offending line descriptions.
    """
    violations = []

    def check(line, label):
        vals = [line[i] for i in range(len(line))]
        hard = sum(1 for a, b in zip(vals, vals[1:]) if b > a + tol)
        soft = sum(1 for a, b in zip(vals, vals[1:]) if a < b <= a + tol)
        if hard > 0 or soft > 1:
            violations.append(f"{label}: {vals}")

    couplings_desc = sorted(result.couplings, reverse=True)
    temps_asc = sorted(result.temperatures)
    for gam in result.couplings:
        line = [result.cells[(t, gam)].trace_distance
                for t in temps_asc if (t, gam) in result.cells]
        check(line, f"coupling {gam}, increasing temperature")
    for t in result.temperatures:
        line = [result.cells[(t, gam)].trace_distance
                for gam in couplings_desc if (t, gam) in result.cells]
        check(line, f"temperature {t}, decreasing coupling")
    return (not violations), violations
