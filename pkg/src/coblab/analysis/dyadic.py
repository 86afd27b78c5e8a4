"""The functional equation f(t) = g(t) - g(bt) in Fourier coefficients.

The Koopman operator of t -> bt sends mode n to mode bn, so it acts on
the chains {m b^k : k >= 0}, m not divisible by b, independently. Along
one chain the solution is the running sum
g(m b^k) = f(m) + f(m b) + ... + f(m b^k), which is finitely supported
exactly when the whole chain sums to zero.
"""

import logging
import math
from typing import Dict, List, Tuple

import numpy as np
import scipy.special

from coblab.constructs.common import DEFAULT_TOLERANCES, Tolerances
from coblab.constructs.operators import DoublingKoopman
from coblab.constructs.results import (
    BlockEnergyProfile,
    ChainVerdict,
    ConditionReport,
    FourierSeries,
    Obstruction,
)
from coblab.constructs.vectors import CoeffVector
from coblab.core import ErgodicAccumulator, norm_squared
from coblab.analysis.solver import (
    DEFAULT_HORIZON,
    condition_report,
    summability,
    verify_coboundary,
)

logger = logging.getLogger(__name__)


def koopman(f: FourierSeries) -> DoublingKoopman:
    return DoublingKoopman(base=f.base)


def val2(n: int, base: int = 2) -> int:
    """Largest k such that base^k divides n."""
    if n == 0:
        raise ValueError("the valuation of 0 is undefined")
    if base < 2:
        raise ValueError("base must be at least 2")
    n, k = abs(n), 0
    while n % base == 0:
        n //= base
        k += 1
    return k


def chain_root(mode: int, base: int = 2) -> Tuple[int, int]:
    """Split a mode as (m, k) with mode = m * base^k, m not divisible by base."""
    k = val2(mode, base)
    return mode // base**k, k


def _chains(coeffs: CoeffVector, base: int) -> Dict[int, Dict[int, complex]]:
    chains: Dict[int, Dict[int, complex]] = {}
    for mode, c in coeffs.entries.items():
        root, k = chain_root(mode, base)
        chains.setdefault(root, {})[k] = c
    return chains


def chain_solve(
    f: FourierSeries, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> ChainVerdict:
    """Solve f = g - Tg chain by chain.

    Each chain ends at a terminal sum. Those sums are the coefficients
    of the last term of the isometric recursion, so f is solvable exactly
    when their joint norm is within ``residual_tol``. Otherwise every
    chain whose sum is not zero is reported as an obstruction: its running
    sums stay at the terminal value and g would not be square summable.
    """
    coeffs = f.coeffs.pruned(tolerances.zero_eps)
    chains = _chains(coeffs, f.base)
    entries: Dict[int, complex] = {}
    totals: Dict[int, complex] = {}
    for root, chain in sorted(chains.items()):
        top = max(chain)
        running = 0j
        for k in range(top):
            running += chain.get(k, 0j)
            entries[root * f.base**k] = running
        totals[root] = running + chain[top]

    terminal = math.sqrt(math.fsum(abs(total) ** 2 for total in totals.values()))
    solvable = terminal <= tolerances.residual_tol
    obstructions = (
        []
        if solvable
        else [
            Obstruction(mode=root, chain_sum=total)
            for root, total in totals.items()
            if abs(total) > tolerances.zero_eps
        ]
    )

    candidate = coeffs.derive(entries, tolerances.zero_eps)
    residual = verify_coboundary(koopman(f), coeffs, candidate, tolerances)
    logger.debug(
        "chain_solve: %d chains, terminal norm %r", len(chains), terminal
    )
    return ChainVerdict(
        solvable=solvable,
        g=FourierSeries(coeffs=candidate, base=f.base) if solvable else None,
        obstructions=obstructions,
        residual=residual,
    )


def valuation_condition(f: FourierSeries, epsilon: float) -> float:
    """The sum of val(n)^(4 + epsilon) |f(n)|^2 over the support of f."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return math.fsum(
        val2(mode, f.base) ** (4 + epsilon) * abs(c) ** 2
        for mode, c in f.coeffs.entries.items()
    )


def block_energy_profile(f: FourierSeries, i_max: int = None) -> BlockEnergyProfile:
    """Energy of f on each valuation level, with the decay rate alpha.

    Level i holds the modes of valuation exactly i. When at least two
    levels carry energy, log_b(energy) is fitted linearly in i and alpha
    is minus the slope.
    """
    energies: Dict[int, float] = {}
    for mode, c in f.coeffs.entries.items():
        level = val2(mode, f.base)
        energies[level] = energies.get(level, 0.0) + abs(c) ** 2
    if i_max is None:
        i_max = max(energies, default=0)
    levels = [(i, energies.get(i, 0.0)) for i in range(i_max + 1)]

    nonzero = [(i, e) for i, e in levels if e > 0]
    if len(nonzero) < 2:
        return BlockEnergyProfile(levels=levels)
    positions = np.array([i for i, _ in nonzero], dtype=float)
    logs = np.log(np.array([e for _, e in nonzero])) / math.log(f.base)
    slope, intercept = np.polyfit(positions, logs, 1)
    fitted = slope * positions + intercept
    return BlockEnergyProfile(
        levels=levels,
        alpha=float(-slope),
        fit_residual=float(np.sqrt(np.mean((logs - fitted) ** 2))),
    )


def ergodic_sum(f: FourierSeries, n: int) -> CoeffVector:
    """Coefficients of sum_{i=0}^n f(b^i t)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    op = koopman(f)
    total = ErgodicAccumulator(f.coeffs)
    term = f.coeffs
    for _ in range(n + 1):
        if term.is_empty:
            break
        total.add(term)
        term = op.forward(term)
    return total.value()


def ergodic_integral(f: FourierSeries, n: int) -> float:
    """(1/n) times the integral of |sum_{i=0}^n f(b^i t)|^2 over [0, 1]."""
    return norm_squared(ergodic_sum(f, n)) / n


def synthesize_samples(coeffs: CoeffVector, m: int) -> List[complex]:
    """Values of sum a_n exp(2 pi i n t) at t = j/m, j = 0..m-1.

    Modes are reduced mod m before forming phases, so very large modes
    are evaluated without loss of precision.
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    positions = np.arange(m, dtype=np.int64)
    values = np.zeros(m, dtype=complex)
    for mode, c in coeffs.entries.items():
        residues = (mode % m) * positions % m
        values += c * np.exp(2j * np.pi * residues / m)
    return [complex(v) for v in values]


def ergodic_integral_quadrature(f: FourierSeries, n: int, m: int = None) -> float:
    """:func:`ergodic_integral` by uniform sampling in the time domain.

    Exact up to roundoff once m exceeds twice the largest mode of the
    ergodic sum, which the default guarantees.
    """
    coeffs = ergodic_sum(f, n)
    if coeffs.is_empty:
        return 0.0
    if m is None:
        m = 2 * f.base**n * max(abs(mode) for mode in f.coeffs.entries) + 1
    values = np.array(synthesize_samples(coeffs, m))
    return float(np.mean(np.abs(values) ** 2)) / n


def summability_bound(
    f: FourierSeries, epsilon: float, cutoff: int = None
) -> Tuple[float, float]:
    """The summability series and its valuation bound.

    Returns:
      (sum_k k |T*^k f|, 2 zeta(1 + epsilon)^(1/2) V^(1/2)) where V is
      :func:`valuation_condition`; the first never exceeds the second.
    """
    value, _ = summability(koopman(f), f.coeffs, cutoff)
    zeta = float(scipy.special.zeta(1 + epsilon, 1))
    return value, 2 * math.sqrt(zeta) * math.sqrt(valuation_condition(f, epsilon))


def dyadic_report(
    f: FourierSeries,
    epsilon: float = 1.0,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cutoff: int = None,
    horizon: int = DEFAULT_HORIZON,
) -> ConditionReport:
    """Coboundary conditions of f under the Koopman operator, plus the
    valuation sum and the level decay rate."""
    report = condition_report(koopman(f), f.coeffs, tolerances, cutoff, horizon)
    profile = block_energy_profile(f)
    notes = list(report.notes) + ["verdicts hold for the given finite truncation"]
    return report.copy(
        update=dict(
            valuation_sum=valuation_condition(f, epsilon),
            level_decay_alpha=profile.alpha,
            notes=notes,
        )
    )
