#!/usr/bin/env python3
"""Recompute the regression constants frozen into the test suite.

Everything here is written out longhand from the defining formulas with
exact rational arithmetic, independently of the package internals, so the
pinned values in tests/ can be audited and regenerated:

    python3 scripts/compute_pins.py

The worked five-case database over binary X1, X2, X3 (child X3 with
parents X1, X2) has these family counts, enterable by inspection:

    case  X1  X2  X3          observed (j, k) cells:   (X1=1,X2=2) -> X3=2
    1      1   2   2          completion counts n*[j][k]:
    2      2   ?   1              j=(1,1): (2, 2)   j=(1,2): (2, 1)
    3      ?   1   2              j=(2,1): (2, 1)   j=(2,2): (2, 0)
    4      ?   ?   1          parent-complete counts: only case 1 -> j=(1,2)
    5      1   ?   ?          parent-consistent incomplete: (3, 2, 3, 2)
"""

from fractions import Fraction
from itertools import product
from math import factorial, lgamma

OBS = [(0, 0), (0, 1), (0, 0), (0, 0)]          # n(x_3k | j), j in (11,12,21,22)
COMP = [(2, 2), (2, 1), (2, 1), (2, 0)]         # n*(x_3k | j)
PARENT_OBS = [0, 1, 0, 0]                       # cases complete on (X1, X2)
PARENT_COMP = [3, 2, 3, 2]                      # parent-incomplete, consistent with j
N_CASES = 5
ALPHA = Fraction(1)                             # per child cell
BETA = Fraction(1)                              # per parent configuration


def collapse_row(alpha, counts, completions, phi):
    """Point estimates: mix the per-rival lower extremes with the upper bound."""
    c = len(counts)
    alpha_sum = alpha * c
    base = alpha_sum + sum(counts)
    p_hat = []
    for k in range(c):
        upper = (alpha + counts[k] + completions[k]) / (base + completions[k])
        total = phi[k] * upper
        for l in range(c):
            if l != k:
                lower_l = (alpha + counts[k]) / (base + completions[l])
                total += phi[l] * lower_l
        p_hat.append(total)
    assert sum(p_hat) == 1
    return p_hat


def mar_phi(alpha, counts):
    c = len(counts)
    denominator = alpha * c + sum(counts)
    return [(alpha + counts[k]) / denominator for k in range(c)]


def family_log_score():
    """The estimated family score of X3 given (X1, X2), uniform priors."""
    # parent-level collapsed configuration probabilities
    parent_phi = mar_phi(BETA, PARENT_OBS)
    parent_p_hat = collapse_row(BETA, PARENT_OBS, PARENT_COMP, parent_phi)
    spare = N_CASES - sum(PARENT_OBS)
    alpha_hat = [
        2 * ALPHA + PARENT_OBS[j] + parent_p_hat[j] * spare for j in range(4)
    ]
    assert sum(alpha_hat) == 2 * ALPHA * 4 + N_CASES

    total = 0.0
    for j in range(4):
        phi = mar_phi(ALPHA, OBS[j])
        p_hat = collapse_row(ALPHA, OBS[j], COMP[j], phi)
        total += lgamma(float(2 * ALPHA)) - lgamma(float(alpha_hat[j]))
        for k in range(2):
            total += lgamma(float(alpha_hat[j] * p_hat[k])) - lgamma(float(ALPHA))
    return total, [float(a) for a in alpha_hat]


def exact_gamma_ratio(counts_by_config):
    """Family factor of the complete-data marginal likelihood, alpha = 1 per
    cell: Gamma(c)/Gamma(c + n_j) * prod_k n_jk!  as an exact rational."""
    value = Fraction(1)
    for counts in counts_by_config:
        c = len(counts)
        n_j = sum(counts)
        value *= Fraction(factorial(c - 1), factorial(c - 1 + n_j))
        for n_jk in counts:
            value *= factorial(n_jk)
    return value


def collider_mixture():
    """Uniform mixture over all 64 completions of the worked database of the
    exact marginal likelihood under the model X1 -> X3 <- X2."""
    cases = [
        (0, 1, 1),
        (1, None, 0),
        (None, 0, 1),
        (None, None, 0),
        (0, None, None),
    ]
    holes = [
        (r, i) for r, case in enumerate(cases) for i, v in enumerate(case) if v is None
    ]
    total = Fraction(0)
    n_completions = 2 ** len(holes)
    for assignment in product((0, 1), repeat=len(holes)):
        filled = [list(case) for case in cases]
        for (r, i), v in zip(holes, assignment):
            filled[r][i] = v
        x1 = [0, 0]
        x2 = [0, 0]
        x3 = [[0, 0] for _ in range(4)]
        for a, b, c in filled:
            x1[a] += 1
            x2[b] += 1
            x3[2 * a + b][c] += 1
        likelihood = (
            exact_gamma_ratio([x1]) * exact_gamma_ratio([x2]) * exact_gamma_ratio(x3)
        )
        total += likelihood
    return total / n_completions


if __name__ == "__main__":
    log_g, alpha_hat = family_log_score()
    print(f"worked-example family log score (X3 | X1,X2), MAR phi: {log_g!r}")
    print(f"alpha_hat per configuration: {alpha_hat!r}")
    mixture = collider_mixture()
    print(f"collider mixture marginal (exact rational): {mixture}")
    print(f"collider mixture marginal (float): {float(mixture)!r}")
