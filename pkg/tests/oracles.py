"""Independent reference computations used to check the library.

Everything here is derived from first principles by exhaustive
enumeration: the per-round conditional error probabilities come from
the eight physical flip patterns of three qubits, and history success
probabilities come from enumerating every logical-flip pattern over the
rounds.  Nothing imports the formulas under test.
"""

from itertools import product


def round_conditionals(p: float) -> dict:
    """Joint statistics of one syndrome round from the 3-qubit flip model.

    Enumerates the 2^3 physical flip patterns.  No or all flips give the
    trivial syndrome; one or two flips give a nontrivial one.  A logical
    error results from two flips (the correction hits the wrong qubit)
    or three (undetected).
    """
    w = {k: p**k * (1.0 - p) ** (3 - k) for k in range(4)}
    p_plus = w[0] + w[3]
    p_minus = 3 * w[1] + 3 * w[2]
    return {
        "p_plus": p_plus,
        "p_minus": p_minus,
        "err_given_plus": w[3] / p_plus if p_plus else 0.0,
        "err_given_minus": 3 * w[2] / p_minus if p_minus else 0.0,
    }


def parity_even_prob(flip_probs: list[float]) -> float:
    """P(an even number of independent flips) by full enumeration."""
    total = 0.0
    for pattern in product((0, 1), repeat=len(flip_probs)):
        if sum(pattern) % 2 == 0:
            term = 1.0
            for bit, q in zip(pattern, flip_probs):
                term *= q if bit else (1.0 - q)
            total += term
    return total


def history_success_prob(n_plus: int, n_minus: int, p: float) -> float:
    """No-logical-error probability for a history, by brute force."""
    cond = round_conditionals(p)
    probs = [cond["err_given_plus"]] * n_plus + [cond["err_given_minus"]] * n_minus
    return parity_even_prob(probs)
