"""NumPy fallback for the compiled inference kernels.

Same call surface as the Cython module `_kernels`. All functions take the
packed model arrays produced by `fuzzy.TskModel`:

    centers, widths : (M,) float64, one entry per membership function,
                      flattened over inputs
    input_of        : (M,) int64, input index owning each membership function
    rule_mf         : (R, n) int64, flat membership index per rule and input
    coeffs          : (R, n+1) float64, consequent coefficients, constant first
"""

import numpy as np

# total rule activation below this is treated as degenerate and clamped
DENOM_FLOOR = 1e-12


def mf_values_point(centers, widths, input_of, x):
    d = x[input_of] - centers
    return np.exp(-(d * d) / (2.0 * widths * widths))


def firing_point(centers, widths, input_of, rule_mf, x):
    """Per-rule firing strengths at a single input point, shape (R,)."""
    return mf_values_point(centers, widths, input_of, x)[rule_mf].prod(axis=1)


def eval_point(centers, widths, input_of, rule_mf, coeffs, x):
    """Weighted-average output at one point. Returns (y, total_firing)."""
    w = firing_point(centers, widths, input_of, rule_mf, x)
    g = coeffs[:, 0] + coeffs[:, 1:] @ x
    wsum = float(w.sum())
    y = float((w @ g) / max(wsum, DENOM_FLOOR))
    return y, wsum


def firing_batch(centers, widths, input_of, rule_mf, X):
    """Firing strengths for a batch of points, shape (N, R)."""
    d = X[:, input_of] - centers
    mf = np.exp(-(d * d) / (2.0 * widths * widths))
    return mf[:, rule_mf].prod(axis=2)


def eval_batch(centers, widths, input_of, rule_mf, coeffs, X):
    """Batch outputs. Returns (y, total_firing), each shape (N,)."""
    W = firing_batch(centers, widths, input_of, rule_mf, X)
    G = coeffs[:, 0] + X @ coeffs[:, 1:].T
    wsum = W.sum(axis=1)
    y = (W * G).sum(axis=1) / np.maximum(wsum, DENOM_FLOOR)
    return y, wsum


class SquaredErrorObjective:
    """Callable (y(x) - target)^2 with the model arrays bound once.

    This is the annealer's inner-loop objective; binding the packed arrays
    up front keeps the per-call work to a single fused evaluation.
    """

    def __init__(self, centers, widths, input_of, rule_mf, coeffs, target):
        self.centers = centers
        self.widths = widths
        self.input_of = input_of
        self.rule_mf = rule_mf
        self.coeffs = coeffs
        self.target = target

    def __call__(self, x) -> float:
        y, _ = eval_point(
            self.centers, self.widths, self.input_of, self.rule_mf, self.coeffs, x
        )
        return (y - self.target) ** 2
