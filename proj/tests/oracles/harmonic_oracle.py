#!/usr/bin/env python3
"""Map-phase delay reference values from exact harmonic sums.

Prints (mu/2) * (1 + sum_{j=K-q+1}^{K} 1/j) for K=30, mu=1/2 and every q,
evaluated with Fraction and rounded with mpmath at 30 digits. The output is
frozen into tests/test_delay_model.cpp and the acceptance suite.
"""
from fractions import Fraction

import mpmath

mpmath.mp.dps = 40


def map_delay(mu, q, K):
    return mu / 2 * (1 + sum(Fraction(1, j) for j in range(K - q + 1, K + 1)))


if __name__ == "__main__":
    K, mu = 30, Fraction(1, 2)
    for q in range(1, K + 1):
        v = map_delay(mu, q, K)
        print(f"{q} {mpmath.nstr(mpmath.mpf(v.numerator) / v.denominator, 20)}")
