"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test.
"""

import math

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from fractions import Fraction


def bernoulli_exact(n):
    """B_0..B_n with B_1 = -1/2, by the Akiyama-Tanigawa algorithm."""
    out, a = [], [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    out[1] = -out[1]  # the algorithm yields B_1 = +1/2
    return [float(b) for b in out]


def skew(v):
    return np.cross(v, np.eye(3)).T


def expm_series(a, n_terms=40, tol=1e-16):
    term = np.eye(a.shape[0])
    total = term.copy()
    for i in range(1, n_terms):
        term = term @ a / i
        total = total + term
        if np.max(np.abs(term)) < tol:
            break
    return total


def homogeneous(X):
    m = np.zeros((4, 4))
    m[:3, :3] = skew(X[:3])
    m[:3, 3] = X[3:]
    return m


def ad_oracle(X):
    """Matrix of Y -> vee([hat X, hat Y]) built column by column."""
    cols = []
    for e in np.eye(6):
        c = homogeneous(X) @ homogeneous(e) - homogeneous(e) @ homogeneous(X)
        cols.append(np.concatenate([[c[2, 1], c[0, 2], c[1, 0]], c[:3, 3]]))
    return np.array(cols).T


def so3_dexp_series(x, n=40):
    xt = skew(x)
    term, total = np.eye(3), np.eye(3)
    for i in range(1, n):
        term = term @ xt / (i + 1)
        total = total + term
    return total


def so3_dexpinv_series(x, n=24):
    b = bernoulli_exact(n)
    xt = skew(x)
    power, total = np.eye(3), np.eye(3)
    for i in range(1, n):
        power = power @ xt
        total = total + b[i] / math.factorial(i) * power
    return total


def central_diff(f, h=1e-5):
    """Derivative at 0 of a scalar-parameter matrix function."""
    return (f(h) - f(-h)) / (2.0 * h)


def unit(v):
    return v / np.linalg.norm(v)


finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)
vec6 = arrays(np.float64, 6, elements=finite)


@st.composite
def screws(draw, ang_max=3.0, lin=3.0):
    """Screw vectors with rotational norm at most ``ang_max``."""
    d = draw(arrays(np.float64, 3, elements=st.floats(-1, 1)))
    n = np.linalg.norm(d)
    r = draw(st.floats(0.0, ang_max))
    ang = np.zeros(3) if n < 1e-3 else r * d / n
    y = draw(arrays(np.float64, 3, elements=st.floats(-lin, lin)))
    return np.concatenate([ang, y])
