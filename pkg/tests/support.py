"""Shared builders and corpora.

Windows and tables are cached per input so the expensive objects are built
once and shared across test modules; the pole-order tower additionally
caches its own result on the window object.
"""

import random
from fractions import Fraction
from functools import lru_cache

from koszulspec.closedform import BinaryFormFactorization
from koszulspec.decomp import build_invariant_table
from koszulspec.koszul import KoszulWindow
from koszulspec.linalg import SparseMatrix, rank
from koszulspec.poly import HomogeneousPoly, parse_poly, serialize_poly

VARS2 = ("x", "y")
VARS3 = ("x", "y", "z")
VARS4 = ("x", "y", "z", "w")


@lru_cache(maxsize=None)
def poly(text, variables):
    return parse_poly(text, list(variables))


@lru_cache(maxsize=None)
def window(text, variables, k_max=None):
    return KoszulWindow(poly(text, variables), k_max=k_max)


@lru_cache(maxsize=None)
def table(text, variables, k_max=None, seed=0):
    return build_invariant_table(poly(text, variables), k_max=k_max, seed=seed)


# -- binary forms -------------------------------------------------------------

# distinct linear forms; patterns index into this list
LINS = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, -1), (1, 3), (3, 1)]

PATTERNS = [
    (1, 1), (2,), (2, 1), (3,), (1, 1, 1), (2, 2), (3, 1), (2, 1, 1), (4,),
    (1, 1, 1, 1), (3, 2), (2, 2, 1), (4, 1), (3, 3), (2, 2, 2), (4, 2),
    (5, 1), (2, 2, 1, 1), (3, 3, 3), (6, 2),
]


def linear_form(a, b):
    return HomogeneousPoly(2, 1, {(1, 0): Fraction(a), (0, 1): Fraction(b)})


@lru_cache(maxsize=None)
def binary_factorization(pattern):
    pairs = [(linear_form(*LINS[i]), m) for i, m in enumerate(pattern)]
    return BinaryFormFactorization.from_factors(pairs)


def pencil_member(m):
    """(x^m + y^m) x^m y^m: m simple factors plus x, y with multiplicity m.

    The simple factors are not rational, so only the multiplicity vector is
    recorded; every closed form below depends on nothing else."""
    return BinaryFormFactorization((1,) * m + (m, m))


def pencil_text(m):
    return f"x^{2 * m}*y^{m} + x^{m}*y^{2 * m}"


@lru_cache(maxsize=None)
def binary_text(pattern):
    """Expanded text of the standard factorization, for feeding the engine."""
    return serialize_poly(binary_factorization(pattern).expand(), list(VARS2))


# -- the identity corpus ------------------------------------------------------

# label -> (text, variables).  Everything is fully expanded because the
# parser has no parentheses; products were expanded by hand once.
CORPUS = {
    # n = 2
    "xy": ("x*y", VARS2),
    "x2": ("x^2", VARS2),
    "x2y": ("x^2*y", VARS2),
    "x3+y3": ("x^3 + y^3", VARS2),
    "x2y2": ("x^2*y^2", VARS2),
    "x3y": ("x^3*y", VARS2),
    "x3y2": ("x^3*y^2", VARS2),
    "x3y2+x2y3": ("x^3*y^2 + x^2*y^3", VARS2),
    # n = 3
    "fermat2_3": ("x^2 + y^2 + z^2", VARS3),
    "fermat3_3": ("x^3 + y^3 + z^3", VARS3),
    "fermat4_3": ("x^4 + y^4 + z^4", VARS3),
    "fermat5_3": ("x^5 + y^5 + z^5", VARS3),
    "xyz": ("x*y*z", VARS3),
    "fourlines": ("x^2*y*z + x*y^2*z + x*y*z^2", VARS3),
    "threenodes": ("x^2*y^2 + x^2*z^2 + y^2*z^2", VARS3),
    "twoa3": ("x^2*y^2 + z^4", VARS3),
    "cusp": ("x^3 + y^2*z", VARS3),
    "conecubic_3": ("x^3 + y^3", VARS3),
    "ts_3_4_1": ("x*y^3 + z^4", VARS3),
    "ts_3_5_1": ("x*y^4 + z^5", VARS3),
    "ts_3_5_2": ("x^2*y^3 + z^5", VARS3),
    "fivelines": (None, VARS3),  # filled below
    "nonwh": ("x^5 + y^5 + x^2*y^2*z", VARS3),
    # n = 4
    "fermat2_4": ("x^2 + y^2 + z^2 + w^2", VARS4),
    "fermat3_4": ("x^3 + y^3 + z^3 + w^3", VARS4),
    "fermat4_4": ("x^4 + y^4 + z^4 + w^4", VARS4),
    "fermat5_4": ("x^5 + y^5 + z^5 + w^5", VARS4),
    "cayley": ("x*y*z + x*y*w + x*z*w + y*z*w", VARS4),
    "ts_4_4_1": ("x*y^3 + z^4 + w^4", VARS4),
    "ts_4_4_2": ("x^2*y^2 + z^4 + w^4", VARS4),
    "ts_4_5_2": ("x^2*y^3 + z^5 + w^5", VARS4),
    "conecubic_4": ("x^3 + y^3 + z^3", VARS4),
}


def _expand_product(texts, variables):
    f = parse_poly(texts[0], list(variables))
    for t in texts[1:]:
        f = f.mul(parse_poly(t, list(variables)))
    return f


@lru_cache(maxsize=None)
def corpus_poly(label):
    if label == "fivelines":
        return _expand_product(["x", "y", "z", "x + y + z", "x + 2*y + 3*z"], VARS3)
    text, variables = CORPUS[label]
    return parse_poly(text, list(variables))


@lru_cache(maxsize=None)
def corpus_table(label, seed=0):
    return build_invariant_table(corpus_poly(label), seed=seed)


@lru_cache(maxsize=None)
def corpus_window(label):
    return KoszulWindow(corpus_poly(label))


# nodes with known coordinates: how much of the ambient space they span
SPAN_RANK = {"xyz": 3, "fourlines": 3, "fivelines": 3, "threenodes": 3, "cayley": 4}

# all singular points are ordinary nodes
NODAL = ["xyz", "fourlines", "threenodes", "fivelines", "cayley"]

# n = 3 entries with known smallest local spectral exponent
ALPHA_MIN = {
    "xyz": Fraction(1),
    "fourlines": Fraction(1),
    "threenodes": Fraction(1),
    "fivelines": Fraction(1),
    "twoa3": Fraction(3, 4),
    "cusp": Fraction(5, 6),
}

# weighted homogeneous singularities throughout: the tower must stop by
# stage two with nothing in the torsion profile
WEIGHTED_HOMOGENEOUS = [
    "xyz",
    "fourlines",
    "threenodes",
    "twoa3",
    "x2y2",
    "fermat2_3",
    "fermat3_3",
    "fermat4_3",
    "fermat5_3",
    "cusp",
    "fivelines",
    "conecubic_3",
    "cayley",
    "ts_3_4_1",
    "ts_3_5_1",
    "ts_3_5_2",
]


# -- randomized rank check ----------------------------------------------------


def random_sparse(rng, rows, cols, density=0.4):
    m = SparseMatrix(rows, cols)
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                num = rng.randint(-9, 9)
                den = rng.choice([1, 1, 1, 2, 3])
                if num:
                    m.set(r, c, Fraction(num, den))
    return m


def dense_rank(m):
    """Plain fraction Gaussian elimination; independent of the library code."""
    a = [[m.get(r, c) for c in range(m.cols)] for r in range(m.rows)]
    rk, row = 0, 0
    for col in range(m.cols):
        piv = next((i for i in range(row, m.rows) if a[i][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        for i in range(m.rows):
            if i != row and a[i][col]:
                f = a[i][col] / a[row][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        rk += 1
        row += 1
    return rk


def modular_rank_agreement(count=100, seed=20260825):
    """Number of random matrices where the modular fast path, the exact
    path, and a dense oracle all agree on the rank."""
    rng = random.Random(seed)
    agree = 0
    for _ in range(count):
        m = random_sparse(rng, rng.randint(1, 8), rng.randint(1, 8))
        r_fast = rank(m)
        r_exact = rank(m, exact=True)
        if r_fast == r_exact == dense_rank(m):
            agree += 1
    return agree
