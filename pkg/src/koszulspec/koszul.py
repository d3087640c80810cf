"""Graded pieces of the Koszul complex of the partials of f.

Forms carry the grading deg x_i = deg dx_i = 1, so the degree-k piece of
j-forms has monomials of degree k - j.  Two degree-preserving families of
maps matter here: multiplication by df (raises the grading by d) and the
exterior derivative (preserves it).  Everything downstream is assembled
from ranks and kernels of these matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .linalg import (
    DEFAULT_PRIMES,
    SparseMatrix,
    SparseVec,
    rank_exact_rows,
    rank_mod,
)
from .poly import HomogeneousPoly

IndexSet = tuple[int, ...]
Exponent = tuple[int, ...]
BasisItem = tuple[IndexSet, Exponent]


def omega_dim(n: int, j: int, k: int) -> int:
    """Dimension of the degree-k piece of j-forms in n variables."""
    if j < 0 or j > n or k < j:
        return 0
    return comb(n, j) * comb(k - j + n - 1, n - 1)


def _monomials(n: int, m: int):
    """All exponent tuples of total degree m, in lexicographic order."""
    if m < 0:
        return
    if n == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _monomials(n - 1, m - first):
            yield (first,) + rest


def basis(j: int, k: int, n: int) -> list[BasisItem]:
    """Ordered monomial basis of the degree-k piece of j-forms: index sets in
    lexicographic order, then exponents in lexicographic order."""
    if j < 0 or j > n or k < j:
        return []
    out: list[BasisItem] = []
    for idx in combinations(range(n), j):
        for expo in _monomials(n, k - j):
            out.append((idx, expo))
    return out


def wedge_sign(i: int, idx: IndexSet) -> int:
    """Sign of dx_i wedged onto dx_idx, i.e. (-1)^#{l in idx : l < i}."""
    flips = sum(1 for l in idx if l < i)
    return -1 if flips & 1 else 1


def _insert_index(i: int, idx: IndexSet) -> IndexSet:
    out = sorted(idx + (i,))
    return tuple(out)


def gamma_series(n: int, d: int, k_max: int) -> list[int]:
    """Coefficients 0..k_max of t^n * (1 + t + ... + t^(d-2))^n, the common
    Euler characteristic sequence for degree-d forms in n variables."""
    base = [1] * (d - 1)
    poly = [1]
    for _ in range(n):
        if not base:
            poly = []
            break
        nxt = [0] * (len(poly) + len(base) - 1)
        for a, pa in enumerate(poly):
            if pa:
                for b, pb in enumerate(base):
                    nxt[a + b] += pa * pb
        poly = nxt
    out = [0] * (k_max + 1)
    for i, v in enumerate(poly):
        k = i + n
        if k <= k_max:
            out[k] = v
    return out


class KoszulWindow:
    """All graded data of the Koszul complex of f up to degree k_max.

    Ranks are cached per (form degree, grading degree).  The default rank
    path reduces modulo two fixed primes and promotes to exact elimination
    on disagreement; force_exact() recomputes every cached rank exactly.
    """

    def __init__(self, f: HomogeneousPoly, k_max: int | None = None):
        if f.is_zero():
            raise ValueError("zero polynomial has no Koszul complex")
        self.f = f
        self.n = f.n
        self.d = f.degree
        self.k_max = k_max if k_max is not None else self.n * self.d + self.d
        if self.k_max < self.n:
            raise ValueError("window too small to contain any top forms")
        terms = f.integer_terms()
        self.partial_terms: list[dict[Exponent, int]] = []
        for i in range(self.n):
            pd: dict[Exponent, int] = {}
            for expo, c in terms.items():
                if expo[i]:
                    low = list(expo)
                    low[i] -= 1
                    pd[tuple(low)] = c * expo[i]
            self.partial_terms.append(pd)
        self._basis: dict[tuple[int, int], list[BasisItem]] = {}
        self._index: dict[tuple[int, int], dict[BasisItem, int]] = {}
        self._wedge_cols: dict[tuple[int, int], list[SparseVec]] = {}
        self._deriv_cols: dict[tuple[int, int], list[SparseVec]] = {}
        self._rank: dict[tuple[int, int], int] = {}
        self._exact_ranks = False
        self._gamma = gamma_series(self.n, self.d, self.k_max)

    # -- bases ---------------------------------------------------------------

    def basis(self, j: int, k: int) -> list[BasisItem]:
        key = (j, k)
        if key not in self._basis:
            self._basis[key] = basis(j, k, self.n)
        return self._basis[key]

    def basis_index(self, j: int, k: int) -> dict[BasisItem, int]:
        key = (j, k)
        if key not in self._index:
            self._index[key] = {item: p for p, item in enumerate(self.basis(j, k))}
        return self._index[key]

    def dim(self, j: int, k: int) -> int:
        return omega_dim(self.n, j, k)

    # -- matrices --------------------------------------------------------------

    def wedge_columns(self, j: int, m: int) -> list[SparseVec]:
        """Integer columns of df wedge : (j-forms, degree m) -> (j+1, m+d)."""
        key = (j, m)
        if key in self._wedge_cols:
            return self._wedge_cols[key]
        cols: list[SparseVec] = []
        if 0 <= j < self.n and m >= j:
            target = self.basis_index(j + 1, m + self.d)
            for idx, expo in self.basis(j, m):
                col: SparseVec = {}
                for i in range(self.n):
                    if i in idx:
                        continue
                    s = wedge_sign(i, idx)
                    tgt_idx = _insert_index(i, idx)
                    for pexp, c in self.partial_terms[i].items():
                        texp = tuple(a + b for a, b in zip(expo, pexp))
                        r = target[(tgt_idx, texp)]
                        acc = col.get(r, 0) + s * c
                        if acc:
                            col[r] = acc
                        else:
                            del col[r]
                cols.append(col)
        self._wedge_cols[key] = cols
        return cols

    def derivative_columns(self, j: int, m: int) -> list[SparseVec]:
        """Integer columns of the exterior derivative (j, m) -> (j+1, m)."""
        key = (j, m)
        if key in self._deriv_cols:
            return self._deriv_cols[key]
        cols: list[SparseVec] = []
        if 0 <= j < self.n and m >= j:
            target = self.basis_index(j + 1, m)
            for idx, expo in self.basis(j, m):
                col: SparseVec = {}
                for i in range(self.n):
                    if i in idx or expo[i] == 0:
                        continue
                    low = list(expo)
                    low[i] -= 1
                    r = target[(_insert_index(i, idx), tuple(low))]
                    col[r] = wedge_sign(i, idx) * expo[i]
                cols.append(col)
        self._deriv_cols[key] = cols
        return cols

    # -- ranks -----------------------------------------------------------------

    def rank_wedge(self, j: int, m: int) -> int:
        """Rank of df wedge out of (j, m); cached."""
        if j < 0 or j > self.n - 1 or m < j:
            return 0
        key = (j, m)
        if key in self._rank:
            return self._rank[key]
        cols = self.wedge_columns(j, m)
        nrows = self.dim(j + 1, m + self.d)
        if self._exact_ranks:
            r = rank_exact_rows(cols)
        else:
            r0 = rank_mod(cols, nrows, DEFAULT_PRIMES[0])
            r1 = rank_mod(cols, nrows, DEFAULT_PRIMES[1])
            r = r0 if r0 == r1 else rank_exact_rows(cols)
        self._rank[key] = r
        return r

    def force_exact(self) -> None:
        """Recompute every cached rank with exact elimination."""
        self._exact_ranks = True
        for key in list(self._rank):
            self._rank[key] = rank_exact_rows(self.wedge_columns(*key))

    def promote_exact(self, j: int, m: int) -> None:
        """Replace one cached rank by its exact value.  Called when a
        downstream identity fails, before trusting the failure."""
        if 0 <= j <= self.n - 1 and m >= j:
            self._rank[(j, m)] = rank_exact_rows(self.wedge_columns(j, m))

    # -- graded invariants -------------------------------------------------------

    def gamma(self, k: int) -> int:
        if k < 0 or k > self.k_max:
            return 0
        return self._gamma[k]

    def mu(self, k: int) -> int:
        """dim of (n-forms of degree k) / df wedge (n-1 forms)."""
        if k < 0 or k > self.k_max:
            raise ValueError(f"degree {k} outside window 0..{self.k_max}")
        return self.dim(self.n, k) - self.rank_wedge(self.n - 1, k - self.d)

    def nu(self, k: int) -> int:
        """dim of middle Koszul cohomology at grading degree k."""
        if k < 0 or k > self.k_max:
            raise ValueError(f"degree {k} outside window 0..{self.k_max}")
        cycles = self.dim(self.n - 1, k - self.d) - self.rank_wedge(self.n - 1, k - self.d)
        return cycles - self.rank_wedge(self.n - 2, k - 2 * self.d)

    def h_minus2(self, k: int) -> int:
        """dim of the next-lower Koszul cohomology; zero under the
        one-dimensional-singular-locus assumption."""
        cycles = self.dim(self.n - 2, k - 2 * self.d) - self.rank_wedge(self.n - 2, k - 2 * self.d)
        return cycles - self.rank_wedge(self.n - 3, k - 3 * self.d)


def build_wedge(win: KoszulWindow, j: int, k: int) -> SparseMatrix:
    """Matrix of df wedge : (j-forms, degree k-d) -> (j+1, degree k)."""
    cols = win.wedge_columns(j, k - win.d)
    return SparseMatrix.from_columns(win.dim(j + 1, k), cols)


def mu(win: KoszulWindow, k: int) -> int:
    return win.mu(k)


def nu(win: KoszulWindow, k: int) -> int:
    return win.nu(k)


@dataclass(frozen=True)
class AssumptionEvidence:
    """Necessary-condition checks for the singular locus of the affine cone
    being at most one-dimensional.  Evidence only; passing does not certify
    the assumption, failing refutes it."""

    h2_ok: bool
    first_h2_offender: int | None
    euler_ok: bool
    first_euler_offender: int | None
    mu_stabilized: bool
    mu_top_values: tuple[int, int]

    @property
    def passed(self) -> bool:
        return self.h2_ok and self.euler_ok and self.mu_stabilized


def assumption_evidence(win: KoszulWindow) -> AssumptionEvidence:
    """Scan the window for vanishing of the lower Koszul cohomology, the
    per-degree Euler identity mu - nu = gamma, and stabilization of mu."""
    d = win.d
    h2_ok, h2_off = True, None
    for k in range(win.k_max + 1):
        if win.h_minus2(k) != 0:
            win.promote_exact(win.n - 2, k - 2 * d)
            win.promote_exact(win.n - 3, k - 3 * d)
            if win.h_minus2(k) != 0:
                h2_ok, h2_off = False, k
                break
    euler_ok, euler_off = True, None
    for k in range(win.k_max + 1):
        if win.mu(k) - win.nu(k) != win.gamma(k):
            win.promote_exact(win.n - 1, k - d)
            win.promote_exact(win.n - 2, k - 2 * d)
            if win.mu(k) - win.nu(k) != win.gamma(k):
                euler_ok, euler_off = False, k
                break
    top = (win.mu(win.k_max - 1), win.mu(win.k_max))
    return AssumptionEvidence(
        h2_ok=h2_ok,
        first_h2_offender=h2_off,
        euler_ok=euler_ok,
        first_euler_offender=euler_off,
        mu_stabilized=top[0] == top[1],
        mu_top_values=top,
    )
