"""Torsion/free splitting of the top Koszul cohomology and the identity suite.

M denotes the cokernel of df wedge on top forms, graded by ambient degree.
Its torsion part (dimensions mu_torsion) is concentrated in degrees
[n, n*d - n]; the free part (mu_free) is detected as the rank of
multiplication by a high power of a generic linear form, which kills the
torsion and is injective on the free part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .koszul import KoszulWindow, assumption_evidence
from .linalg import DEFAULT_PRIMES, IntEchelon, ModularSpan, SparseVec
from .poly import HomogeneousPoly, generic_linear_form


class NotStabilizedError(RuntimeError):
    """The window top shows no stabilization of mu; enlarge k_max."""


class AssumptionFailure(RuntimeError):
    """Evidence checks refute the finite-singular-locus assumption."""

    def __init__(self, evidence):
        self.evidence = evidence
        super().__init__(f"assumption evidence failed: {evidence}")


class IdentityViolation(RuntimeError):
    """A proved identity fails on exact data; carries degree and identity id."""

    def __init__(self, violations):
        self.violations = violations
        first = violations[0]
        super().__init__(
            f"identity {first[0]} fails at degree {first[1]}: {first[2]} != {first[3]}"
        )


@dataclass
class InvariantTable:
    """All graded invariants of one polynomial over a degree window."""

    n: int
    d: int
    k_max: int
    tau: int
    gamma: list[int]
    mu: list[int]
    mu_torsion: list[int]
    mu_free: list[int]
    nu: list[int]
    type_flag: str
    seed: int | None


@dataclass
class CorollaryReport:
    """Outcome of the identity suite plus the observed signs for the open
    question about gamma_k - mu_torsion_k."""

    ok: bool
    violations: list[tuple[str, int, int, int]]
    min_defect_lhs: int
    min_defect_rhs: int

    @property
    def defect_sides_nonnegative(self) -> bool:
        return self.min_defect_lhs >= 0 and self.min_defect_rhs >= 0


def tau(win: KoszulWindow) -> int:
    """Stabilized value of mu at the top of the window (the total Tjurina
    number of the singular points)."""
    lo, hi = win.mu(win.k_max - 1), win.mu(win.k_max)
    if lo != hi:
        raise NotStabilizedError(
            f"mu({win.k_max - 1}) = {lo} != {hi} = mu({win.k_max}); enlarge the window"
        )
    return hi


class _SplitContext:
    """Caches for the multiplication-rank computation, per linear form."""

    def __init__(self, win: KoszulWindow, y: HomogeneousPoly):
        self.win = win
        self.y_terms = y.integer_terms()
        self._powers: dict[int, dict[tuple[int, ...], int]] = {}
        self._spans: dict[tuple[int, int], ModularSpan] = {}
        self._exact_spans: dict[int, IntEchelon] = {}

    def y_power(self, p: int) -> dict[tuple[int, ...], int]:
        if p in self._powers:
            return self._powers[p]
        if p == 1:
            terms = dict(self.y_terms)
        else:
            prev = self.y_power(p - 1)
            terms = {}
            for ea, ca in prev.items():
                for eb, cb in self.y_terms.items():
                    key = tuple(a + b for a, b in zip(ea, eb))
                    terms[key] = terms.get(key, 0) + ca * cb
        self._powers[p] = terms
        return terms

    def mult_columns(self, k: int, p: int) -> list[SparseVec]:
        win = self.win
        target = win.basis_index(win.n, k + p)
        terms = self.y_power(p)
        cols: list[SparseVec] = []
        for idx, expo in win.basis(win.n, k):
            col: SparseVec = {}
            for add, c in terms.items():
                col[target[(idx, tuple(a + b for a, b in zip(expo, add)))]] = c
            cols.append(col)
        return cols

    def span_mod(self, target_k: int, prime: int) -> ModularSpan:
        key = (target_k, prime)
        if key not in self._spans:
            win = self.win
            cols = win.wedge_columns(win.n - 1, target_k - win.d)
            self._spans[key] = ModularSpan(cols, win.dim(win.n, target_k), prime)
        return self._spans[key]

    def span_exact(self, target_k: int) -> IntEchelon:
        if target_k not in self._exact_spans:
            win = self.win
            ech = IntEchelon(win.dim(win.n, target_k))
            ech.add_many(win.wedge_columns(win.n - 1, target_k - win.d))
            self._exact_spans[target_k] = ech
        return self._exact_spans[target_k]

    def free_rank(self, k: int, p: int, exact: bool = False) -> int:
        """Rank of multiplication by y^p from degree k into degree k+p of M."""
        cols = self.mult_columns(k, p)
        if not exact:
            r0 = self.span_mod(k + p, DEFAULT_PRIMES[0]).added_rank(cols)
            r1 = self.span_mod(k + p, DEFAULT_PRIMES[1]).added_rank(cols)
            if r0 == r1:
                return r0
        return self.span_exact(k + p).added_rank(cols)


def mu_split(
    win: KoszulWindow,
    y: HomogeneousPoly,
    k: int,
    _ctx: _SplitContext | None = None,
    exact: bool = False,
) -> tuple[int, int]:
    """(torsion, free) dimensions of M at degree k, split by the rank of
    multiplication by y^p with p = max(1, n*d - k).  Needs k + p <= k_max."""
    p = max(1, win.n * win.d - k)
    if k + p > win.k_max:
        raise ValueError(f"split at degree {k} needs window k_max >= {k + p}")
    ctx = _ctx if _ctx is not None else _SplitContext(win, y)
    free = ctx.free_rank(k, p, exact=exact)
    total = win.mu(k)
    return total - free, free


def _split_window(win: KoszulWindow, y: HomogeneousPoly, exact: bool = False):
    """mu_torsion / mu_free over the whole window.  Degrees above n*d - n
    carry no torsion (the torsion support is symmetric under k -> n*d - k and
    empty below n), so the split there is just mu itself."""
    n, d, k_max = win.n, win.d, win.k_max
    nd = n * d
    ctx = _SplitContext(win, y)
    mu_t = [0] * (k_max + 1)
    mu_f = [0] * (k_max + 1)
    for k in range(k_max + 1):
        total = win.mu(k)
        if k < n or total == 0:
            continue
        if k > nd - n:
            mu_f[k] = total
            continue
        t, f = mu_split(win, y, k, _ctx=ctx, exact=exact)
        mu_t[k], mu_f[k] = t, f
    return mu_t, mu_f


def verify_corollaries(tab: InvariantTable) -> CorollaryReport:
    """Check the four proved relations between the sequences over the full
    symmetric range [0, n*d], and record the signs entering the open
    question (both sides of the fourth relation)."""
    nd = tab.n * tab.d
    if tab.k_max < nd:
        raise ValueError(f"window k_max={tab.k_max} too small; need at least {nd}")
    violations: list[tuple[str, int, int, int]] = []
    defect_lhs = []
    defect_rhs = []
    for k in range(nd + 1):
        mk = tab.mu[k]
        mkr = tab.mu[nd - k]
        mt, mtr = tab.mu_torsion[k], tab.mu_torsion[nd - k]
        mf, mfr = tab.mu_free[k], tab.mu_free[nd - k]
        gk = tab.gamma[k]
        nur = tab.nu[nd - k]
        if mt != mtr:
            violations.append(("torsion-symmetry", k, mt, mtr))
        if mf + nur != tab.tau:
            violations.append(("free-plus-nu", k, mf + nur, tab.tau))
        if mt != mk + mkr - gk - tab.tau:
            violations.append(("torsion-from-mu", k, mt, mk + mkr - gk - tab.tau))
        if gk - mt != mf + mfr - tab.tau:
            violations.append(("defect-balance", k, gk - mt, mf + mfr - tab.tau))
        defect_lhs.append(gk - mt)
        defect_rhs.append(mf + mfr - tab.tau)
    return CorollaryReport(
        ok=not violations,
        violations=violations,
        min_defect_lhs=min(defect_lhs),
        min_defect_rhs=min(defect_rhs),
    )


def classify_type(tab: InvariantTable) -> str:
    """Type I: nu vanishes through degree n*d/2.  Type II otherwise."""
    for k in range(tab.k_max + 1):
        if 2 * k <= tab.n * tab.d and tab.nu[k] != 0:
            return "II"
    return "I"


@dataclass
class FreePartReport:
    applicable: bool
    base_ok: bool | None
    span_ok: bool | None
    mu_free_at_n: int
    mu_free_above_n: int


def check_free_generators(tab: InvariantTable, span_rank: int | None = None) -> FreePartReport:
    """For a singular hypersurface the free part has dimension exactly 1 in
    degree n, and at least the dimension of the span of the singular points
    in degree n+1 (the span dimension is user-supplied knowledge)."""
    if tab.tau == 0:
        return FreePartReport(False, None, None, tab.mu_free[tab.n], tab.mu_free[tab.n + 1])
    at_n = tab.mu_free[tab.n]
    above = tab.mu_free[tab.n + 1]
    return FreePartReport(
        applicable=True,
        base_ok=at_n == 1,
        span_ok=None if span_rank is None else above >= span_rank,
        mu_free_at_n=at_n,
        mu_free_above_n=above,
    )


def nodal_nu_bound(n: int, d: int) -> int:
    """Largest degree through which nu must vanish when every singular
    point of the hypersurface is a node; the bound depends on the parity
    of the variable count."""
    half = (n - 1) // 2
    bound = (half + 1) * d
    return bound if n % 2 == 0 else bound - 1


def check_nodal_vanishing(tab: InvariantTable) -> None:
    """Assert the nu vanishing range of a nodal hypersurface.

    The caller vouches that the singularities are all nodes; this only
    checks the consequence, it cannot detect non-nodal input."""
    bound = min(nodal_nu_bound(tab.n, tab.d), tab.k_max)
    bad = [("nodal-vanishing", k, tab.nu[k], 0) for k in range(bound + 1) if tab.nu[k] != 0]
    if bad:
        raise IdentityViolation(bad)


def low_degree_syzygy_dim(win: KoszulWindow, k: int) -> int:
    """Dimension of the degree-k relations among the partial derivatives.

    Only k <= d-2 is answered: below degree d-1 the wedge map into the
    relevant spot has no image, so the whole kernel is genuine relations.
    A nonzero value forces nu to be nonzero in degree d + n + k - 1.
    """
    if k > win.d - 2:
        raise ValueError("only degrees at most d-2 carry unambiguous relations")
    if k < 0:
        return 0
    m = k + win.n - 1
    return win.dim(win.n - 1, m) - win.rank_wedge(win.n - 1, m)


def build_invariant_table(
    f: HomogeneousPoly,
    k_max: int | None = None,
    seed: int = 0,
) -> InvariantTable:
    """Full invariant table with validated generic splitting.

    The splitting form is drawn from `seed`; if the identity suite rejects it
    the seed is advanced (at most three redraws), then everything is redone
    with exact ranks before a violation is finally raised.
    """
    win = KoszulWindow(f, k_max)
    if win.k_max < win.n * win.d:
        raise ValueError(f"k_max must be at least n*d = {win.n * win.d}")
    evidence = assumption_evidence(win)
    if not evidence.passed:
        raise AssumptionFailure(evidence)
    t = tau(win)
    gamma = [win.gamma(k) for k in range(win.k_max + 1)]
    mu = [win.mu(k) for k in range(win.k_max + 1)]
    nu = [win.nu(k) for k in range(win.k_max + 1)]

    last_report = None
    for attempt in range(3):
        y = generic_linear_form(win.n, seed + attempt)
        mu_t, mu_f = _split_window(win, y)
        tab = InvariantTable(
            n=win.n, d=win.d, k_max=win.k_max, tau=t,
            gamma=gamma, mu=mu, mu_torsion=mu_t, mu_free=mu_f, nu=nu,
            type_flag="", seed=seed + attempt,
        )
        report = verify_corollaries(tab)
        if report.ok:
            tab.type_flag = classify_type(tab)
            return tab
        last_report = report

    # final attempt: exact ranks everywhere, original seed
    win.force_exact()
    t = tau(win)
    mu = [win.mu(k) for k in range(win.k_max + 1)]
    nu = [win.nu(k) for k in range(win.k_max + 1)]
    y = generic_linear_form(win.n, seed)
    mu_t, mu_f = _split_window(win, y, exact=True)
    tab = InvariantTable(
        n=win.n, d=win.d, k_max=win.k_max, tau=t,
        gamma=gamma, mu=mu, mu_torsion=mu_t, mu_free=mu_f, nu=nu,
        type_flag="", seed=seed,
    )
    report = verify_corollaries(tab)
    if not report.ok:
        raise IdentityViolation(report.violations)
    tab.type_flag = classify_type(tab)
    return tab
