"""Deciding whether a configuration is the minimal-vector set of a form.

The iterative scheme: minimize lambda subject to A[v] = lambda on the
configuration and A[u] >= 1 on a growing finite pool of integer vectors.
Outcomes of each round either settle the question (lambda_opt >= 1, or a
positive definite optimum whose minimal vectors match) or contribute new
pool vectors (minimal-vector differences, kernel vectors of a singular
optimum, or an integer violator along a negative direction).

An accepted witness is exact: the returned form has minimum exactly 1
and its minimal-vector set is re-enumerated and compared bit-for-bit.
"""

from dataclasses import dataclass

import numpy

from . import ratlin
from .equiv import automorphism_group
from .errors import BudgetExhausted, NotWellRounded
from .forms import (
    QuadraticForm,
    VectorConfiguration,
    lll_reduce,
    minimal_vectors,
    normalize_pair,
    perfection_rank,
    sym_basis_indices,
)
from .lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    AffineFunc,
    LinearProgram,
    solve_exact,
    solve_with_float_presolve,
)
from .ratlin import QQ, quad_eval

REALIZABLE = "realizable"
NOT_REALIZABLE = "not_realizable"

DEFAULT_BUDGET = 200
DEFAULT_POOL_CAP = 20000


@dataclass
class ConstraintPool:
    """Finite set S of vectors with norm constraints; grows monotonically.

    Hard entries assert A[u] >= 1 (u can never be minimal); soft entries
    assert A[u] >= lambda, which holds for every nonzero integer vector
    and is used in the rank-preserving extension mode where u may yet
    join the configuration.
    """

    vectors: list  # normalized tuples, insertion-ordered for determinism
    index: set
    soft: set

    @classmethod
    def empty(cls):
        return cls([], set(), set())

    def add(self, v, hard=True):
        v = normalize_pair(v)
        if v in self.index:
            if hard and v in self.soft:
                self.soft.discard(v)
                return True
            return False
        self.vectors.append(v)
        self.index.add(v)
        if not hard:
            self.soft.add(v)
        return True

    def discard(self, v):
        if v in self.index:
            self.vectors.remove(v)
            self.index.discard(v)
            self.soft.discard(v)

    def __len__(self):
        return len(self.vectors)


@dataclass
class RealizabilityVerdict:
    status: str
    witness: QuadraticForm = None
    reason: str = ""
    dual: object = None
    iterations: int = 0
    pool_size: int = 0


def initial_pool(config: VectorConfiguration) -> ConstraintPool:
    """The default starting pool: x +- e_i +- e_j, minus 0 and +-V."""
    n = config.dim
    forbidden = set(config.vectors)
    pool = ConstraintPool.empty()
    cands = set()
    for x in config.vectors:
        for i in range(n):
            for j in range(n):
                for si in (1, -1):
                    for sj in (1, -1):
                        w = list(x)
                        w[i] += si
                        w[j] += sj
                        if any(w):
                            cands.add(normalize_pair(w))
    for w in sorted(cands):
        if w not in forbidden:
            pool.add(w)
    return pool


def symmetry_restrict(config: VectorConfiguration, group=None):
    """Basis of symmetric matrices invariant under the stabilizer of V.

    Falls back to the full standard basis when the configuration does not
    span (its stabilizer is infinite, so no finite averaging applies).
    Returns a list of integer symmetric matrices.
    """
    n = config.dim
    pairs = sym_basis_indices(n)
    if not config.is_well_rounded():
        return _standard_sym_basis(n)
    if group is None:
        group = automorphism_group(config)
    gens = [g for g in group.generators]
    if not gens:
        return _standard_sym_basis(n)
    # solve g^t A g = A for all generators, in sym coordinates
    rows = []
    for g in gens:
        gm = [list(r) for r in g]
        gt = ratlin.mat_transpose(gm)
        for (i, j) in pairs:
            # coefficient of A_(p,q) in (g^t A g - A)_(i,j)
            row = []
            for (p, q) in pairs:
                # A = E_pq + E_qp (p != q) or E_pp
                coeff = gt[i][p] * gm[q][j] - (1 if (p, q) == (i, j) else 0)
                if p != q:
                    coeff += gt[i][q] * gm[p][j]
                row.append(coeff)
            rows.append(row)
    kern = ratlin.integer_kernel_basis(rows)
    basis = []
    for vec in kern:
        m = [[0] * n for _ in range(n)]
        for c, (i, j) in zip(vec, pairs):
            m[i][j] = c
            m[j][i] = c
        basis.append(m)
    return basis


def _standard_sym_basis(n):
    basis = []
    for i, j in sym_basis_indices(n):
        m = [[0] * n for _ in range(n)]
        m[i][j] = 1
        m[j][i] = 1
        basis.append(m)
    return basis


def _build_lp(basis, config, pool):
    """min lambda  s.t.  A[v] = lambda on V;  A[u] >= 1 (hard) or
    A[u] >= lambda (soft) on the pool."""
    k = len(basis)
    eqs = []
    seen = set()
    for v in config.vectors:
        row = tuple(QQ(quad_eval(b, v)) for b in basis)
        if row in seen:
            continue
        seen.add(row)
        eqs.append(AffineFunc.make(list(row) + [-1], 0))
    ineqs = []
    seen = set()
    for u in pool.vectors:
        row = tuple(QQ(quad_eval(b, u)) for b in basis)
        key = (row, u in pool.soft)
        if key in seen:
            continue
        seen.add(key)
        if u in pool.soft:
            ineqs.append(AffineFunc.make(list(row) + [-1], 0))
        else:
            ineqs.append(AffineFunc.make(list(row) + [0], -1))
    obj = AffineFunc.make([0] * k + [1], 0)
    return LinearProgram(k + 1, obj, tuple(eqs), tuple(ineqs))


def _assemble(basis, x):
    n = len(basis[0])
    m = [[QQ(0)] * n for _ in range(n)]
    for c, b in zip(x, basis):
        if c == 0:
            continue
        for i in range(n):
            for j in range(n):
                m[i][j] += c * b[i][j]
    return m


def _equalities_force_zero(config):
    """True iff A[v] = lambda for v in V admits no solution with lambda=1."""
    n = config.dim
    pairs = sym_basis_indices(n)
    rows = []
    rhs = []
    for v in config.vectors:
        row = []
        for (p, q) in pairs:
            row.append(v[p] * v[q] if p == q else 2 * v[p] * v[q])
        rows.append(row)
        rhs.append(QQ(1))
    return ratlin.solve(rows, rhs) is None


def _span_tester(config):
    """Membership test for span{v v^t : v in V}, precomputed once.

    Vectors inside the span are exactly the rank-preserving candidates of
    the extension mode: adding them cannot raise the perfection rank.
    """
    pairs = sym_basis_indices(config.dim)
    from .forms import vectorize_projector

    rows, pivots = ratlin.rref(
        [vectorize_projector(v, pairs) for v in config.vectors]
    )
    rows = rows[: len(pivots)]

    def contains(u):
        vec = [QQ(x) for x in vectorize_projector(u, pairs)]
        for row, c in zip(rows, pivots):
            if vec[c] != 0:
                f = vec[c]
                vec = [a - f * b for a, b in zip(vec, row)]
        return all(x == 0 for x in vec)

    return contains


def _find_negative_violator(amat, lam):
    """Integer w with A[w] < lam along the most negative eigendirection.

    Double precision first, then mpmath with growing precision; the
    multiplier walk w_i = Near(i * w) is checked exactly at each step.
    """
    n = len(amat)

    def walk(wvec):
        for i in range(1, 65):
            w = tuple(int(round(i * c)) for c in wvec)
            if any(w) and quad_eval(amat, w) < lam:
                return normalize_pair(w)
        return None

    af = numpy.array([[float(x) for x in row] for row in amat])
    vals, vecs = numpy.linalg.eigh(af)
    got = walk([float(c) for c in vecs[:, 0]])
    if got is not None:
        return got
    import mpmath

    dps = 30
    while dps <= 2000:
        with mpmath.workdps(dps):
            mat = mpmath.matrix(
                [[mpmath.mpq(int(x.numerator), int(x.denominator)) for x in row]
                 for row in amat]
            )
            vals, vecs = mpmath.eigsy(mat)
            order = sorted(range(n), key=lambda i: vals[i])
            wvec = [float(vecs[i, order[0]]) for i in range(n)]
        got = walk(wvec)
        if got is not None:
            return got
        dps *= 2
    raise BudgetExhausted("no integer violator found up to precision cap")


class _Engine:
    """Shared loop for test_realizability and extend_to_realizable."""

    def __init__(
        self,
        config,
        budget=DEFAULT_BUDGET,
        pool_cap=DEFAULT_POOL_CAP,
        use_symmetry=True,
        use_presolve=True,
        absorb_rank_preserving=False,
    ):
        self.budget = budget
        self.pool_cap = pool_cap
        self.use_presolve = use_presolve
        self.absorb = absorb_rank_preserving
        # LLL pre-reduction, applied unconditionally
        self.reduced, self.p = lll_reduce(config)
        self.config = self.reduced
        self.use_symmetry = use_symmetry and self.config.is_well_rounded()
        self.basis = (
            symmetry_restrict(self.config)
            if self.use_symmetry
            else _standard_sym_basis(self.config.dim)
        )
        self.pool = initial_pool(self.config)
        self.iterations = 0
        self.target_rank = perfection_rank(self.config)
        self.in_span = _span_tester(self.config) if self.absorb else None
        if self.absorb:
            # rank-preserving pool vectors may yet join the configuration:
            # soften their constraints to A[u] >= lambda
            softened = ConstraintPool.empty()
            for u in self.pool.vectors:
                softened.add(u, hard=not self.in_span(u))
            self.pool = softened
            # doubled vectors bound lambda >= 1/4 from the start, which
            # keeps soft constraints effective (sound for any witness
            # rescaling; the plain mode appends them on demand instead)
            for v in self.config.vectors:
                self.pool.add(tuple(2 * x for x in v), hard=True)

    def _transport_back(self, amat):
        # witness for the reduced config; original needs A0 = P^t A P
        pm = [list(r) for r in self.p]
        return ratlin.mat_mul(
            ratlin.mat_transpose(pm), ratlin.mat_mul(amat, pm)
        )

    def _solve(self, lp):
        if self.use_presolve:
            return solve_with_float_presolve(lp)
        return solve_exact(lp)

    def run(self):
        cfg = self.config
        if cfg.s == 0:
            raise ValueError("empty configuration")
        if _equalities_force_zero(cfg):
            return RealizabilityVerdict(
                NOT_REALIZABLE,
                reason="equality system forces lambda = 0",
                iterations=0,
                pool_size=len(self.pool),
            )
        while True:
            self.iterations += 1
            if self.iterations > self.budget or len(self.pool) > self.pool_cap:
                raise BudgetExhausted(
                    f"undecided after {self.iterations - 1} iterations, "
                    f"pool size {len(self.pool)}"
                )
            lp = _build_lp(self.basis, cfg, self.pool)
            out = self._solve(lp)
            if out.status == INFEASIBLE:
                return RealizabilityVerdict(
                    NOT_REALIZABLE,
                    reason="pool constraints infeasible (lambda_opt >= 1)",
                    dual=out,
                    iterations=self.iterations,
                    pool_size=len(self.pool),
                )
            if out.status == UNBOUNDED:
                for v in cfg.vectors:
                    self.pool.add(tuple(2 * x for x in v))
                continue
            assert out.status == OPTIMAL
            lam = out.value
            if lam >= 1:
                return RealizabilityVerdict(
                    NOT_REALIZABLE,
                    reason="lambda_opt >= 1 over pool S",
                    dual=out,
                    iterations=self.iterations,
                    pool_size=len(self.pool),
                )
            amat = _assemble(self.basis, out.x[:-1])
            rank = ratlin.mat_rank(amat)
            n = cfg.dim
            if rank < n:
                added = False
                for kv in sorted(ratlin.integer_kernel_basis(amat)):
                    hard = not (self.absorb and self.in_span(kv))
                    added |= self.pool.add(kv, hard=hard)
                if not added:
                    raise BudgetExhausted("kernel vectors already pooled")
                continue
            if not ratlin.is_positive_definite(amat):
                w = _find_negative_violator(amat, lam)
                hard = not (self.absorb and self.in_span(w))
                if not self.pool.add(w, hard=hard):
                    raise BudgetExhausted("violator already pooled")
                continue
            form = QuadraticForm.from_rows(amat)
            _, mincfg = minimal_vectors(form)
            if mincfg.vectors == cfg.vectors:
                witness = QuadraticForm.from_rows(
                    self._transport_back(
                        [[x / lam for x in row] for row in amat]
                    )
                )
                return RealizabilityVerdict(
                    REALIZABLE,
                    witness=witness,
                    iterations=self.iterations,
                    pool_size=len(self.pool),
                )
            diff = [v for v in mincfg.vectors if v not in set(cfg.vectors)]
            if self.absorb:
                absorbed = [v for v in diff if self.in_span(v)]
                if absorbed:
                    cfg = cfg.union(absorbed)
                    self.config = cfg
                    # the span is unchanged, so the tester stays valid
                    for v in absorbed:
                        self.pool.discard(v)
                    if self.use_symmetry:
                        self.basis = symmetry_restrict(cfg)
                    diff = [v for v in diff if v not in set(absorbed)]
                    if not diff:
                        continue
            for v in diff:
                self.pool.add(v)


def test_realizability(
    config: VectorConfiguration,
    budget=DEFAULT_BUDGET,
    pool_cap=DEFAULT_POOL_CAP,
    use_symmetry=True,
    use_presolve=True,
) -> RealizabilityVerdict:
    """Decide Min(A) = V for some positive definite A, with certificate.

    Realizable verdicts carry a witness normalized to minimum exactly 1
    and re-verified by exhaustive minimal-vector enumeration; refutations
    carry the final LP certificate.  Raises BudgetExhausted if undecided.
    """
    engine = _Engine(
        config,
        budget=budget,
        pool_cap=pool_cap,
        use_symmetry=use_symmetry,
        use_presolve=use_presolve,
    )
    verdict = engine.run()
    if verdict.status == REALIZABLE:
        mini, mincfg = minimal_vectors(verdict.witness)
        if mini != 1 or mincfg.vectors != config.vectors:
            raise AssertionError("witness failed exact re-verification")
    return verdict


def extend_to_realizable(
    config: VectorConfiguration,
    budget=DEFAULT_BUDGET,
    pool_cap=DEFAULT_POOL_CAP,
    use_symmetry=True,
    use_presolve=True,
):
    """Smallest realizable W containing V with the same perfection rank.

    Returns the extended VectorConfiguration, or None when no realizable
    configuration of that rank contains V.  Rank-preserving minimal
    vectors of the LP optimum are absorbed into V; rank-increasing ones
    become constraints.
    """
    engine = _Engine(
        config,
        budget=budget,
        pool_cap=pool_cap,
        use_symmetry=use_symmetry,
        use_presolve=use_presolve,
        absorb_rank_preserving=True,
    )
    verdict = engine.run()
    if verdict.status != REALIZABLE:
        return None
    # map the final (reduced-coordinates) configuration back
    pinv = ratlin.mat_inverse([list(r) for r in engine.p])
    intinv = [[int(x) for x in row] for row in pinv]
    return engine.config.transform(intinv)
