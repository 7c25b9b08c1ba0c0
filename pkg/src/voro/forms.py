"""Quadratic forms, vector configurations, and their basic geometry.

All arithmetic is exact: forms carry gmpy2.mpq entries, configurations
carry plain ints.  A configuration stores one representative per pair
+-v, normalized so the first nonzero coordinate is positive, in
ascending lexicographic order; this fixes a deterministic serialization
for every downstream structure.
"""

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import DimensionMismatch, NotPositiveDefinite
from . import ratlin
from .ratlin import QQ, quad_eval


# ---------------------------------------------------------------------------
# pair normalization


def normalize_pair(v):
    """Representative of {v, -v} with positive first nonzero coordinate."""
    for x in v:
        if x != 0:
            return tuple(int(y) for y in v) if x > 0 else tuple(-int(y) for y in v)
    raise ValueError("zero vector has no pair representative")


def normalize_vectors(vectors):
    """Normalize, deduplicate and sort a family of nonzero vectors."""
    return tuple(sorted(set(normalize_pair(v) for v in vectors)))


@dataclass(frozen=True)
class VectorConfiguration:
    """A set of pairs +-v of integer vectors, canonically stored."""

    dim: int
    vectors: tuple

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dimension must be positive")
        for v in self.vectors:
            if len(v) != self.dim:
                raise DimensionMismatch("vector length differs from dim")
        norm = normalize_vectors(self.vectors)
        if norm != self.vectors:
            raise ValueError("vectors are not in canonical form")
        if len(set(self.vectors)) != len(self.vectors):
            raise ValueError("duplicate pair")

    @classmethod
    def from_vectors(cls, dim, vectors):
        return cls(dim, normalize_vectors(vectors))

    @property
    def s(self):
        return len(self.vectors)

    def rank(self):
        return ratlin.mat_rank([list(v) for v in self.vectors])

    def is_well_rounded(self):
        return self.rank() == self.dim

    def contains(self, v):
        return normalize_pair(v) in set(self.vectors)

    def union(self, other_vectors):
        return VectorConfiguration.from_vectors(
            self.dim, list(self.vectors) + [tuple(v) for v in other_vectors]
        )

    def transform(self, p):
        """Apply a matrix to every vector (columns convention)."""
        return VectorConfiguration.from_vectors(
            self.dim, [tuple(ratlin.mat_vec(p, v)) for v in self.vectors]
        )

    def basis_indices(self):
        """Indices of the first maximal independent subset, canonical order."""
        chosen = []
        rows = []
        for i, v in enumerate(self.vectors):
            cand = rows + [list(v)]
            if ratlin.mat_rank(cand) == len(cand):
                rows = cand
                chosen.append(i)
        return chosen


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric matrix with exact rational entries, A[v] = v^t A v."""

    dim: int
    entries: tuple

    def __post_init__(self):
        n = self.dim
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise DimensionMismatch("entries must be an n x n matrix")
        for i in range(n):
            for j in range(n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("matrix is not symmetric")

    @classmethod
    def from_rows(cls, rows):
        ent = tuple(tuple(QQ(x) for x in row) for row in rows)
        return cls(len(ent), ent)

    @classmethod
    def identity(cls, n):
        return cls.from_rows(ratlin.identity(n))

    def matrix(self):
        return [list(row) for row in self.entries]

    def is_positive_definite(self):
        """Certified by all leading principal minors being > 0."""
        return ratlin.is_positive_definite(self.matrix())

    def scale(self, c):
        c = QQ(c)
        return QuadraticForm.from_rows(
            [[x * c for x in row] for row in self.entries]
        )

    def transform(self, p):
        """Transport along v |-> P v, so the new form is P^-t A P^-1."""
        pinv = ratlin.mat_inverse([list(r) for r in p])
        if pinv is None:
            raise ValueError("transform matrix is singular")
        m = ratlin.mat_mul(
            ratlin.mat_transpose(pinv), ratlin.mat_mul(self.matrix(), pinv)
        )
        return QuadraticForm.from_rows(m)


def evaluate_form(a: QuadraticForm, v) -> mpq:
    """v^t A v, exactly."""
    if len(v) != a.dim:
        raise DimensionMismatch("vector length differs from form dimension")
    return quad_eval(a.matrix(), v)


# ---------------------------------------------------------------------------
# LLL reduction (exact, Gram-based)


def lll_reduce_gram(gram, delta=QQ(3, 4)):
    """LLL-reduce a positive definite Gram matrix exactly.

    Returns (gram', U) with U unimodular and gram' = U * gram * U^t.
    """
    n = len(gram)
    g = [[QQ(x) for x in row] for row in gram]
    u = ratlin.identity(n)

    def gso():
        # mu[i][j] for j < i, b[i] = |b_i*|^2, from the current Gram
        mu = [[QQ(0)] * n for _ in range(n)]
        b = [QQ(0)] * n
        for i in range(n):
            for j in range(i):
                t = g[i][j]
                for k in range(j):
                    t -= mu[j][k] * mu[i][k] * b[k]
                mu[i][j] = t / b[j]
            t = g[i][i]
            for k in range(i):
                t -= mu[i][k] * mu[i][k] * b[k]
            b[i] = t
        return mu, b

    def addrow(i, j, q):
        # b_i <- b_i - q b_j
        if q == 0:
            return
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]
        for k in range(n):
            g[i][k] -= q * g[j][k]
        for k in range(n):
            g[k][i] -= q * g[k][j]

    def swaprow(i, j):
        u[i], u[j] = u[j], u[i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    mu, b = gso()
    k = 1
    while k < n:
        # size-reduce row k
        for j in reversed(range(k)):
            if 2 * abs(mu[k][j]) > 1:
                q = _nearest_int(mu[k][j])
                addrow(k, j, q)
                mu, b = gso()
        if b[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1]:
            k += 1
        else:
            swaprow(k, k - 1)
            mu, b = gso()
            k = max(k - 1, 1)
    return g, u


def _nearest_int(q):
    """Nearest integer to a rational (ties toward floor + 1/2 rounding up)."""
    num, den = q.numerator, q.denominator
    return int((2 * num + den) // (2 * den))


def lll_reduce(config: VectorConfiguration):
    """Reduce a configuration by LLL on its barycenter form.

    Returns (config', P) with P unimodular and config' = P * config.
    """
    b = barycenter_matrix(config).matrix
    if not ratlin.is_positive_definite(b):
        # rank-deficient configurations: reduce on B + I to stay pd
        b = [
            [x + (1 if i == j else 0) for j, x in enumerate(row)]
            for i, row in enumerate(b)
        ]
    _, u = lll_reduce_gram(b)
    reduced = config.transform(u)
    return reduced, u


# ---------------------------------------------------------------------------
# minimal vectors (Fincke-Pohst with exact bounds)


def short_vectors(a: QuadraticForm, bound):
    """All pairs +-v, v != 0, with A[v] <= bound (exact, exhaustive).

    Returns a list of (norm, vector) with normalized representatives,
    sorted by (norm, vector).  The form must be positive definite.
    """
    bound = QQ(bound)
    n = a.dim
    if bound < 0:
        return []
    # reduce for enumeration efficiency; x_original = U^t x_reduced
    gred, u = lll_reduce_gram(a.matrix())
    ut = ratlin.mat_transpose(u)
    l, d = ratlin.ldl_decomposition(gred)

    # columns of L below the diagonal drive the center shifts
    out = []
    x = [0] * n

    def recurse(k, remaining):
        # remaining = bound - sum_{j>k} d_j y_j^2
        if k < 0:
            if any(x):
                v = tuple(ratlin.mat_vec(ut, x))
                out.append((bound - remaining, normalize_pair(v)))
            return
        c = QQ(0)
        for i in range(k + 1, n):
            if x[i]:
                c += l[i][k] * x[i]
        # |x_k + c| <= sqrt(remaining/d_k); pad by one and test exactly
        sf = ratlin.floor_sqrt_rational(remaining / d[k]) + 1
        lo = _ceil_q(-sf - c)
        hi = _floor_q(sf - c)
        for xk in range(lo, hi + 1):
            y = xk + c
            t = d[k] * y * y
            if t <= remaining:
                x[k] = xk
                recurse(k - 1, remaining - t)
        x[k] = 0

    recurse(n - 1, bound)
    # norms recomputed against the original form to keep output exact
    dedup = {}
    for norm, v in out:
        dedup[v] = norm
    res = sorted((norm, v) for v, norm in dedup.items())
    return res


def _floor_q(q):
    q = QQ(q)
    return int(q.numerator // q.denominator)


def _ceil_q(q):
    q = QQ(q)
    return -int((-q.numerator) // q.denominator)


def minimal_vectors(a: QuadraticForm):
    """Minimum and full minimal configuration of a positive definite form.

    The search covers the whole ellipsoid A[v] <= min(diagonal), which
    contains every minimal vector, so the result is certified exhaustive.
    """
    if not a.is_positive_definite():
        raise NotPositiveDefinite("minimal vectors need a positive definite form")
    b0 = min(a.entries[i][i] for i in range(a.dim))
    cands = short_vectors(a, b0)
    m = min(norm for norm, _ in cands)
    config = VectorConfiguration.from_vectors(
        a.dim, [v for norm, v in cands if norm == m]
    )
    return m, config


# ---------------------------------------------------------------------------
# barycenter and perfection


@dataclass(frozen=True)
class BarycenterMatrix:
    """B = T T^t for the n x s matrix T of configuration representatives."""

    dim: int
    matrix: tuple

    def is_positive_definite(self):
        return ratlin.is_positive_definite([list(r) for r in self.matrix])


def barycenter_matrix(config: VectorConfiguration) -> BarycenterMatrix:
    n = config.dim
    b = [[0] * n for _ in range(n)]
    for v in config.vectors:
        for i in range(n):
            if v[i]:
                for j in range(n):
                    b[i][j] += v[i] * v[j]
    return BarycenterMatrix(n, tuple(tuple(row) for row in b))


def sym_basis_indices(n):
    """Index pairs (i, j), i <= j, for vectorized symmetric matrices."""
    return [(i, j) for i in range(n) for j in range(i, n)]


def vectorize_projector(v, pairs=None):
    """vec(v v^t) restricted to upper-triangle coordinates."""
    n = len(v)
    if pairs is None:
        pairs = sym_basis_indices(n)
    return [v[i] * v[j] for i, j in pairs]


@dataclass(frozen=True)
class PerfectionData:
    rank: int
    relations: tuple  # integer kernel basis, one coefficient per vector


def perfection_data(config: VectorConfiguration) -> PerfectionData:
    """Rank of {v v^t} and an integer basis of its relation space."""
    if config.s == 0:
        raise ValueError("configuration is empty")
    pairs = sym_basis_indices(config.dim)
    cols = [vectorize_projector(v, pairs) for v in config.vectors]
    # relations: lambda with sum lambda_v vec(v v^t) = 0
    mat = ratlin.mat_transpose(cols)
    kernel = ratlin.integer_kernel_basis(mat)
    rank = config.s - len(kernel)
    return PerfectionData(rank, tuple(tuple(k) for k in kernel))


def perfection_rank(config: VectorConfiguration) -> int:
    pairs = sym_basis_indices(config.dim)
    return ratlin.mat_rank([vectorize_projector(v, pairs) for v in config.vectors])


def relation_span_condition(config: VectorConfiguration, relation) -> bool:
    """Positive and negative supports of a relation span the same subspace."""
    pos = [list(config.vectors[i]) for i, c in enumerate(relation) if c > 0]
    neg = [list(config.vectors[i]) for i, c in enumerate(relation) if c < 0]
    rp = ratlin.mat_rank(pos)
    rn = ratlin.mat_rank(neg)
    return rp == rn == ratlin.mat_rank(pos + neg)


def is_perfect(a: QuadraticForm) -> bool:
    """True iff the minimal configuration spans the full symmetric space."""
    if not a.is_positive_definite():
        raise NotPositiveDefinite("perfection test needs a positive definite form")
    _, config = minimal_vectors(a)
    return perfection_rank(config) == a.dim * (a.dim + 1) // 2


# ---------------------------------------------------------------------------
# sublattice codes and Watson's identity


@dataclass(frozen=True)
class SublatticeCode:
    """Word (a_1..a_n) mod d for the lattice <e_1..e_n, (sum a_i e_i)/d>."""

    modulus: int
    word: tuple

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if not self.word:
            raise ValueError("empty word")

    @property
    def length(self):
        return len(self.word)

    def is_normalized(self):
        w = self.word
        if list(w) != sorted(w):
            return False
        if any(x < 0 or x > self.modulus // 2 for x in w):
            return False
        return all(x >= 0 for x in w) and any(x > 0 for x in w)

    def normalized_word(self):
        return fold_word(self.word, self.modulus)


def fold_word(word, d):
    """Reduce entries mod d to 0..floor(d/2) and sort ascending."""
    out = []
    for x in word:
        x %= d
        out.append(min(x, d - x))
    return tuple(sorted(out))


def code_lattice_basis(code: SublatticeCode):
    """Integer HNF rows spanning d*L for L = Z^n + Z*(word/d)."""
    n = code.length
    d = code.modulus
    gens = [[d if i == j else 0 for j in range(n)] for i in range(n)]
    gens.append([x % d for x in code.word])
    return ratlin.hnf_row_basis(gens, n)


def code_to_configuration(code: SublatticeCode) -> VectorConfiguration:
    """Express {e_i} in a basis of the code's lattice.

    The result is an integer configuration with |det| = d whose
    realizability decides admissibility of the code.
    """
    n = code.length
    d = code.modulus
    rows = code_lattice_basis(code)
    if len(rows) != n:
        raise ValueError("degenerate code lattice")
    rinv = ratlin.mat_inverse(rows)
    vecs = []
    for i in range(n):
        # column basis matrix is rows^t / d, so e_i gets d * (row i of H^-1)
        x = [d * rinv[i][j] for j in range(n)]
        vecs.append(tuple(int(c) for c in x))
    return VectorConfiguration.from_vectors(n, vecs)


def watson_identity_check(a: QuadraticForm, code: SublatticeCode):
    """Evaluate both sides of Watson's identity on (A, code), exactly.

    Returns a dict with lhs, rhs, sum_abs, bound_ok (sum >= 2d) and
    shorter_index: the first i with N(e'_i) < N(e_i), if any.  lhs == rhs
    always holds; a violated bound forces some e'_i strictly shorter.
    """
    if code.length != a.dim:
        raise DimensionMismatch("code length differs from form dimension")
    d = code.modulus
    word = [int(x) for x in code.word]
    amat = a.matrix()
    e_norm = QQ(quad_eval(amat, word)) / (d * d)
    sum_abs = sum(abs(x) for x in word)
    lhs = (QQ(sum_abs) - 2 * d) * e_norm
    rhs = QQ(0)
    shorter = None
    av = ratlin.mat_vec(amat, word)
    for i, ai in enumerate(word):
        if ai == 0:
            continue
        sgn = 1 if ai > 0 else -1
        # N(e'_i) = N(e) - 2 sgn (e . e_i) + N(e_i), e . e_i = (A word)_i / d
        ni = amat[i][i]
        npr = e_norm - 2 * sgn * av[i] / d + ni
        rhs += abs(ai) * (npr - ni)
        if shorter is None and npr < ni:
            shorter = i
    return {
        "lhs": lhs,
        "rhs": rhs,
        "sum_abs": sum_abs,
        "bound_ok": sum_abs >= 2 * d,
        "shorter_index": shorter,
    }


# ---------------------------------------------------------------------------
# characteristic determinants


def characteristic_determinants(config: VectorConfiguration, basis_idx, max_minor=4):
    """Minors of the coefficient matrix of the non-basis vectors.

    basis_idx selects n independent vectors; the remaining t vectors are
    expressed on them and all m x m minors with m <= min(t, n, max_minor)
    are returned as {m: sorted list of exact values}.
    """
    n = config.dim
    if len(basis_idx) != n:
        raise ValueError("need exactly n basis indices")
    bmat = ratlin.mat_transpose([list(config.vectors[i]) for i in basis_idx])
    if ratlin.det(bmat) == 0:
        raise ValueError("indexed vectors are dependent")
    binv = ratlin.mat_inverse(bmat)
    others = [i for i in range(config.s) if i not in set(basis_idx)]
    coeff = [ratlin.mat_vec(binv, list(config.vectors[i])) for i in others]
    t = len(coeff)
    from itertools import combinations

    result = {}
    for m in range(1, min(t, n, max_minor) + 1):
        vals = []
        for rows in combinations(range(t), m):
            for cols in combinations(range(n), m):
                sub = [[coeff[r][c] for c in cols] for r in rows]
                vals.append(ratlin.det(sub))
        result[m] = sorted(vals)
    return result


def gram_of_config(config: VectorConfiguration, a: QuadraticForm):
    """Gram matrix of the configuration vectors under a form."""
    amat = a.matrix()
    vs = [list(v) for v in config.vectors]
    av = [ratlin.mat_vec(amat, v) for v in vs]
    return [[ratlin.vec_dot(v, w) for w in av] for v in vs]


def config_det(config: VectorConfiguration, basis_idx=None):
    """|det| of n chosen independent vectors (the sublattice index)."""
    if basis_idx is None:
        basis_idx = config.basis_indices()
        if len(basis_idx) != config.dim:
            raise ValueError("configuration does not span")
    m = [list(config.vectors[i]) for i in basis_idx]
    return abs(int(ratlin.det(m)))
