"""Exact rational and integer dense linear algebra.

Everything here works on plain Python lists/tuples with gmpy2.mpq entries
(or ints, which mpq absorbs transparently).  Matrices are lists of row
lists.  No floating point anywhere; sizes are desk scale (n <= ~40), so
dense textbook algorithms are the right tool.
"""

from math import gcd, isqrt

from gmpy2 import mpq

QQ = mpq


def vec_dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def mat_vec(m, v):
    return [vec_dot(row, v) for row in m]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[vec_dot(row, col) for col in bt] for row in a]


def mat_transpose(m):
    return [list(row) for row in zip(*m)]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_copy(m):
    return [list(row) for row in m]


def mat_eq(a, b):
    return len(a) == len(b) and all(
        len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb))
        for ra, rb in zip(a, b)
    )


def mat_is_zero(m):
    return all(x == 0 for row in m for x in row)


def quad_eval(a, v):
    """v^t A v for a symmetric matrix A."""
    n = len(v)
    total = 0
    for i in range(n):
        vi = v[i]
        if vi == 0:
            continue
        row = a[i]
        total += vi * vi * row[i]
        for j in range(i + 1, n):
            if v[j]:
                total += 2 * vi * v[j] * row[j]
    return total


def rref(m, ncols=None):
    """Reduced row echelon form over QQ.

    Returns (R, pivots) where R is the echelon matrix (list of rows of mpq)
    and pivots the list of pivot column indices.
    """
    rows = [[QQ(x) for x in row] for row in m]
    nr = len(rows)
    nc = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def mat_rank(m):
    if not m:
        return 0
    _, pivots = rref(m)
    return len(pivots)


def solve(a, b):
    """Solve A x = b exactly; returns x or None if inconsistent.

    A need not be square; when underdetermined returns the particular
    solution with free variables set to 0.
    """
    nr = len(a)
    nc = len(a[0]) if nr else 0
    aug = [list(a[i]) + [b[i]] for i in range(nr)]
    rows, pivots = rref(aug, ncols=nc)
    # inconsistency: zero row with nonzero rhs
    for row in rows:
        if all(x == 0 for x in row[:nc]) and row[nc] != 0:
            return None
    x = [QQ(0)] * nc
    for r, c in enumerate(pivots):
        x[c] = rows[r][nc]
    return x


def mat_inverse(a):
    """Exact inverse of a square matrix; None if singular."""
    n = len(a)
    aug = [list(map(QQ, a[i])) + identity(n)[i] for i in range(n)]
    rows, pivots = rref(aug, ncols=n)
    if len(pivots) < n:
        return None
    return [row[n:] for row in rows]


def det(a):
    """Exact determinant (fraction-free Bareiss for integer input)."""
    n = len(a)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in a for x in row):
        return _det_bareiss([list(row) for row in a])
    m = [[QQ(x) for x in row] for row in a]
    sign = 1
    d = QQ(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            return QQ(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return sign * d


def _det_bareiss(m):
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = None
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    piv = i
                    break
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def kernel_basis(a):
    """Basis of the right kernel of A over QQ (list of mpq vectors)."""
    nr = len(a)
    nc = len(a[0]) if nr else 0
    rows, pivots = rref(a, ncols=nc)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [QQ(0)] * nc
        v[f] = QQ(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(v)
    return basis


def integer_kernel_basis(a):
    """Saturated integer basis of the right kernel of an integer matrix.

    Each rational kernel vector is scaled to a primitive integer vector;
    the result spans the kernel and is closed under saturation because the
    rref free-variable basis already has unit entries in the free slots.
    """
    basis = kernel_basis(a)
    out = []
    for v in basis:
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, int(x.denominator))
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, abs(x))
        if g > 1:
            w = [x // g for x in w]
        out.append(w)
    return out


def leading_principal_minors(a):
    """All leading principal minors of a square matrix, exact."""
    n = len(a)
    return [det([row[: k + 1] for row in a[: k + 1]]) for k in range(n)]


def is_positive_definite(a):
    """Sylvester criterion via one LDL^t pass (equivalent, O(n^3))."""
    n = len(a)
    m = [[QQ(x) for x in row] for row in a]
    for k in range(n):
        d = m[k][k]
        if d <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / d
            if f == 0:
                continue
            for j in range(k + 1, n):
                m[i][j] -= f * m[k][j]
    return True


def is_positive_semidefinite(a):
    """Exact psd test via LDL^t with symmetric pivoting.

    Works for singular matrices: at each step picks a nonzero diagonal
    pivot; if the remaining diagonal is zero but off-diagonals are not,
    the matrix is indefinite.
    """
    n = len(a)
    m = [[QQ(x) for x in row] for row in a]
    active = list(range(n))
    while active:
        piv = None
        for i in active:
            if m[i][i] != 0:
                piv = i
                break
        if piv is None:
            # zero diagonal on the active block: psd iff block is zero
            return all(m[i][j] == 0 for i in active for j in active)
        if m[piv][piv] < 0:
            return False
        d = m[piv][piv]
        active.remove(piv)
        for i in active:
            f = m[i][piv] / d
            if f == 0:
                continue
            for j in active:
                m[i][j] -= f * m[piv][j]
    return True


def ldl_decomposition(a):
    """A = L D L^t for symmetric positive definite A.

    Returns (L, diag) with L unit lower triangular (list of rows) and diag
    the list of positive pivots.  Raises ValueError if not pd.
    """
    n = len(a)
    l = identity(n)
    dvec = []
    m = [[QQ(x) for x in row] for row in a]
    for k in range(n):
        d = m[k][k]
        if d <= 0:
            raise ValueError("matrix is not positive definite")
        dvec.append(d)
        for i in range(k + 1, n):
            f = m[i][k] / d
            l[i][k] = f
            for j in range(k + 1, i + 1):
                m[i][j] -= f * m[j][k]
                if i != j:
                    m[j][i] = m[i][j]
    return l, dvec


def charpoly(a):
    """Characteristic polynomial coefficients of A, leading first.

    Faddeev-LeVerrier; exact.  Returns [1, c1, ..., cn] with
    det(xI - A) = x^n + c1 x^(n-1) + ... + cn.
    """
    n = len(a)
    coeffs = [QQ(1)]
    m = [[QQ(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A*M_{k-1} + c_{k-1}*I;  c_k = -tr(A*M_k)/k
        m = mat_mul(a, m)
        for i in range(n):
            m[i][i] += coeffs[-1]
        am = mat_mul(a, m)
        coeffs.append(-sum(am[i][i] for i in range(n)) / k)
    return coeffs


def adjugate(a):
    """Adjugate matrix: adj(A) = det(A) * A^{-1}, computed exactly.

    Defined for all square matrices via cofactors; for desk sizes the
    inverse route is used when det != 0, cofactors otherwise.
    """
    n = len(a)
    d = det(a)
    if d != 0:
        inv = mat_inverse(a)
        return [[x * d for x in row] for row in inv]
    out = [[QQ(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [a[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            out[j][i] = (-1) ** (i + j) * det(minor)
    return out


def floor_sqrt_rational(q):
    """floor(sqrt(q)) for a nonnegative rational q, exact."""
    q = QQ(q)
    if q < 0:
        raise ValueError("negative argument")
    num, den = int(q.numerator), int(q.denominator)
    return isqrt(num * den) // den


def ceil_sqrt_rational(q):
    """ceil(sqrt(q)) for a nonnegative rational q, exact."""
    f = floor_sqrt_rational(q)
    return f if QQ(f) * f == QQ(q) else f + 1


def primitive_vector(v):
    """Divide an integer vector by the gcd of its entries (0 stays 0)."""
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    if g <= 1:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def hnf_row_basis(vectors, n):
    """Row-style Hermite normal form basis of the lattice spanned by
    integer `vectors` inside (1/den)Z^n scaled to integers by the caller.

    Returns a list of r independent integer rows in echelon form.
    """
    rows = [list(map(int, v)) for v in vectors if any(v)]
    basis = []
    for c in range(n):
        rows = [r for r in rows if any(r)]
        col = [r for r in rows if r[c] != 0]
        if not col:
            continue
        while True:
            col.sort(key=lambda r: abs(r[c]))
            piv = col[0]
            done = True
            for r in col[1:]:
                q = r[c] // piv[c]
                for j in range(n):
                    r[j] -= q * piv[j]
                if r[c] != 0:
                    done = False
            col = [piv] + [r for r in col[1:] if r[c] != 0]
            if done or len(col) == 1:
                break
        piv = col[0]
        if piv[c] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        reduced = []
        for r in rows:
            if r is col[0]:
                continue
            if r[c] != 0:
                q = r[c] // piv[c]
                r = [x - q * y for x, y in zip(r, piv)]
            reduced.append(r)
        rows = reduced
    # reduce entries above pivots for canonicity
    for i in reversed(range(len(basis))):
        c = next(j for j in range(n) if basis[i][j] != 0)
        for k in range(i):
            if basis[k][c] != 0:
                q = basis[k][c] // basis[i][c]
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return basis
