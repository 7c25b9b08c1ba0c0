"""Integer homology of the assembled complexes via Smith normal form.

Desk-scale matrices (a few hundred columns), so plain exact elimination
with a modular-rank cross-check is the right tool.  Reports always show
the raw groups and the view modulo the class S_b of finite groups whose
order has only prime factors <= b, because that is where the structural
statements live.
"""

from dataclasses import dataclass, field
from math import gcd

from .errors import DifferentialSanityFailed
from .voronoi import VoronoiComplexData, verify_dd_zero


@dataclass(frozen=True)
class SmithForm:
    divisors: tuple  # elementary divisors d1 | d2 | ..., all positive

    @property
    def rank(self):
        return len(self.divisors)


def smith_normal_form(matrix) -> SmithForm:
    """Elementary divisors of an integer matrix, exact.

    Input: dense list of rows (or a dict {(i, j): value} plus shape via
    `smith_normal_form_sparse`).  Pivoting on the smallest nonzero entry
    keeps growth tame at this scale; the divisibility chain is enforced
    at the end.
    """
    m = [list(map(int, row)) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    divisors = []
    top = 0
    while True:
        piv = None
        best = None
        for i in range(top, rows):
            for j in range(top, cols):
                v = abs(m[i][j])
                if v and (best is None or v < best):
                    best = v
                    piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        m[top], m[i0] = m[i0], m[top]
        for r in m:
            r[top], r[j0] = r[j0], r[top]
        # clear row and column by division steps
        while True:
            p = m[top][top]
            dirty = False
            for i in range(top + 1, rows):
                if m[i][top]:
                    q = m[i][top] // p
                    m[i] = [a - q * b for a, b in zip(m[i], m[top])]
                    if m[i][top]:
                        m[top], m[i] = m[i], m[top]
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(top + 1, cols):
                if m[top][j]:
                    q = m[top][j] // p
                    for i in range(top, rows):
                        m[i][j] -= q * m[i][top]
                    if m[top][j]:
                        for i in range(top, rows):
                            m[i][top], m[i][j] = m[i][j], m[i][top]
                        dirty = True
                        break
            if not dirty:
                break
        divisors.append(abs(m[top][top]))
        top += 1
        if top >= rows or top >= cols:
            break
    # enforce the divisibility chain
    k = len(divisors)
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            a, b = divisors[i], divisors[i + 1]
            if b % a != 0:
                g = gcd(a, b)
                lcm = a // g * b
                divisors[i], divisors[i + 1] = g, lcm
                changed = True
    return SmithForm(tuple(divisors))


def sparse_to_dense(entries, rows, cols):
    m = [[0] * cols for _ in range(rows)]
    for (i, j), v in entries.items():
        m[i][j] = v
    return m


def _rank_mod_p(matrix, p):
    m = [[x % p for x in row] for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    rank = 0
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        rank += 1
        r += 1
        if r == rows:
            break
    return rank


def smith_with_check(matrix) -> SmithForm:
    """SNF plus rank agreement with modular ranks at two large primes."""
    snf = smith_normal_form(matrix)
    if matrix and matrix[0]:
        for p in (1000003, 999983):
            mod_rank = _rank_mod_p(matrix, p)
            snf_rank = sum(1 for d in snf.divisors if d % p != 0)
            if mod_rank != snf_rank:
                raise ArithmeticError("SNF rank disagrees with modular rank")
    return snf


def factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass
class HomologyGroup:
    rank_grading: int  # perfection rank r (cone dimension)
    free_rank: int
    torsion: dict  # prime -> total multiplicity over all divisors
    filtered_free_rank: int = 0
    filtered_torsion: dict = field(default_factory=dict)

    def is_zero(self, filtered=False):
        if filtered:
            return self.filtered_free_rank == 0 and not self.filtered_torsion
        return self.free_rank == 0 and not self.torsion


@dataclass
class HomologyReport:
    dim: int
    bound: int
    groups: list  # HomologyGroup per rank

    def nonzero_filtered(self):
        return [g for g in self.groups if not g.is_zero(filtered=True)]


def torsion_prime_bound(dim: int) -> int:
    """Stabilizer orders only involve primes <= dim + 1."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    return dim + 1


def homology_of_complex(data: VoronoiComplexData, bound=None) -> HomologyReport:
    """H_r = ker d_r / im d_{r+1} for every rank, raw and modulo S_b."""
    if not verify_dd_zero(data):
        raise DifferentialSanityFailed("d o d != 0")
    if bound is None:
        bound = torsion_prime_bound(data.dim)
    groups = []
    for r in data.ranks:
        dim_vr = len(data.sigma_cells.get(r, []))
        d_r = data.dense(r)
        rank_dr = smith_with_check(d_r).rank if d_r and d_r[0] else 0
        if r + 1 in data.ranks:
            d_next = data.dense(r + 1)
        else:
            d_next = []
        if d_next and d_next[0]:
            snf_next = smith_with_check(d_next)
            rank_next = snf_next.rank
            torsion_divs = [d for d in snf_next.divisors if d != 1]
        else:
            rank_next = 0
            torsion_divs = []
        free_rank = dim_vr - rank_dr - rank_next
        torsion = {}
        for d in torsion_divs:
            for p, k in factorize(d).items():
                torsion[p] = torsion.get(p, 0) + k
        filtered = {p: k for p, k in torsion.items() if p > bound}
        groups.append(
            HomologyGroup(
                rank_grading=r,
                free_rank=free_rank,
                torsion=torsion,
                filtered_free_rank=free_rank,
                filtered_torsion=filtered,
            )
        )
    return HomologyReport(data.dim, bound, groups)
