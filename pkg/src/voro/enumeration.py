"""Enumeration of class representatives: perfect forms, rank-n classes
via sublattice codes, and higher perfection ranks via cover pairs.

Three engines cooperate here:

* a prefix-pruned stream of normalized Z/pZ code words whose lattices
  carry the candidate configurations with s = n;
* the Ryshkov-polyhedron walk: vertices are perfect forms, edges are
  Voronoi steps along non-psd directions; restricted to the face fixed
  by a configuration V it enumerates all perfect forms above V, which
  yields every configuration covering V in the cell ordering;
* the pair extension for rank r >= n + 2: covers of every rank r-2
  class are read off the facets of the rank r-1 layer, and each union
  of two covers is pushed through extend_to_realizable.

Everything is deterministic: streams are ordered, dedup keys are
canonical, and layers come out sorted by fingerprint.
"""

from dataclasses import dataclass
from math import gcd, isqrt

from . import ratlin
from .equiv import are_equivalent, automorphism_group, config_orbit, fingerprint
from .errors import BudgetExhausted, IncompleteInput, NotWellRounded
from .forms import (
    QuadraticForm,
    SublatticeCode,
    VectorConfiguration,
    code_to_configuration,
    minimal_vectors,
    normalize_pair,
    perfection_rank,
    sym_basis_indices,
)
from .ratlin import QQ, quad_eval
from .realize import (
    REALIZABLE,
    extend_to_realizable,
    test_realizability,
)
from .voronoi import Cell, RankLayer, faces_of_cell


# ---------------------------------------------------------------------------
# Hermite constants and index bounds


@dataclass(frozen=True)
class HermiteBoundTable:
    """gamma_n^n exactly for n <= 8, published upper bounds above."""

    exact: dict
    upper_gamma: dict  # upper bounds on gamma_n itself

    def gamma_power(self, n):
        if n in self.exact:
            return QQ(self.exact[n])
        if n in self.upper_gamma:
            return QQ(self.upper_gamma[n]) ** n
        raise ValueError(f"no Hermite data for dimension {n}")

    def index_bound(self, n):
        """floor(sqrt(gamma_n^n)), the determinant bound for s = n."""
        g = self.gamma_power(n)
        num, den = int(g.numerator), int(g.denominator)
        return isqrt(num // den if den == 1 else num * den) // (
            den if den != 1 else 1
        )


HERMITE = HermiteBoundTable(
    exact={
        1: QQ(1),
        2: QQ(4, 3),
        3: QQ(2),
        4: QQ(4),
        5: QQ(8),
        6: QQ(64, 3),
        7: QQ(64),
        8: QQ(256),
    },
    # linear-programming bounds: gamma_9 <= 2.1327, gamma_10 <= 2.2637
    upper_gamma={9: QQ(21327, 10000), 10: QQ(22637, 10000)},
)


def index_bound(n):
    return HERMITE.index_bound(n)


def _primes_up_to(m):
    sieve = [True] * (m + 1)
    out = []
    for p in range(2, m + 1):
        if sieve[p]:
            out.append(p)
            for q in range(p * p, m + 1, p):
                sieve[q] = False
    return out


# ---------------------------------------------------------------------------
# code words


def fold_mod(x, p):
    x %= p
    return min(x, p - x)


def is_lexmin_word(word, p):
    """word (sorted, folded) is minimal among its nonzero scalar multiples."""
    for k in range(2, p):
        cand = sorted(fold_mod(k * a, p) for a in word)
        if tuple(cand) < tuple(word):
            return False
    return True


def enumerate_codes_prime(n, p, prefix_pruning=True):
    """Stream of normalized lexicographically minimal words of length n.

    Entries are sorted ascending in 0..floor(p/2) with at least two
    nonzero entries (support-1 words lift to imprimitive vectors and are
    never realizable).  Prefix pruning relies on minimality of prefixes
    and is cross-checked against brute force in the tests.
    """
    half = p // 2
    word = []

    def rec(pos, support):
        if pos == n:
            if support >= 2:
                yield SublatticeCode(p, tuple(word))
            return
        lo = word[-1] if word else 0
        for a in range(lo, half + 1):
            word.append(a)
            ok = True
            if prefix_pruning and a > 0:
                ok = is_lexmin_word(word, p)
            if ok:
                yield from rec(pos + 1, support + (1 if a else 0))
            word.pop()

    yield from rec(0, 0)


def count_codes_prime(n, p):
    return sum(1 for _ in enumerate_codes_prime(n, p))


# ---------------------------------------------------------------------------
# Ryshkov walk primitives


def _min_and_config(amat):
    form = QuadraticForm.from_rows(amat)
    return minimal_vectors(form)


def _is_psd(mat):
    return ratlin.is_positive_semidefinite(mat)


def voronoi_step(amat, dmat, step_cap=200):
    """Largest t with min(A + tD) >= 1, plus the boundary form.

    Preconditions: min(A) = 1 exactly, D[v] >= 0 for all v in Min(A), D
    not positive semidefinite.  Returns (t, A + tD) with the new form of
    minimum exactly 1 and a strictly larger tight span.
    """
    n = len(amat)

    def at(t):
        return [
            [amat[i][j] + t * dmat[i][j] for j in range(n)] for i in range(n)
        ]

    # find an infeasible t to start the tightening loop
    t_hi = QQ(1)
    for _ in range(200):
        m = at(t_hi)
        if ratlin.is_positive_definite(m):
            mn, _cfg = _min_and_config(m)
            if mn >= 1:
                t_hi *= 2
                continue
        break
    else:
        raise BudgetExhausted("direction looks unbounded (is D psd?)")

    t = t_hi
    for _ in range(step_cap):
        m = at(t)
        lowered = []
        if ratlin.is_positive_definite(m):
            mn, cfg = _min_and_config(m)
            if mn >= 1:
                return t, m
            lowered = [v for v in cfg.vectors if quad_eval(m, v) < 1]
        else:
            # pull kernel or negative vectors below norm 1
            if ratlin.mat_rank(m) < n:
                lowered = [tuple(v) for v in ratlin.integer_kernel_basis(m)]
            else:
                from .realize import _find_negative_violator

                lowered = [_find_negative_violator(m, QQ(1))]
        t_new = t
        for u in lowered:
            du = quad_eval(dmat, u)
            au = quad_eval(amat, u)
            if du < 0:
                cand = (1 - au) / du
                if cand < t_new:
                    t_new = cand
            elif au + t * du < 1:
                raise AssertionError("violator with D[u] >= 0 contradicts min(A)=1")
        if t_new == t:
            raise AssertionError("no progress in voronoi step")
        t = t_new
    raise BudgetExhausted("voronoi step did not converge")


def _sym_to_entry_rows(n):
    return sym_basis_indices(n)


def _direction_from_coords(coords, pairs, n):
    """Integer symmetric matrix from upper-triangle coordinates."""
    m = [[0] * n for _ in range(n)]
    for c, (i, j) in zip(coords, pairs):
        m[i][j] = int(c)
        m[j][i] = int(c)
    return m


def _pairing_row(v, pairs):
    """Row such that row . (D upper-tri coords) == D[v]."""
    return [
        v[i] * v[j] if i == j else 2 * v[i] * v[j] for (i, j) in pairs
    ]


def climb_to_vertex(amat, step_cap=200):
    """Walk up to a perfect form keeping the current tight set tight.

    min(A) must be exactly 1; every step strictly enlarges the span of
    the tight projectors, so at most dim Sym_n steps happen.
    """
    n = len(amat)
    pairs = _sym_to_entry_rows(n)
    full = len(pairs)
    for _ in range(full + 1):
        mn, cfg = _min_and_config(amat)
        if mn != 1:
            raise ValueError("climb needs minimum exactly 1")
        rows = [_pairing_row(v, pairs) for v in cfg.vectors]
        if ratlin.mat_rank(rows) == full:
            return amat, cfg
        kern = ratlin.integer_kernel_basis(rows)
        d = _direction_from_coords(kern[0], pairs, n)
        if _is_psd(d):
            d = [[-x for x in row] for row in d]
        _t, amat = voronoi_step(amat, d)
    raise BudgetExhausted("climb did not reach a perfect form")


def perfect_neighbors(amat, min_config):
    """Contiguous perfect forms, one per facet orbit of the domain.

    A perfect cone spans the whole symmetric space, so upper-triangle
    entries of v v^t serve directly as ray coordinates, and a facet
    normal y lifts to the direction D = (2 y_ii ; y_ij), which satisfies
    D[v] = 2 <y, ray(v)>.  Equivalent facets give equivalent neighbors,
    so facet orbit representatives suffice for the walk.
    """
    from .adm import SymmetricCone, facet_orbit_reps

    n = len(amat)
    pairs = _sym_to_entry_rows(n)
    rays = [
        tuple(v[i] * v[j] for (i, j) in pairs) for v in min_config.vectors
    ]
    cone = SymmetricCone(rays, min_config)
    out = []
    for normal, _tight in facet_orbit_reps(cone):
        d = [[0] * n for _ in range(n)]
        for y, (i, j) in zip(normal, pairs):
            if i == j:
                d[i][i] = 2 * y
            else:
                d[i][j] = y
                d[j][i] = y
        if _is_psd(d):
            continue  # boundary facet, no neighbor
        _t, nb = voronoi_step(amat, d)
        out.append(nb)
    return out


def _scale_int(vec):
    den = 1
    for x in vec:
        d = int(x.denominator)
        den = den * d // gcd(den, d)
    out = [int(x * den) for x in vec]
    g = 0
    for x in out:
        g = gcd(g, abs(x))
    if g > 1:
        out = [x // g for x in out]
    return tuple(out)


def enumerate_perfect_forms(n, max_classes=100000):
    """All perfect forms of rank n up to equivalence (Voronoi's walk).

    Returns a list of (QuadraticForm, Cell); forms are normalized to
    minimum exactly 1 and classes are certified perfect.
    """
    if n == 1:
        form = QuadraticForm.from_rows([[1]])
        cfg = VectorConfiguration.from_vectors(1, [(1,)])
        return [(form, Cell.make(cfg))]
    seed = [
        [QQ(1) if i == j else QQ(1, 2) for j in range(n)] for i in range(n)
    ]
    amat, cfg = climb_to_vertex(seed)
    reps = []
    queue = [(amat, cfg)]
    seen = []  # (fingerprint, config)
    seen.append((fingerprint(cfg), cfg))
    while queue:
        amat, cfg = queue.pop(0)
        reps.append((QuadraticForm.from_rows(amat), cfg))
        if len(reps) > max_classes:
            raise BudgetExhausted("perfect class cap exceeded")
        for nb in perfect_neighbors(amat, cfg):
            _mn, nbcfg = _min_and_config(nb)
            fp = fingerprint(nbcfg)
            known = False
            for fp2, cfg2 in seen:
                if fp == fp2 and are_equivalent(cfg2, nbcfg) is not None:
                    known = True
                    break
            if not known:
                seen.append((fp, nbcfg))
                queue.append((nb, nbcfg))
    out = []
    for form, cfg in reps:
        out.append((form, Cell.make(cfg)))
    out.sort(key=lambda p: p[1].sort_key())
    return out


# ---------------------------------------------------------------------------
# perfect forms above a configuration (vertices of the Ryshkov face F_V)


def _face_edge_directions(vertex_config, fixed_config, pairs, n):
    """Edge directions of the Ryshkov face at a vertex, up to symmetry.

    The tangent cone is {D : D[u] >= 0 on the vertex's minimal vectors,
    D[v] = 0 on the fixed configuration}; its extreme rays are the facet
    normals of the polar cone spanned by the reduced pairing rows, which
    is enumerated orbitwise with the vertex stabilizer fixing V.
    """
    from .adm import SymmetricCone, facet_orbit_reps

    eq_rows = [_pairing_row(v, pairs) for v in fixed_config.vectors]
    null = ratlin.integer_kernel_basis(eq_rows)
    if not null:
        return []
    fixed_set = set(fixed_config.vectors)
    marks = [
        i for i, v in enumerate(vertex_config.vectors) if v in fixed_set
    ]
    rows = []
    labels = []
    for i, u in enumerate(vertex_config.vectors):
        pr = _pairing_row(u, pairs)
        red = [ratlin.vec_dot(pr, col) for col in null]
        if any(x != 0 for x in red):
            rows.append(_scale_int(red))
            labels.append(i)
    cone = SymmetricCone(
        rows, vertex_config, labels=labels, outer_marks=(tuple(marks),)
    )
    out = []
    for normal, _tight in facet_orbit_reps(cone):
        # normal is an extreme ray of the tangent cone in reduced coords
        full = [
            sum(normal[k] * null[k][j] for k in range(len(null)))
            for j in range(len(pairs))
        ]
        out.append(_direction_from_coords(full, pairs, n))
    return out


def perfect_forms_above(config: VectorConfiguration, budget=200):
    """Vertices of F_V = {A : A[u] >= 1, A[v] = 1 on V}, modulo Stab(V).

    These are the perfect forms whose minimal vectors contain V; the walk
    stays on the face, so directions keep every vector of V tight.
    """
    verdict = test_realizability(config, budget=budget)
    if verdict.status != REALIZABLE:
        return []
    n = config.dim
    pairs = _sym_to_entry_rows(n)
    amat = [list(r) for r in verdict.witness.entries]
    amat, tight_cfg = climb_to_vertex(amat)
    gens = [
        [list(r) for r in g]
        for g in automorphism_group(config).generators
    ]
    marked = set(config.vectors)

    def colors_of(c):
        return tuple(1 if v in marked else 0 for v in c.vectors)

    start_cfg = tight_cfg
    reps = [(amat, start_cfg)]
    seen = [(fingerprint(start_cfg), start_cfg)]
    queue = [(amat, start_cfg)]
    while queue:
        cur, curcfg = queue.pop(0)
        for d in _face_edge_directions(curcfg, config, pairs, n):
            if _is_psd(d):
                raise AssertionError("psd edge direction on a bounded face")
            _t, nb = voronoi_step(cur, d)
            _mn, nbcfg = _min_and_config(nb)
            fp = fingerprint(nbcfg)
            known = False
            for fp2, cfg2 in seen:
                if fp != fp2 or cfg2.s != nbcfg.s:
                    continue
                w = are_equivalent(
                    cfg2, nbcfg, colors_a=colors_of(cfg2), colors_b=colors_of(nbcfg)
                )
                if w is not None:
                    known = True
                    break
            if not known:
                seen.append((fp, nbcfg))
                reps.append((nb, nbcfg))
                queue.append((nb, nbcfg))
    return [
        (QuadraticForm.from_rows(a), c) for a, c in reps
    ]


# ---------------------------------------------------------------------------
# rank n layer (codes)


def rank_n_classes_prime(n, p, progress=None):
    """Realizable s = n classes whose quotient is Z/p, as configurations."""
    out = []
    for code in enumerate_codes_prime(n, p):
        cfg = code_to_configuration(code)
        verdict = test_realizability(cfg)
        if verdict.status == REALIZABLE:
            out.append((code, cfg))
        if progress:
            progress(code, verdict)
    return out


def _superlattice_configs(config, p):
    """Index-p refinements: new ambients M = Z^n + (b/p) Z, mod Stab(V)."""
    n = config.dim
    gens = [
        [list(r) for r in g] for g in automorphism_group(config).generators
    ]

    def canon(b):
        # projective normalization mod p: first nonzero entry scaled to 1
        b = [x % p for x in b]
        lead = next((x for x in b if x), None)
        if lead is None:
            return None
        inv = pow(lead, -1, p)
        return tuple((x * inv) % p for x in b)

    seen = set()
    reps = []
    for raw in _nonzero_tuples(n, p):
        b = canon(raw)
        if b is None or b in seen:
            continue
        orbit = {b}
        frontier = [b]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = canon(ratlin.mat_vec(g, list(x)))
                    if y not in orbit:
                        orbit.add(y)
                        nxt.append(y)
            frontier = nxt
        seen |= orbit
        reps.append(b)
    out = []
    for b in reps:
        rows = ratlin.hnf_row_basis(
            [[p if i == j else 0 for j in range(n)] for i in range(n)] + [list(b)],
            n,
        )
        rinv = ratlin.mat_inverse(rows)
        vecs = []
        ok = True
        for v in config.vectors:
            x = [p * c for c in ratlin.mat_vec(ratlin.mat_transpose(rinv), list(v))]
            iv = []
            for c in x:
                if c.denominator != 1:
                    ok = False
                    break
                iv.append(int(c))
            if not ok:
                break
            vecs.append(tuple(iv))
        if ok:
            out.append(VectorConfiguration.from_vectors(n, vecs))
    return out


def _nonzero_tuples(n, p):
    # canonical projective representatives: first nonzero coordinate is 1
    def rec(prefix):
        if len(prefix) == n:
            if any(prefix):
                yield tuple(prefix)
            return
        leading_zero = not any(prefix)
        vals = range(p)
        for v in vals:
            if leading_zero and v not in (0, 1):
                continue
            yield from rec(prefix + [v])

    yield from rec([])


def enumerate_rank_n(n, max_index=None, threads=None):
    """All well-rounded classes with s = n, one per GL_n(Z)-class.

    Prime indexes come from the code stream; composite indexes from
    index-p refinements of feasible parents along non-decreasing prime
    chains.  Every output is certified realizable.
    """
    bound = index_bound(n) if max_index is None else min(max_index, index_bound(n))
    std = VectorConfiguration.from_vectors(
        n, [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    )
    by_index = {1: [std]}
    for p in _primes_up_to(bound):
        found = rank_n_classes_prime(n, p)
        if found:
            by_index[p] = [cfg for _code, cfg in found]
    # composite indexes via non-decreasing prime chains
    indexes = sorted(by_index)
    frontier = [d for d in indexes if d > 1]
    while frontier:
        new_frontier = []
        for d in frontier:
            largest = _largest_prime_factor(d)
            for p in _primes_up_to(bound):
                if p < largest or d * p > bound:
                    continue
                cands = []
                for cfg in by_index[d]:
                    cands.extend(_superlattice_configs(cfg, p))
                kept = _dedup_configs(
                    [c for c in cands if _realizable(c)]
                )
                if kept:
                    existing = by_index.setdefault(d * p, [])
                    merged = _dedup_configs(existing + kept)
                    if len(merged) > len(existing):
                        by_index[d * p] = merged
                        if d * p not in new_frontier:
                            new_frontier.append(d * p)
        frontier = sorted(new_frontier)
    cells = []
    for d in sorted(by_index):
        for cfg in by_index[d]:
            cells.append(Cell.make(cfg))
    layer = RankLayer(n, cells, complete=True)
    layer.sort()
    return layer


def _realizable(cfg):
    return test_realizability(cfg).status == REALIZABLE


def _largest_prime_factor(d):
    p = 2
    largest = 1
    while d > 1:
        while d % p == 0:
            largest = p
            d //= p
        p += 1
    return largest


def _dedup_configs(configs):
    out = []
    for cfg in configs:
        fp = fingerprint(cfg)
        dup = False
        for other in out:
            if (
                other.s == cfg.s
                and fingerprint(other) == fp
                and are_equivalent(other, cfg) is not None
            ):
                dup = True
                break
        if not dup:
            out.append(cfg)
    return sorted(out, key=lambda c: (fingerprint(c).sort_key(), c.vectors))


# ---------------------------------------------------------------------------
# rank r > n layers


def covers_of(config: VectorConfiguration, budget=200):
    """All classes covering V (rank + 1), via perfect forms above V."""
    r = perfection_rank(config)
    verts = perfect_forms_above(config, budget=budget)
    cands = set()
    members = set(config.vectors)
    for _form, vcfg in verts:
        for w in vcfg.vectors:
            if w not in members:
                cands.add(w)
    out = []
    for w in sorted(cands):
        trial = config.union([w])
        if perfection_rank(trial) != r + 1:
            continue
        ext = extend_to_realizable(trial, budget=budget)
        if ext is not None:
            out.append(ext)
    return _dedup_configs(out)


def enumerate_rank_plus(n, r, layers, budget=300):
    """Layer at rank r from complete layers at ranks r-1 and r-2.

    For r = n + 1 the covers of every rank-n class are enumerated
    directly; for larger r every rank-r class contains two distinct
    covers of a rank r-2 class, and their union extends to it.
    """
    if r <= n:
        raise ValueError("rank must exceed the dimension")
    top = n * (n + 1) // 2
    if r > top:
        raise ValueError("rank exceeds the perfection rank of the space")
    if r == n + 1:
        base = layers[n]
        if not base.complete:
            raise IncompleteInput("rank-n layer not complete")
        found = []
        for cell in base.cells:
            found.extend(covers_of(cell.config, budget=budget))
        return _finish_layer(r, found)
    for need in (r - 1, r - 2):
        if need not in layers or not layers[need].complete:
            raise IncompleteInput(f"layer at rank {need} incomplete")
    upper = layers[r - 1]
    lower = layers[r - 2]
    cover_map = {i: [] for i in range(len(lower.cells))}
    for wcell in upper.cells:
        for face_config, wr in faces_of_cell(wcell):
            if not wr:
                continue
            matched = False
            fp = fingerprint(face_config)
            for i, vcell in enumerate(lower.cells):
                if vcell.config.s != face_config.s:
                    continue
                if fingerprint(vcell.config) != fp:
                    continue
                witness = are_equivalent(vcell.config, face_config)
                if witness is None:
                    continue
                # map the covering cell back so it contains the rep
                p = witness.as_rows()
                pinv = ratlin.mat_inverse(p)
                pint = [[int(x) for x in row] for row in pinv]
                cover = wcell.config.transform(pint)
                cover_map[i].append(cover)
                matched = True
                break
            if not matched:
                raise IncompleteInput(
                    f"well-rounded facet at rank {r-2} missing from layer"
                )
    unions = []
    for i, vcell in enumerate(lower.cells):
        covers = cover_map[i]
        if len(covers) < 2:
            continue
        gens = [
            [list(row) for row in g]
            for g in vcell.stabilizer.generators
        ]
        full = []
        seen_vec = set()
        for cov in covers:
            for img in config_orbit(cov, gens):
                if img.vectors not in seen_vec:
                    seen_vec.add(img.vectors)
                    full.append(img)
        full.sort(key=lambda c: c.vectors)
        for a in range(len(full)):
            for b in range(a + 1, len(full)):
                u = full[a].union(full[b].vectors)
                if perfection_rank(u) == r:
                    unions.append(u)
    unions = _dedup_configs(unions)
    found = []
    for u in unions:
        ext = extend_to_realizable(u, budget=budget)
        if ext is not None:
            found.append(ext)
    return _finish_layer(r, found)


def _finish_layer(r, configs):
    cells = [Cell.make(c) for c in _dedup_configs(configs)]
    layer = RankLayer(r, cells, complete=True)
    layer.sort()
    return layer


def build_layers(n, max_rank=None, budget=300):
    """All layers for dimension n from rank n up to max_rank (default top)."""
    top = n * (n + 1) // 2
    if max_rank is None:
        max_rank = top
    layers = {n: enumerate_rank_n(n)}
    for r in range(n + 1, max_rank + 1):
        layers[r] = enumerate_rank_plus(n, r, layers, budget=budget)
    return layers


# ---------------------------------------------------------------------------
# primitivity


def is_primitive_class(config: VectorConfiguration) -> bool:
    """No basis choice exhibits the class as a lower class plus Z^k.

    Tests the support set I = I1 (code support) union I2 (coefficients
    of extra minimal vectors) over every basis of independent minimal
    vectors; primitive means I = {1..n} for all of them.
    """
    from itertools import combinations

    if not config.is_well_rounded():
        raise NotWellRounded("primitivity needs a spanning configuration")
    n = config.dim
    if n == 1:
        return True
    vecs = [list(v) for v in config.vectors]
    for idx in combinations(range(config.s), n):
        bmat = ratlin.mat_transpose([vecs[i] for i in idx])
        if ratlin.det(bmat) == 0:
            continue
        binv = ratlin.mat_inverse(bmat)
        support = set()
        # I1: coordinates where Z^n is strictly larger than the sublattice
        for j in range(n):
            col = [binv[i][j] for i in range(n)]
            for i, c in enumerate(col):
                if c.denominator != 1:
                    support.add(i)
        # I2: coefficients of the remaining minimal vectors
        chosen = set(idx)
        for k, v in enumerate(vecs):
            if k in chosen:
                continue
            coords = ratlin.mat_vec(binv, v)
            for i, c in enumerate(coords):
                if c != 0:
                    support.add(i)
        if support != set(range(n)):
            return False
    return True
