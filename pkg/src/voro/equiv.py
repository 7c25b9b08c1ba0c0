"""GL_n(Z)-equivalence of configurations, automorphism groups, and
orientation characters.

The engine is a Plesken-Souvignier style backtracking search over images
of a base of independent vectors, pruned by exact inner products under
the adjugate of the barycenter matrix (an integer, congruence-invariant
form that makes every configuration vector "short").  An exhausted
search is a proof, so `are_equivalent` returning None certifies
inequivalence; a tripped node cap raises Undecided instead of guessing.

Vectors may carry colors; every witness must preserve them.  Colors
encode marked subconfigurations (e.g. a fixed face) so stabilizer-
relative searches reuse the same machinery.
"""

from dataclasses import dataclass

from . import ratlin
from .errors import NotWellRounded, Undecided
from .forms import (
    VectorConfiguration,
    barycenter_matrix,
    normalize_pair,
    sym_basis_indices,
    vectorize_projector,
)

DEFAULT_NODE_CAP = 2_000_000


@dataclass(frozen=True)
class Fingerprint:
    """Cheap invariant bucket key; equal for equivalent configurations."""

    dim: int
    s: int
    det_b: int
    row_profile: tuple
    norm_multiset: tuple
    product_multiset: tuple

    def sort_key(self):
        return (
            self.dim,
            self.s,
            self.det_b,
            self.row_profile,
            self.norm_multiset,
            self.product_multiset,
        )


_FP_CACHE = {}


def fingerprint(config: VectorConfiguration) -> Fingerprint:
    """Invariants built from F = adj(B), the adjugate barycenter form.

    F transforms contravariantly, so v^t F w is preserved by any
    unimodular map of configurations; the F-Gram matrix is preserved up
    to signed permutation, hence its per-row absolute-value profile and
    the norm/product multisets are class invariants.
    """
    key = (config.dim, config.vectors)
    hit = _FP_CACHE.get(key)
    if hit is not None:
        return hit
    b = [list(r) for r in barycenter_matrix(config).matrix]
    det_b = int(ratlin.det(b))
    f = ratlin.adjugate(b)
    vs = [list(v) for v in config.vectors]
    fv = [ratlin.mat_vec(f, v) for v in vs]
    gram = [[int(ratlin.vec_dot(v, fw)) for fw in fv] for v in vs]
    s = len(vs)
    # each row: own norm plus the sorted |products| with the others
    profile = tuple(
        sorted(
            (gram[i][i], tuple(sorted(abs(gram[i][j]) for j in range(s) if j != i)))
            for i in range(s)
        )
    )
    norms = tuple(sorted(gram[i][i] for i in range(s)))
    prods = tuple(
        sorted(abs(gram[i][j]) for i in range(s) for j in range(i + 1, s))
    )
    fp = Fingerprint(config.dim, config.s, det_b, profile, norms, prods)
    if len(_FP_CACHE) < 200000:
        _FP_CACHE[key] = fp
    return fp


@dataclass(frozen=True)
class IsometryWitness:
    matrix: tuple  # P with P . V = V' as pair sets

    def as_rows(self):
        return [list(r) for r in self.matrix]


@dataclass(frozen=True)
class StabilizerGroup:
    generators: tuple  # unimodular matrices preserving V as a pair set
    order: int
    characters: tuple  # orientation character of each generator

    @property
    def orientation_faithful(self):
        return all(c == 1 for c in self.characters)


_GEO_CACHE = {}


def _geometry_core(config):
    """Cached integer product tables for the backtracking search."""
    key = (config.dim, config.vectors)
    hit = _GEO_CACHE.get(key)
    if hit is not None:
        return hit
    b = [list(r) for r in barycenter_matrix(config).matrix]
    det_b = int(ratlin.det(b))
    if det_b == 0:
        raise NotWellRounded("configuration does not span the space")
    f = ratlin.adjugate(b)
    vectors = [tuple(v) for v in config.vectors]
    fv = [ratlin.mat_vec(f, list(v)) for v in vectors]
    base_prod = [
        [int(ratlin.vec_dot(v, fw)) for fw in fv] for v in vectors
    ]
    core = (det_b, vectors, base_prod)
    if len(_GEO_CACHE) < 50000:
        _GEO_CACHE[key] = core
    return core


class _Geometry:
    """One configuration side of the search, with cached product tables.

    Signed vector i encodes vectors[i // 2] negated when i is odd; all
    pruning data are plain ints so the inner loops stay cheap.
    """

    def __init__(self, config, colors=None):
        self.config = config
        self.n = config.dim
        self.s = config.s
        if colors is None:
            colors = (0,) * config.s
        self.colors = tuple(colors)
        self.det_b, self.vectors, self.base_prod = _geometry_core(config)
        self.norms = [self.base_prod[p][p] for p in range(self.s)]
        # per-vector invariant: |products| against every color class
        classes = {}
        for p, c in enumerate(self.colors):
            classes.setdefault(c, []).append(p)
        self.profiles = []
        for p in range(self.s):
            prof = tuple(
                (c, tuple(sorted(abs(self.base_prod[p][q]) for q in members)))
                for c, members in sorted(classes.items())
            )
            self.profiles.append((self.colors[p], self.norms[p], prof))

    def signed_tuple(self, i):
        v = self.vectors[i // 2]
        return v if i % 2 == 0 else tuple(-x for x in v)

    def prod(self, i, j):
        sgn = 1 if (i + j) % 2 == 0 else -1
        return sgn * self.base_prod[i // 2][j // 2]


_BASE_CACHE = {}


def _base_data(config):
    key = (config.dim, config.vectors)
    hit = _BASE_CACHE.get(key)
    if hit is not None:
        return hit
    base_idx = config.basis_indices()
    if len(base_idx) != config.dim:
        raise NotWellRounded("configuration does not span the space")
    base = [config.vectors[i] for i in base_idx]
    base_cols = ratlin.mat_transpose([list(v) for v in base])
    base_inv = ratlin.mat_inverse(base_cols)
    data = (base_idx, base, base_cols, base_inv)
    if len(_BASE_CACHE) < 50000:
        _BASE_CACHE[key] = data
    return data


class _Search:
    def __init__(self, src: _Geometry, dst: _Geometry, node_cap):
        self.src = src
        self.dst = dst
        self.node_cap = node_cap
        self.nodes = 0
        (
            self.base_idx,
            self.base,
            self.base_cols,
            self.base_inv,
        ) = _base_data(src.config)
        # products among base vectors (as signed indices 2 * pair)
        self.base_signed = [2 * i for i in self.base_idx]
        self.base_prod = [
            [src.prod(a, b2) for b2 in self.base_signed[: k + 1]]
            for k, a in enumerate(self.base_signed)
        ]
        self.base_colors = [src.colors[i] for i in self.base_idx]
        self.base_norms = [src.norms[i] for i in self.base_idx]

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise Undecided("isometry search exceeded its node cap")

    def candidates(self, level, images):
        """Signed dst indices compatible with base[level] given images."""
        want_profile = self.src.profiles[self.base_idx[level]]
        want_prods = self.base_prod[level]
        dst = self.dst
        out = []
        for w in range(2 * dst.s):
            p = w // 2
            if dst.profiles[p] != want_profile:
                continue
            ok = True
            for j, img in enumerate(images):
                if dst.prod(w, img) != want_prods[j]:
                    ok = False
                    break
            if ok:
                out.append(w)
        return out

    def complete(self, images):
        """Build P from full base images and validate it exactly."""
        img_cols = ratlin.mat_transpose(
            [list(self.dst.signed_tuple(i)) for i in images]
        )
        p = ratlin.mat_mul(img_cols, self.base_inv)
        rows = []
        for row in p:
            introw = []
            for x in row:
                if x.denominator != 1:
                    return None
                introw.append(int(x))
            rows.append(introw)
        if abs(ratlin.det(rows)) != 1:
            return None
        dst_index = {v: k for k, v in enumerate(self.dst.vectors)}
        for k, v in enumerate(self.src.vectors):
            w = normalize_pair(ratlin.mat_vec(rows, list(v)))
            j = dst_index.get(w)
            if j is None:
                return None
            if self.dst.colors[j] != self.src.colors[k]:
                return None
        return rows

    def find(self, prefix=None):
        """DFS for one witness; prefix pins signed images of first levels."""
        n = len(self.base)
        images = list(prefix or [])

        def rec(level):
            self._tick()
            if level == n:
                return self.complete(images)
            for w in self.candidates(level, images):
                images.append(w)
                got = rec(level + 1)
                if got is not None:
                    return got
                images.pop()
            return None

        for i, w in enumerate(images):
            p = w // 2
            if self.dst.profiles[p] != self.src.profiles[self.base_idx[i]]:
                return None
            for j in range(i + 1):
                if self.dst.prod(w, images[j]) != self.base_prod[i][j]:
                    return None
        return rec(len(images))


def are_equivalent(
    config_a: VectorConfiguration,
    config_b: VectorConfiguration,
    colors_a=None,
    colors_b=None,
    node_cap=DEFAULT_NODE_CAP,
):
    """Search P with P . A = B (pair sets, colors preserved).

    Returns an IsometryWitness or None; None is a proof because the
    backtracking is exhaustive.  Raises Undecided if the node cap trips.
    """
    if config_a.dim != config_b.dim or config_a.s != config_b.s:
        return None
    if colors_a is None and colors_b is None:
        if fingerprint(config_a) != fingerprint(config_b):
            return None
    src = _Geometry(config_a, colors_a)
    dst = _Geometry(config_b, colors_b)
    if src.det_b != dst.det_b:
        return None
    if sorted(src.profiles) != sorted(dst.profiles):
        return None
    p = _Search(src, dst, node_cap).find()
    if p is None:
        return None
    return IsometryWitness(tuple(tuple(r) for r in p))


def _orbit(vecs_gens, start):
    """Orbit of a signed vector under matrix generators."""
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for g in vecs_gens:
                w = tuple(ratlin.mat_vec(g, list(v)))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def automorphism_group(
    config: VectorConfiguration, colors=None, node_cap=DEFAULT_NODE_CAP
) -> StabilizerGroup:
    """Full stabilizer of the configuration (color-preserving maps).

    Strong generators come from a stabilizer-chain backtracking over the
    base of independent vectors; the order is the product of the chain's
    orbit sizes.  -identity is always present.
    """
    geo = _Geometry(config, colors)
    search = _Search(geo, geo, node_cap)
    base = search.base
    n = len(base)
    gens = []
    order = 1
    for lev in reversed(range(n)):
        # generators already found that fix base[0..lev-1] pointwise
        fixing = [
            g
            for g in gens
            if all(
                tuple(ratlin.mat_vec(g, list(base[i]))) == base[i]
                for i in range(lev)
            )
        ]
        prefix = search.base_signed[:lev]
        orbit = _orbit(fixing, base[lev])
        for cand in search.candidates(lev, prefix):
            if geo.signed_tuple(cand) in orbit:
                continue
            got = search.find(prefix + [cand])
            if got is not None:
                gens.append(got)
                fixing.append(got)
                orbit = _orbit(fixing, base[lev])
        order *= len(orbit)
    # -identity moves every signed base vector, so the chain has already
    # counted it; it is appended as a generator for downstream callers.
    minus = [[-1 if i == j else 0 for j in range(geo.n)] for i in range(geo.n)]
    if not any(ratlin.mat_eq(g, minus) for g in gens):
        gens.append(minus)
    chars = tuple(orientation_character(g, config) for g in gens)
    return StabilizerGroup(
        tuple(tuple(tuple(r) for r in g) for g in gens), order, chars
    )


def canonical_projector_basis(config: VectorConfiguration):
    """Indices of the first independent v v^t in canonical vector order.

    This ordered basis fixes the orientation of span{v v^t} used by all
    downstream signs.
    """
    pairs = sym_basis_indices(config.dim)
    rows = []
    idx = []
    for i, v in enumerate(config.vectors):
        cand = rows + [vectorize_projector(v, pairs)]
        if ratlin.mat_rank(cand) == len(cand):
            rows = cand
            idx.append(i)
    return idx


def span_coordinates(config: VectorConfiguration, basis_idx=None):
    """Exact coordinate map Sym -> R^r on span{v v^t}.

    Returns (pairs, rows, solver) where solver(matrix_vec) gives the
    coordinates on the canonical projector basis, or None if outside the
    span.
    """
    pairs = sym_basis_indices(config.dim)
    if basis_idx is None:
        basis_idx = canonical_projector_basis(config)
    rows = [vectorize_projector(config.vectors[i], pairs) for i in basis_idx]
    mat = ratlin.mat_transpose(rows)

    def solver(vec):
        sol = ratlin.solve(mat, vec)
        if sol is None:
            return None
        # verify (solve returns a particular solution even if inconsistent
        # only when rank allows; recheck exactly)
        recon = [
            sum(sol[k] * rows[k][j] for k in range(len(rows)))
            for j in range(len(vec))
        ]
        if any(recon[j] != vec[j] for j in range(len(vec))):
            return None
        return sol

    return pairs, rows, solver


def orientation_character(g, config: VectorConfiguration) -> int:
    """Sign of det of M |-> g M g^t restricted to span{v v^t}.

    g must stabilize the configuration as a pair set.
    """
    target = set(config.vectors)
    for v in config.vectors:
        if normalize_pair(ratlin.mat_vec(g, list(v))) not in target:
            raise ValueError("matrix does not stabilize the configuration")
    pairs, rows, solver = span_coordinates(config)
    basis_idx = canonical_projector_basis(config)
    mat_rows = []
    for i in basis_idx:
        v = config.vectors[i]
        gv = ratlin.mat_vec(g, list(v))
        coords = solver(vectorize_projector(gv, pairs))
        if coords is None:
            raise ValueError("image leaves the projector span")
        mat_rows.append(coords)
    d = ratlin.det(ratlin.mat_transpose(mat_rows))
    if d == 0:
        raise ValueError("induced map is singular")
    return 1 if d > 0 else -1


def is_orientation_faithful(config: VectorConfiguration, group=None) -> bool:
    """True iff every stabilizer element preserves the orientation.

    The character is a homomorphism to {+-1}, so checking generators
    decides the whole group.
    """
    if group is None:
        group = automorphism_group(config)
    return group.orientation_faithful


def stabilizer_prime_bound_ok(group: StabilizerGroup, dim: int) -> bool:
    """Order has no prime factor above dim + 1."""
    m = group.order
    for p in range(2, dim + 2):
        while m % p == 0:
            m //= p
    return m == 1


def config_orbit(config: VectorConfiguration, gens, cap=None):
    """Orbit of a configuration under matrix generators (as configs)."""
    seen = {config.vectors}
    frontier = [config]
    out = [config]
    while frontier:
        nxt = []
        for c in frontier:
            for g in gens:
                img = c.transform([list(r) for r in g])
                if img.vectors not in seen:
                    seen.add(img.vectors)
                    nxt.append(img)
                    out.append(img)
                    if cap is not None and len(out) > cap:
                        raise Undecided("configuration orbit exceeded cap")
        frontier = nxt
    return out

