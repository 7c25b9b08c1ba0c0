"""Facet orbits of highly symmetric cones by adjacency decomposition.

Full double description is hopeless for the top perfect cones (tens of
thousands of facets), but their facet ORBITS under the configuration's
automorphism group are few.  The classical cure: find one facet, close
under flips across ridges, and enumerate the ridges of each facet only
up to the facet's stabilizer, recursively.

Orbits are never materialized.  A face is a set of ray labels; two
faces are identified when the colored backtracking isometry search
finds a configuration automorphism that preserves every outer mark of
the recursion chain and maps one label set to the other.
"""

from math import gcd

from . import ratlin
from .equiv import are_equivalent
from .forms import VectorConfiguration
from .lp import AffineFunc, LinearProgram, OPTIMAL, solve_exact
from .ratlin import QQ


def _primitive(vec):
    g = 0
    out = [int(x) for x in vec]
    for x in out:
        g = gcd(g, abs(x))
    if g > 1:
        out = [x // g for x in out]
    return tuple(out)


def _scale_int(vec):
    den = 1
    q = [QQ(x) for x in vec]
    for x in q:
        d = int(x.denominator)
        den = den * d // gcd(den, d)
    return _primitive([int(x * den) for x in q])


class SymmetricCone:
    """cone(rays) with ray labels pointing into a configuration.

    `labels[i]` is the index of the configuration vector behind ray i;
    `outer_marks` is the chain of label sets fixed by the recursion so
    far.  Faces are compared through mark-preserving configuration
    automorphisms, which is exactly the stabilizer of the chain.
    """

    def __init__(self, rays, config: VectorConfiguration, labels=None, outer_marks=()):
        self.rays = [tuple(int(x) for x in r) for r in rays]
        if any(not any(r) for r in self.rays):
            raise ValueError("zero ray")
        self.config = config
        self.labels = tuple(labels if labels is not None else range(len(rays)))
        self.outer = tuple(tuple(sorted(m)) for m in outer_marks)
        from .equiv import _geometry_core

        _detb, _vecs, base_prod = _geometry_core(config)
        self._prod = base_prod
        self._fnorms = [base_prod[p][p] for p in range(config.s)]

    def _label_set(self, ray_subset):
        return tuple(sorted(self.labels[i] for i in ray_subset))

    def colors_for(self, ray_subset):
        colors = [0] * self.config.s
        for depth, marks in enumerate(self.outer, start=1):
            for i in marks:
                colors[i] = depth
        inner = len(self.outer) + 1
        for i in self._label_set(ray_subset):
            colors[i] = inner
        return tuple(colors)

    def face_key(self, ray_subset):
        """Invariant under every mark-preserving automorphism.

        Per member: own norm, sorted |products| within the face, and the
        sorted |products| against each outer mark class; the multiset of
        these per-member profiles is the key.
        """
        lbl = self._label_set(ray_subset)
        lset = set(lbl)
        prod = self._prod
        profiles = []
        for i in lbl:
            inner = tuple(sorted(abs(prod[i][j]) for j in lbl if j != i))
            outer = tuple(
                tuple(sorted(abs(prod[i][j]) for j in m if j != i))
                for m in self.outer
            )
            rest = tuple(
                sorted(
                    abs(prod[i][j])
                    for j in range(self.config.s)
                    if j not in lset
                )
            )
            profiles.append((self._fnorms[i], inner, outer, rest))
        return tuple(sorted(profiles))

    def faces_equivalent(self, sub_a, sub_b):
        if self.face_key(sub_a) != self.face_key(sub_b):
            return False
        w = are_equivalent(
            self.config,
            self.config,
            colors_a=self.colors_for(sub_a),
            colors_b=self.colors_for(sub_b),
        )
        return w is not None

    def subcone(self, facet_rays, coords):
        return SymmetricCone(
            coords,
            self.config,
            labels=[self.labels[i] for i in facet_rays],
            outer_marks=self.outer + (self._label_set(facet_rays),),
        )


def _positive_functional(rays, d):
    """u with u.r >= 1 for all rays (exists iff the cone is pointed)."""
    lp = LinearProgram(
        d,
        AffineFunc.make([0] * d, 0),
        (),
        tuple(AffineFunc.make(list(r), -1) for r in rays),
    )
    out = solve_exact(lp)
    if out.status != OPTIMAL:
        raise ValueError("cone is not pointed")
    return out.x


def initial_facet(rays, d):
    """One facet of a pointed full-rank cone, by exact rotation."""
    u = _positive_functional(rays, d)

    def val(f, r):
        return ratlin.vec_dot(f, r)

    tights = []
    for _ in range(d + 1):
        span = [list(rays[i]) for i in tights]
        rank = ratlin.mat_rank(span) if span else 0
        if rank == d - 1:
            break
        kern = (
            ratlin.kernel_basis(span)
            if span
            else [[QQ(1 if k == j else 0) for k in range(d)] for j in range(d)]
        )
        w = None
        for cand in kern:
            if ratlin.mat_rank([list(u), list(cand)]) == 2:
                w = list(cand)
                break
        if w is None:
            raise RuntimeError("no rotation direction available")
        if all(val(w, r) >= 0 for r in rays):
            w = [-x for x in w]
        tstar = None
        for r in rays:
            vw = val(w, r)
            if vw < 0:
                t = val(u, r) / (-vw)
                if tstar is None or t < tstar:
                    tstar = t
        u = [a + tstar * b for a, b in zip(u, w)]
        tights = [i for i, r in enumerate(rays) if val(u, r) == 0]
    else:
        raise RuntimeError("rotation did not reach a facet")
    return _facet_normal(rays, tights, d), tuple(tights)


def _facet_normal(rays, tights, d):
    """Primitive integer inward normal of the facet through rays[tights]."""
    span = [list(rays[i]) for i in tights]
    kern = ratlin.kernel_basis(span)
    if len(kern) != 1:
        raise ValueError("tight set does not have corank 1")
    normal = _scale_int(kern[0])
    for r in rays:
        v = ratlin.vec_dot(normal, r)
        if v < 0:
            normal = tuple(-x for x in normal)
            break
        if v > 0:
            break
    if any(ratlin.vec_dot(normal, r) < 0 for r in rays):
        raise ValueError("tight set does not support the cone")
    return tuple(normal)


def flip_facet(rays, facet_tights, ridge_tights, d):
    """The unique other facet containing the ridge."""
    u = _facet_normal(rays, facet_tights, d)
    span = [list(rays[i]) for i in ridge_tights]
    kern = ratlin.kernel_basis(span)
    w = None
    for cand in kern:
        if ratlin.mat_rank([list(u), list(cand)]) == 2:
            w = list(cand)
            break
    if w is None:
        raise ValueError("ridge span is not corank 2")
    ridge_set = set(ridge_tights)
    wit = next(i for i in facet_tights if i not in ridge_set)
    val_w = ratlin.vec_dot(w, rays[wit])
    if val_w == 0:
        raise ValueError("witness ray lies on the ridge hyperplane")
    if val_w < 0:
        w = [-x for x in w]
    # the supporting pencil {w + t u} is bounded by the two facets through
    # the ridge; F sits at t -> +inf, the other facet at the largest t for
    # which support still holds (possibly negative)
    alpha = None
    for r in rays:
        vu = ratlin.vec_dot(u, r)
        if vu > 0:
            a = -ratlin.vec_dot(w, r) / vu
            if alpha is None or a > alpha:
                alpha = a
    if alpha is None:
        raise ValueError("facet inequality vanishes on every ray")
    normal = _scale_int([wi + alpha * ui for wi, ui in zip(w, u)])
    tights = tuple(
        i for i, r in enumerate(rays) if ratlin.vec_dot(normal, r) == 0
    )
    if ratlin.mat_rank([list(rays[i]) for i in tights]) != d - 1:
        raise ValueError("flip did not land on a facet")
    return tuple(normal), tights


def facet_orbit_reps(cone: SymmetricCone, dd_ray_limit=24, _depth=0):
    """One (normal, tight ray indices) per facet orbit of the cone."""
    rays = cone.rays
    d = ratlin.mat_rank([list(r) for r in rays])
    if d != len(rays[0]):
        raise ValueError("rays must span their coordinate space")
    distinct = sorted(set(_primitive(r) for r in rays))
    if len(distinct) <= dd_ray_limit or d <= 3 or _depth >= 6:
        from .polyhedra import cone_facets

        faces = []
        for normal, _t in cone_facets(distinct):
            tights = tuple(
                i
                for i, r in enumerate(rays)
                if ratlin.vec_dot(normal, r) == 0
            )
            faces.append((tuple(normal), tights))
        return _dedup_faces(cone, faces)
    start = initial_facet(rays, d)
    reps = [start]
    queue = [start]
    while queue:
        _normal, tights = queue.pop(0)
        for ridge in _ridge_orbit_reps(cone, tights, dd_ray_limit, _depth):
            item = flip_facet(rays, tights, ridge, d)
            if not any(cone.faces_equivalent(item[1], t2) for _n, t2 in reps):
                reps.append(item)
                queue.append(item)
    return reps


def _dedup_faces(cone, faces):
    reps = []
    buckets = {}
    for normal, tights in faces:
        key = cone.face_key(tights)
        dup = False
        for _n, t2 in buckets.get(key, ()):
            if (
                are_equivalent(
                    cone.config,
                    cone.config,
                    colors_a=cone.colors_for(tights),
                    colors_b=cone.colors_for(t2),
                )
                is not None
            ):
                dup = True
                break
        if not dup:
            item = (tuple(normal), tuple(tights))
            reps.append(item)
            buckets.setdefault(key, []).append(item)
    return reps


def _ridge_orbit_reps(cone, facet_tights, dd_ray_limit, depth):
    """Ridges of a facet up to its stabilizer, as tight ray index sets."""
    rays = cone.rays
    sub = [rays[i] for i in facet_tights]
    span_basis = []
    for r in sub:
        cand = span_basis + [list(r)]
        if ratlin.mat_rank(cand) == len(cand):
            span_basis.append(list(r))
    mat = ratlin.mat_transpose(span_basis)
    coords = [_scale_int(ratlin.solve(mat, list(r))) for r in sub]
    subcone = cone.subcone(facet_tights, coords)
    out = []
    for _normal, sub_tights in facet_orbit_reps(subcone, dd_ray_limit, depth + 1):
        out.append(tuple(facet_tights[i] for i in sub_tights))
    return out
