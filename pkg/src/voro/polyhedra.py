"""Exact double description for pointed rational polyhedral cones.

Rays and constraint normals are primitive integer vectors; all pivots
and combinations stay in integer arithmetic.  Adjacency during
insertion uses the combinatorial criterion on tight-sets stored as
bitmasks, which is fast and exact.

Two entry points cover every use in the package:

  extreme_rays(ineqs, eqs)  --  V-representation of
                                {x : a.x >= 0, e.x = 0},
  cone_facets(rays)         --  irredundant facets of cone(rays),
                                via the polar cone.
"""

from math import gcd

from . import ratlin
from .ratlin import QQ


def _primitive(vec):
    g = 0
    out = [int(x) for x in vec]
    for x in out:
        g = gcd(g, abs(x))
    if g > 1:
        out = [x // g for x in out]
    return tuple(out)


def _scale_to_int(vec):
    den = 1
    q = [QQ(x) for x in vec]
    for x in q:
        d = int(x.denominator)
        den = den * d // gcd(den, d)
    return _primitive([int(x * den) for x in q])


def extreme_rays(ineqs, eqs=(), max_rays=2_000_000):
    """Extreme rays of the pointed cone {x : a.x >= 0, e.x = 0}.

    `ineqs` and `eqs` are integer (or rational) vectors in R^d.  The
    cone must be pointed; a lineality space raises ValueError.  Returns
    primitive integer rays in a deterministic order.
    """
    if not ineqs and not eqs:
        raise ValueError("empty constraint system defines all of R^d")
    d = len(ineqs[0]) if ineqs else len(eqs[0])
    if eqs:
        null = ratlin.integer_kernel_basis([[QQ(x) for x in e] for e in eqs])
        if not null:
            return []
        # x = N y (columns of N are the kernel basis)
        proj = [
            _scale_to_int([ratlin.vec_dot(a, col) for col in null])
            for a in ineqs
        ]
        proj = [a for a in proj if any(a)]
        sub = _dd(proj, len(null), max_rays)
        out = []
        for y in sub:
            x = [sum(y[k] * null[k][i] for k in range(len(null))) for i in range(d)]
            out.append(_primitive(x))
        return sorted(set(out))
    ineqs = [_scale_to_int(a) for a in ineqs]
    return sorted(set(_dd(ineqs, d, max_rays)))


def _initial_independent(ineqs, d):
    """Indices of d linearly independent constraints (pointedness check)."""
    idx = []
    rows = []
    for i, a in enumerate(ineqs):
        cand = rows + [list(a)]
        if ratlin.mat_rank(cand) == len(cand):
            rows = cand
            idx.append(i)
        if len(idx) == d:
            return idx
    raise ValueError("cone has a lineality space (constraints not full rank)")


def _dd(ineqs, d, max_rays):
    """Double description on inequality normals only; cone pointed."""
    if d == 0:
        return []
    base = _initial_independent(ineqs, d)
    rest = [i for i in range(len(ineqs)) if i not in set(base)]
    m = [ineqs[i] for i in base]
    minv = ratlin.mat_inverse(m)
    rays = []
    for j in range(d):
        col = [minv[i][j] for i in range(d)]
        rays.append(_scale_to_int(col))

    def tightmask(r):
        mask = 0
        for pos, i in enumerate(processed):
            if ratlin.vec_dot(ineqs[i], r) == 0:
                mask |= 1 << pos
        return mask

    processed = list(base)
    masks = [tightmask(r) for r in rays]

    # deterministic max-cutoff ordering: at each step pick the remaining
    # constraint killing the most rays (ties by index)
    remaining = list(rest)
    while remaining:
        vals_cache = {}
        best = None
        for i in remaining:
            a = ineqs[i]
            vals = [ratlin.vec_dot(a, r) for r in rays]
            vals_cache[i] = vals
            neg = sum(1 for v in vals if v < 0)
            key = (-neg, i)
            if best is None or key < best[0]:
                best = (key, i)
        i = best[1]
        remaining.remove(i)
        vals = vals_cache[i]
        if all(v >= 0 for v in vals):
            processed.append(i)
            bit = 1 << (len(processed) - 1)
            masks = [
                mask | (bit if vals[k] == 0 else 0) for k, mask in enumerate(masks)
            ]
            continue
        plus = [k for k, v in enumerate(vals) if v > 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        minus = [k for k, v in enumerate(vals) if v < 0]
        newrays = []
        newmasks = []
        allmasks = masks
        for kp in plus:
            for km in minus:
                common = masks[kp] & masks[km]
                # adjacency: no third ray's tight-set contains the meet
                adjacent = True
                for ko, mo in enumerate(allmasks):
                    if ko in (kp, km):
                        continue
                    if (mo & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                w = [
                    vals[kp] * x - vals[km] * y
                    for x, y in zip(rays[km], rays[kp])
                ]
                newrays.append(_primitive(w))
                newmasks.append(common)
        keep = [(rays[k], masks[k]) for k in plus + zero]
        processed.append(i)
        bit = 1 << (len(processed) - 1)
        rays = []
        masks = []
        for r, mask in keep:
            rays.append(r)
            masks.append(mask | (bit if ratlin.vec_dot(ineqs[i], r) == 0 else 0))
        for r, mask in zip(newrays, newmasks):
            rays.append(r)
            masks.append(mask | bit)
        if len(rays) > max_rays:
            raise RuntimeError("double description exceeded the ray cap")
    return rays


def cone_facets(rays, max_rays=2_000_000):
    """Facets of the full-dimensional pointed cone spanned by `rays`.

    Returns (normal, tight_indices) pairs: the inward normal (primitive
    integer, normal.x >= 0 on the cone) and the indices of the rays on
    the facet.  The input rays must span R^d.
    """
    rays = [list(map(int, r)) for r in rays]
    d = len(rays[0])
    if ratlin.mat_rank(rays) != d:
        raise ValueError("rays do not span the ambient space")
    normals = extreme_rays(rays, max_rays=max_rays)
    out = []
    for nrm in normals:
        tight = tuple(
            i for i, r in enumerate(rays) if ratlin.vec_dot(nrm, r) == 0
        )
        out.append((tuple(nrm), tight))
    out.sort(key=lambda p: p[1])
    return out
