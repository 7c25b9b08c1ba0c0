"""The Voronoi chain complex: cells, faces, incidence numbers, differentials.

Cells are equivalence-class representatives of well-rounded
configurations, graded by perfection rank (= dimension of the cone
spanned by the projectors v v^t).  The free modules are generated by the
orientation-faithful classes only; incidence numbers combine the facet
orientation sign with the orientation-compatibility sign of the
equivalence witness.  The assembled differentials satisfy d o d = 0
exactly, which is the standing sanity check on every sign convention in
this module.
"""

from dataclasses import dataclass, field

from . import ratlin
from .equiv import (
    StabilizerGroup,
    are_equivalent,
    automorphism_group,
    canonical_projector_basis,
    fingerprint,
    span_coordinates,
)
from .errors import IncompleteInput
from .forms import VectorConfiguration, perfection_rank, vectorize_projector
from .polyhedra import cone_facets


@dataclass
class Cell:
    """A class representative with stabilizer and orientation data."""

    config: VectorConfiguration
    rank: int
    stabilizer: StabilizerGroup = None
    orientation_faithful: bool = None
    orientation_basis: tuple = None  # indices into config.vectors
    fingerprint_key: tuple = None

    @classmethod
    def make(cls, config, stabilizer=None):
        r = perfection_rank(config)
        if stabilizer is None:
            stabilizer = automorphism_group(config)
        return cls(
            config=config,
            rank=r,
            stabilizer=stabilizer,
            orientation_faithful=stabilizer.orientation_faithful,
            orientation_basis=tuple(canonical_projector_basis(config)),
            fingerprint_key=fingerprint(config).sort_key(),
        )

    def sort_key(self):
        return (self.fingerprint_key, self.config.vectors)


@dataclass
class RankLayer:
    """All classes of one perfection rank; sigma = faithful sublist."""

    rank: int
    cells: list  # list[Cell], canonically sorted
    complete: bool = False

    @property
    def sigma_star(self):
        return self.cells

    @property
    def sigma(self):
        return [c for c in self.cells if c.orientation_faithful]

    def sort(self):
        self.cells.sort(key=Cell.sort_key)


def faces_of_cell(cell: Cell):
    """Codimension-1 faces of the cell's cone as subconfigurations.

    Returns a list of (face_config, well_rounded) in deterministic order.
    The facet enumeration happens in exact coordinates on span{v v^t}.
    """
    config = cell.config
    pairs, rows, solver = span_coordinates(config, cell.orientation_basis)
    rays = []
    for v in config.vectors:
        coords = solver(vectorize_projector(v, pairs))
        if coords is None:
            raise RuntimeError("projector outside its own span")
        rays.append(_scale_int(coords))
    if len(rays) == len(rows):
        # simplicial cone: facets drop one ray each
        facets = []
        for i in range(len(rays)):
            tight = tuple(j for j in range(len(rays)) if j != i)
            facets.append((None, tight))
    else:
        facets = cone_facets(rays)
    out = []
    for _, tight in facets:
        sub = VectorConfiguration.from_vectors(
            config.dim, [config.vectors[i] for i in tight]
        )
        out.append((sub, sub.is_well_rounded()))
    out.sort(key=lambda p: p[0].vectors)
    return out


def _scale_int(vec):
    from math import gcd

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


def _orientation_sign(mat):
    d = ratlin.det(mat)
    if d == 0:
        raise ValueError("degenerate orientation matrix")
    return 1 if d > 0 else -1


def epsilon_sign(cell: Cell, face_config: VectorConfiguration):
    """epsilon(tau', sigma): orientation of [basis(tau'), v^] in sigma.

    Computed for every admissible v in m(sigma) - m(tau'); the paper
    asserts independence of the choice and this implementation checks it.
    """
    config = cell.config
    pairs, rows, solver = span_coordinates(config, cell.orientation_basis)
    face_basis = canonical_projector_basis(face_config)
    cols = []
    for i in face_basis:
        coords = solver(vectorize_projector(face_config.vectors[i], pairs))
        if coords is None:
            raise ValueError("face leaves the cell span")
        cols.append(coords)
    face_set = set(face_config.vectors)
    sign = None
    for v in config.vectors:
        if v in face_set:
            continue
        coords = solver(vectorize_projector(v, pairs))
        mat = ratlin.mat_transpose(cols + [coords])
        s = _orientation_sign(mat)
        if sign is None:
            sign = s
        elif s != sign:
            raise AssertionError("epsilon sign depends on appended vector")
    if sign is None:
        raise ValueError("face equals the whole cell")
    return sign


def eta_sign(rep: Cell, face_config: VectorConfiguration, witness):
    """eta(tau, tau'): orientation compatibility of the witness map.

    witness P satisfies P . rep.config = face_config; the sign compares
    the image of rep's chosen orientation with the face's canonical one.
    """
    p = witness.as_rows() if hasattr(witness, "as_rows") else witness
    pairs, rows, solver = span_coordinates(
        face_config, canonical_projector_basis(face_config)
    )
    cols = []
    for i in rep.orientation_basis:
        v = rep.config.vectors[i]
        pv = ratlin.mat_vec(p, list(v))
        coords = solver(vectorize_projector(pv, pairs))
        if coords is None:
            raise ValueError("witness image leaves the face span")
        cols.append(coords)
    return _orientation_sign(ratlin.mat_transpose(cols))


def incidence_number(cell: Cell, rep: Cell, faces=None):
    """[sigma : tau] = sum over facets equivalent to tau of eta * epsilon."""
    if faces is None:
        faces = faces_of_cell(cell)
    total = 0
    for face_config, well_rounded in faces:
        if not well_rounded:
            continue
        if face_config.s != rep.config.s:
            continue
        if fingerprint(face_config) != fingerprint(rep.config):
            continue
        witness = are_equivalent(rep.config, face_config)
        if witness is None:
            continue
        total += eta_sign(rep, face_config, witness) * epsilon_sign(
            cell, face_config
        )
    return total


@dataclass
class VoronoiComplexData:
    """Sparse integer differentials d_r : V_r -> V_{r-1}."""

    dim: int
    ranks: list
    sigma_star_sizes: dict
    sigma_cells: dict  # rank -> list[Cell] (orientation-faithful, sorted)
    differentials: dict = field(default_factory=dict)
    # rank -> {(row, col): value}; rows index sigma_{r-1}, cols sigma_r

    def matrix_shape(self, rank):
        rows = len(self.sigma_cells.get(rank - 1, []))
        cols = len(self.sigma_cells.get(rank, []))
        return rows, cols

    def dense(self, rank):
        rows, cols = self.matrix_shape(rank)
        m = [[0] * cols for _ in range(rows)]
        for (i, j), v in self.differentials.get(rank, {}).items():
            m[i][j] = v
        return m


def assemble_complex(dim, layers) -> VoronoiComplexData:
    """Build all differentials from complete rank layers.

    `layers` maps rank -> RankLayer, covering dim .. dim(dim+1)/2; every
    layer must be flagged complete.
    """
    top = dim * (dim + 1) // 2
    ranks = list(range(dim, top + 1))
    for r in ranks:
        if r not in layers:
            raise IncompleteInput(f"missing layer at rank {r}")
        if not layers[r].complete:
            raise IncompleteInput(f"layer at rank {r} not marked complete")
        layers[r].sort()
    sigma_cells = {r: layers[r].sigma for r in ranks}
    sizes = {r: len(layers[r].cells) for r in ranks}
    data = VoronoiComplexData(dim, ranks, sizes, sigma_cells)
    for r in ranks:
        cols = sigma_cells.get(r, [])
        rows = sigma_cells.get(r - 1, []) if r - 1 >= dim else []
        star_below = layers[r - 1].cells if r - 1 >= dim else []
        mat = {}
        # facet closure: every well-rounded facet of every class at rank r
        # must be equivalent to a class at rank r-1 (completeness check)
        for cell in layers[r].cells:
            for face_config, wr in faces_of_cell(cell):
                if not wr:
                    continue
                if r - 1 < dim or not _matches_some(face_config, star_below):
                    raise IncompleteInput(
                        f"facet of a rank-{r} cell missing from rank {r-1}"
                    )
        if rows and cols:
            for j, cell in enumerate(cols):
                faces = faces_of_cell(cell)
                for i, rep in enumerate(rows):
                    val = incidence_number(cell, rep, faces=faces)
                    if val:
                        mat[(i, j)] = val
        data.differentials[r] = mat
    return data


def _matches_some(face_config, cells):
    fp = fingerprint(face_config)
    for cell in cells:
        if cell.config.s == face_config.s and fingerprint(cell.config) == fp:
            if are_equivalent(cell.config, face_config) is not None:
                return True
    return False


def verify_dd_zero(data: VoronoiComplexData) -> bool:
    """Exact sparse check that consecutive differentials compose to zero."""
    for r in data.ranks:
        if r - 1 not in data.ranks:
            continue
        d_r = data.differentials.get(r, {})
        d_prev = data.differentials.get(r - 1, {})
        if not d_r or not d_prev:
            continue
        by_col = {}
        for (i, j), v in d_prev.items():
            by_col.setdefault(j, []).append((i, v))
        acc = {}
        for (k, j), v in d_r.items():
            for i, w in by_col.get(k, []):
                key = (i, j)
                acc[key] = acc.get(key, 0) + w * v
        if any(v != 0 for v in acc.values()):
            return False
    return True


def export_triplets(data: VoronoiComplexData):
    """Sparse text export: per rank `rank rows cols nnz` + `i j value`."""
    lines = []
    for r in data.ranks:
        rows, cols = data.matrix_shape(r)
        entries = sorted(data.differentials.get(r, {}).items())
        lines.append(f"{r} {rows} {cols} {len(entries)}")
        for (i, j), v in entries:
            lines.append(f"{i} {j} {v}")
    return "\n".join(lines) + "\n"
