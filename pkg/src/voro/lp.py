"""Exact rational linear programming with mandatory dual certificates.

The solver is a dense two-phase simplex with Bland's rule over gmpy2
rationals.  Every outcome carries a certificate (dual multipliers, a
Farkas combination, or an unbounded ray) and is re-verified by exact
substitution before it is returned; a verification failure is an
internal defect and raises.

A float pass with the same pivot code can be used to guess the optimal
basis first (`solve_with_float_presolve`); the guess is certified
exactly and on any failure the exact solver runs from scratch.
"""

from dataclasses import dataclass

from .ratlin import QQ, vec_dot


@dataclass(frozen=True)
class AffineFunc:
    """phi(x) = coeffs . x + const."""

    coeffs: tuple
    const: object

    @classmethod
    def make(cls, coeffs, const=0):
        return cls(tuple(QQ(c) for c in coeffs), QQ(const))

    def __call__(self, x):
        return vec_dot(self.coeffs, x) + self.const


@dataclass(frozen=True)
class LinearProgram:
    """minimize objective subject to eq(x) == 0 and ineq(x) >= 0."""

    num_vars: int
    objective: AffineFunc
    equalities: tuple = ()
    inequalities: tuple = ()

    def __post_init__(self):
        for f in (self.objective, *self.equalities, *self.inequalities):
            if len(f.coeffs) != self.num_vars:
                raise ValueError("constraint arity differs from num_vars")


OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpOutcome:
    status: str
    x: list = None
    value: object = None
    # optimal: objective == dual_const + sum(dual_ineq . inequalities)
    #                      + sum(dual_eq . equalities), dual_ineq >= 0
    dual_const: object = None
    dual_ineq: list = None
    dual_eq: list = None
    # infeasible: farkas_ineq . inequalities + farkas_eq . equalities == gap < 0
    farkas_ineq: list = None
    farkas_eq: list = None
    farkas_gap: object = None
    # unbounded: x feasible, ray keeps feasibility, objective decreases
    ray: list = None


class CertificateError(RuntimeError):
    """An internally produced certificate failed exact verification."""


# ---------------------------------------------------------------------------
# arithmetic adapters


class _Exact:
    zero = QQ(0)

    @staticmethod
    def of(v):
        return QQ(v)

    @staticmethod
    def is_pos(v):
        return v > 0

    @staticmethod
    def is_neg(v):
        return v < 0


class _Float:
    zero = 0.0
    eps = 1e-9

    @staticmethod
    def of(v):
        return float(v)

    @staticmethod
    def is_pos(v):
        return v > _Float.eps

    @staticmethod
    def is_neg(v):
        return v < -_Float.eps


# ---------------------------------------------------------------------------
# standard form
#
# z = (u, w, s) >= 0 encodes x = u - w with one surplus variable per
# inequality:  E(u-w) = e,  G(u-w) - s = g.


class _Standard:
    def __init__(self, lp: LinearProgram):
        n = lp.num_vars
        self.lp = lp
        self.n = n
        self.n_eq = len(lp.equalities)
        self.n_in = len(lp.inequalities)
        self.ncols = 2 * n + self.n_in
        rows = []
        rhs = []
        for f in lp.equalities:
            rows.append(list(f.coeffs) + [-c for c in f.coeffs] + [0] * self.n_in)
            rhs.append(-f.const)
        for k, f in enumerate(lp.inequalities):
            surplus = [0] * self.n_in
            surplus[k] = -1
            rows.append(list(f.coeffs) + [-c for c in f.coeffs] + surplus)
            rhs.append(-f.const)
        self.rows = rows
        self.rhs = rhs
        self.cost = (
            list(lp.objective.coeffs)
            + [-c for c in lp.objective.coeffs]
            + [0] * self.n_in
        )

    def x_from_z(self, z):
        n = self.n
        return [z[i] - z[n + i] for i in range(n)]


def _simplex(ar, rows, rhs, cost, ncols):
    """Two-phase tableau simplex with Bland's rule.

    rows/rhs/cost are already in the adapter's arithmetic.  Returns
    (status, info) where info depends on status:
      optimal   -> (z, basis, y) with y the duals per row
      unbounded -> (z, basis, entering, direction_column)
      infeasible-> (y,) phase-1 duals with y.A <= 0, y.b > 0
    """
    m = len(rows)
    # scale rows to nonnegative rhs; duals are reported on scaled rows,
    # so the sign vector is part of every result
    t = [list(r) for r in rows]
    b = list(rhs)
    signs = [1] * m
    for i in range(m):
        if ar.is_neg(b[i]):
            t[i] = [-v for v in t[i]]
            b[i] = -b[i]
            signs[i] = -1
    # tableau with artificial columns appended
    total = ncols + m
    for i in range(m):
        art = [ar.zero] * m
        art[i] = ar.of(1)
        t[i] = t[i] + art
    basis = [ncols + i for i in range(m)]

    def pivot(r, c):
        pr = t[r]
        piv = pr[c]
        inv = ar.of(1) / piv
        t[r] = [v * inv for v in pr]
        b[r] = b[r] * inv
        pr = t[r]
        for i in range(m):
            if i != r:
                f = t[i][c]
                if f == ar.zero:
                    continue
                t[i] = [v - f * wv for v, wv in zip(t[i], pr)]
                b[i] = b[i] - f * b[r]
        basis[r] = c

    def run_phase(costvec, allowed):
        # returns ("optimal", y) or ("unbounded", (entering,))
        while True:
            # reduced costs: c_j - y.A_j with y = c_B B^-1 read from tableau
            y = [ar.zero] * m
            # reconstruct duals lazily only at exit; pivot on reduced costs
            # computed directly: rc_j = c_j - sum_i c_B[i] * t[i][j]
            cb = [costvec[j] if j < len(costvec) else ar.zero for j in basis]
            entering = -1
            for j in range(total):
                if j not in allowed:
                    continue
                cj = costvec[j] if j < len(costvec) else ar.zero
                rc = cj
                for i in range(m):
                    if cb[i] != ar.zero and t[i][j] != ar.zero:
                        rc = rc - cb[i] * t[i][j]
                if ar.is_neg(rc):
                    entering = j
                    break  # Bland: lowest index
            if entering < 0:
                return "optimal", None
            # ratio test, Bland ties by lowest basis index
            leave = -1
            best = None
            for i in range(m):
                if ar.is_pos(t[i][entering]):
                    ratio = b[i] / t[i][entering]
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded", entering
            pivot(leave, entering)

    # phase 1
    art_cost = [ar.zero] * ncols + [ar.of(1)] * m
    allowed = set(range(total))
    status, info = run_phase(art_cost, allowed)
    if status == "unbounded":  # cannot happen: phase-1 objective bounded below
        raise CertificateError("phase-1 unbounded")
    p1val = sum((b[i] for i in range(m) if basis[i] >= ncols), ar.zero)
    if ar.is_pos(p1val):
        # infeasible: duals from y_i = c_B B^-1 via artificial columns
        cb = [art_cost[j] for j in basis]
        y = []
        for i in range(m):
            yi = ar.zero
            for r in range(m):
                if cb[r] != ar.zero:
                    yi = yi + cb[r] * t[r][ncols + i]
            y.append(yi * signs[i])
        return "infeasible", (y,)

    # drive remaining artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= ncols:
            piv = -1
            for j in range(ncols):
                if t[i][j] != ar.zero:
                    piv = j
                    break
            if piv >= 0:
                pivot(i, piv)
    # rows still basic in an artificial are identically zero; freeze them
    allowed = set(range(ncols)) | {basis[i] for i in range(m) if basis[i] >= ncols}

    status, info = run_phase(list(cost), allowed)
    if status == "unbounded":
        entering = info
        direction = [t[i][entering] for i in range(m)]
        z = _z_from_basis(ar, basis, b, ncols)
        return "unbounded", (z, list(basis), entering, direction)
    cb = [cost[j] if j < ncols else ar.zero for j in basis]
    y = []
    for i in range(m):
        yi = ar.zero
        for r in range(m):
            if cb[r] != ar.zero:
                yi = yi + cb[r] * t[r][ncols + i]
        y.append(yi * signs[i])
    z = _z_from_basis(ar, basis, b, ncols)
    return "optimal", (z, list(basis), y)


def _z_from_basis(ar, basis, b, ncols):
    z = [ar.zero] * ncols
    for i, j in enumerate(basis):
        if j < ncols:
            z[j] = b[i]
    return z


# ---------------------------------------------------------------------------
# public solvers


def solve_exact(lp: LinearProgram) -> LpOutcome:
    """Exact simplex; the returned certificate is verified before return."""
    std = _Standard(lp)
    rows = [[QQ(v) for v in r] for r in std.rows]
    rhs = [QQ(v) for v in std.rhs]
    cost = [QQ(v) for v in std.cost]
    status, info = _simplex(_Exact, rows, rhs, cost, std.ncols)
    out = _outcome_from(lp, std, status, info)
    verify_outcome(lp, out)
    return out


def _outcome_from(lp, std, status, info):
    if status == "infeasible":
        (y,) = info
        mu = [y[i] for i in range(std.n_eq)]
        beta = [y[std.n_eq + k] for k in range(std.n_in)]
        gap = QQ(0)
        for c, f in zip(mu, lp.equalities):
            gap += c * f.const
        for c, f in zip(beta, lp.inequalities):
            gap += c * f.const
        # functional sum(mu psi) + sum(beta phi) is the constant `gap`
        return LpOutcome(
            INFEASIBLE, farkas_eq=mu, farkas_ineq=beta, farkas_gap=gap
        )
    if status == "unbounded":
        z, basis, entering, direction = info
        dz = [QQ(0)] * std.ncols
        if entering < std.ncols:
            dz[entering] = QQ(1)
        for i, j in enumerate(basis):
            if j < std.ncols:
                dz[j] = -direction[i]
        x0 = std.x_from_z(z)
        d = std.x_from_z(dz)
        return LpOutcome(UNBOUNDED, x=x0, ray=d)
    z, basis, y = info
    x = std.x_from_z(z)
    mu = [y[i] for i in range(std.n_eq)]
    beta = [y[std.n_eq + k] for k in range(std.n_in)]
    # objective == m + sum beta phi + sum mu psi; the phi carry their own
    # constants, hence m absorbs them with opposite sign
    m0 = lp.objective.const
    for c, f in zip(mu, lp.equalities):
        m0 -= c * f.const
    for c, f in zip(beta, lp.inequalities):
        m0 -= c * f.const
    value = lp.objective(x)
    return LpOutcome(
        OPTIMAL, x=x, value=value, dual_const=m0, dual_ineq=beta, dual_eq=mu
    )


def verify_outcome(lp: LinearProgram, out: LpOutcome):
    """Exact substitution check of the certificate; raises on failure."""
    n = lp.num_vars
    if out.status == OPTIMAL:
        x = out.x
        for f in lp.equalities:
            if f(x) != 0:
                raise CertificateError("primal equality violated")
        for f in lp.inequalities:
            if f(x) < 0:
                raise CertificateError("primal inequality violated")
        if any(b < 0 for b in out.dual_ineq):
            raise CertificateError("negative dual multiplier")
        # coefficientwise identity objective == m + sum beta phi + sum mu psi
        for k in range(n):
            lhs = lp.objective.coeffs[k]
            rhs = QQ(0)
            for c, f in zip(out.dual_eq, lp.equalities):
                rhs += c * f.coeffs[k]
            for c, f in zip(out.dual_ineq, lp.inequalities):
                rhs += c * f.coeffs[k]
            if lhs != rhs:
                raise CertificateError("dual identity fails on coefficients")
        rhs = out.dual_const
        for c, f in zip(out.dual_eq, lp.equalities):
            rhs += c * f.const
        for c, f in zip(out.dual_ineq, lp.inequalities):
            rhs += c * f.const
        if lp.objective.const != rhs:
            raise CertificateError("dual identity fails on constants")
        # complementary slackness certifies optimality of the value
        slack = sum(
            (c * f(x) for c, f in zip(out.dual_ineq, lp.inequalities)), QQ(0)
        )
        if slack != 0 or out.value != lp.objective(x) or out.value != out.dual_const:
            raise CertificateError("value does not match dual bound")
    elif out.status == INFEASIBLE:
        for k in range(n):
            acc = QQ(0)
            for c, f in zip(out.farkas_eq, lp.equalities):
                acc += c * f.coeffs[k]
            for c, f in zip(out.farkas_ineq, lp.inequalities):
                acc += c * f.coeffs[k]
            if acc != 0:
                raise CertificateError("farkas combination not constant")
        if any(c < 0 for c in out.farkas_ineq):
            raise CertificateError("farkas multiplier negative")
        if out.farkas_gap >= 0:
            raise CertificateError("farkas gap not negative")
        gap = QQ(0)
        for c, f in zip(out.farkas_eq, lp.equalities):
            gap += c * f.const
        for c, f in zip(out.farkas_ineq, lp.inequalities):
            gap += c * f.const
        if gap != out.farkas_gap:
            raise CertificateError("farkas gap mismatch")
    elif out.status == UNBOUNDED:
        x, d = out.x, out.ray
        for f in lp.equalities:
            if f(x) != 0 or vec_dot(f.coeffs, d) != 0:
                raise CertificateError("ray leaves equality set")
        for f in lp.inequalities:
            if f(x) < 0 or vec_dot(f.coeffs, d) < 0:
                raise CertificateError("ray leaves inequality set")
        if vec_dot(lp.objective.coeffs, d) >= 0:
            raise CertificateError("ray does not improve objective")
    else:
        raise CertificateError("unknown status")


def solve_with_float_presolve(lp: LinearProgram) -> LpOutcome:
    """Simplex in doubles to guess a basis, exact certification on top.

    The float stage only proposes a basis; primal and dual candidates are
    reconstructed by exact basis solves and verified.  On any failure the
    exact solver runs from scratch.
    """
    std = _Standard(lp)
    try:
        rows = [[float(v) for v in r] for r in std.rows]
        rhs = [float(v) for v in std.rhs]
        cost = [float(v) for v in std.cost]
        status, info = _simplex(_Float, rows, rhs, cost, std.ncols)
        if status == "optimal":
            out = _certify_basis(lp, std, info[1])
            if out is not None:
                verify_outcome(lp, out)
                return out
    except (ZeroDivisionError, OverflowError, CertificateError):
        pass
    return solve_exact(lp)


def _certify_basis(lp, std, basis):
    """Exact reconstruction of the primal/dual pair from a float basis."""
    m = len(std.rows)
    total_rows = [list(map(QQ, r)) + [QQ(0)] * m for r in std.rows]
    for i in range(m):
        total_rows[i][std.ncols + i] = QQ(1)
    rhs = [QQ(v) for v in std.rhs]
    cols = list(basis)
    bmat = [[total_rows[i][j] for j in cols] for i in range(m)]
    from . import ratlin

    binv = ratlin.mat_inverse(bmat)
    if binv is None:
        return None
    xb = ratlin.mat_vec(binv, rhs)
    if any(v < 0 for v in xb):
        return None
    if any(cols[i] >= std.ncols and xb[i] != 0 for i in range(m)):
        return None  # artificial basic at nonzero level
    cost = [QQ(v) for v in std.cost] + [QQ(0)] * m
    cb = [cost[j] for j in cols]
    y = ratlin.mat_vec(ratlin.mat_transpose(binv), cb)
    # reduced costs must be nonnegative everywhere for optimality
    for j in range(std.ncols):
        rc = cost[j] - vec_dot(y, [total_rows[i][j] for i in range(m)])
        if rc < 0:
            return None
    z = [QQ(0)] * std.ncols
    for i, j in enumerate(cols):
        if j < std.ncols:
            z[j] = xb[i]
    return _outcome_from(lp, std, "optimal", (z, cols, y))


# ---------------------------------------------------------------------------
# debug dump (line-based `min / st / end` format)


def dump_lp(lp: LinearProgram) -> str:
    lines = ["min " + " ".join(str(c) for c in lp.objective.coeffs) + " | "
             + str(lp.objective.const), "st"]
    for f in lp.equalities:
        lines.append(
            "eq " + " ".join(str(c) for c in f.coeffs) + " | " + str(f.const)
        )
    for f in lp.inequalities:
        lines.append(
            "ge " + " ".join(str(c) for c in f.coeffs) + " | " + str(f.const)
        )
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_lp(text: str) -> LinearProgram:
    obj = None
    eqs = []
    ins = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line in ("st", "end") or line.startswith("#"):
            continue
        tag, rest = line.split(None, 1)
        coeff_part, const_part = rest.split("|")
        coeffs = [QQ(tok) for tok in coeff_part.split()]
        const = QQ(const_part.strip())
        f = AffineFunc.make(coeffs, const)
        if tag == "min":
            obj = f
        elif tag == "eq":
            eqs.append(f)
        elif tag == "ge":
            ins.append(f)
        else:
            raise ValueError(f"bad dump line: {line}")
    if obj is None:
        raise ValueError("dump has no objective")
    return LinearProgram(len(obj.coeffs), obj, tuple(eqs), tuple(ins))

