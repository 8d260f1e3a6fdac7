"""Concrete charts for generalized conformal structures and lightlike metrics.

A chart represents a field ``(x, r) -> a_ij(x, r)`` of exact
rational-function coefficients on a box domain: for each parameter value r
the symmetric matrix a(x, r) is a positive scalar product on the x-slice,
and the parameter traces out a curve of such products over every base
point.  The r-derivative field decides everything downstream: the structure
is *nowhere transversally Riemannian* when that derivative never vanishes
and *generic* when it is nondegenerate.

A lightlike chart is the degenerate companion: a positive semi-definite
metric on dimension base+1 whose kernel is exactly the last coordinate
direction.  Lifting a chart to its tautological lightlike metric and
quotienting back are exact inverse operations on the coefficient data.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .multilinear import SPECTRAL_TOL, BilinForm
from .ratfield import Poly, RationalField, _as_fraction

DEFAULT_GRID = 5

#: Maximum orders of exact differentiation offered by charts.
MAX_X_ORDER = 2
MAX_R_ORDER = 1


class TransversallyRiemannianError(ValueError):
    """The coefficient field does not depend on the parameter at all."""


def _check_box(box) -> list[tuple[float, float]]:
    out = []
    for lo, hi in box:
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise ValueError(f"degenerate box side [{lo}, {hi}]")
        out.append((lo, hi))
    return out


def _axis_samples(lo: float, hi: float, count: int) -> list[Fraction]:
    lo_f, hi_f = Fraction(lo), Fraction(hi)
    if count < 2:
        raise ValueError(f"grid must have at least 2 samples per axis, got {count}")
    step = (hi_f - lo_f) / (count - 1)
    return [lo_f + k * step for k in range(count)]


def _grid_points(box, interval, per_axis: int):
    axes = [_axis_samples(lo, hi, per_axis) for lo, hi in box]
    axes.append(_axis_samples(interval[0], interval[1], per_axis))
    idx = [0] * len(axes)
    while True:
        yield tuple(axes[k][idx[k]] for k in range(len(axes)))
        k = len(axes) - 1
        while k >= 0:
            idx[k] += 1
            if idx[k] < len(axes[k]):
                break
            idx[k] = 0
            k -= 1
        if k < 0:
            return


def _entries_matrix(dim: int, upper: dict[tuple[int, int], RationalField], nvars: int):
    zero = RationalField.const(nvars, 0)
    mat = [[zero for _ in range(dim)] for _ in range(dim)]
    for (i, j), f in upper.items():
        mat[i][j] = f
        mat[j][i] = f
    return mat


def _eval_entry_matrix(entries, point) -> np.ndarray:
    dim = len(entries)
    out = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            v = float(entries[i][j].eval(point))
            out[i, j] = v
            out[j, i] = v
    return out


@dataclass
class GcsChart:
    """Field of scalar products ``(x, r) -> sum a_ij(x, r) dx^i dx^j``.

    ``entries`` is the full symmetric matrix of rational-function
    coefficients in the variables (x_1, ..., x_n, r); construction verifies
    positive definiteness on a sample grid of the box domain times the
    parameter interval (a heuristic whose resolution every certificate
    records).
    """

    n: int
    domain: list[tuple[float, float]]
    interval: tuple[float, float]
    entries: list[list[RationalField]]
    name: str = "custom"
    params: dict = dc_field(default_factory=dict)
    grid: int = DEFAULT_GRID
    _deriv_cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.domain = _check_box(self.domain)
        if len(self.domain) != self.n:
            raise ValueError(f"domain has {len(self.domain)} sides, expected {self.n}")
        lo, hi = self.interval
        self.interval = (float(lo), float(hi))
        if not self.interval[0] < self.interval[1]:
            raise ValueError(f"degenerate parameter interval {self.interval}")
        nv = self.n + 1
        for row in self.entries:
            for f in row:
                if f.nvars != nv:
                    raise ValueError(
                        f"entry uses {f.nvars} variables, expected {nv} (x_1..x_n, r)"
                    )
        for i in range(self.n):
            for j in range(self.n):
                if self.entries[i][j] is not self.entries[j][i] and not (
                    self.entries[i][j].num == self.entries[j][i].num
                    and self.entries[i][j].den == self.entries[j][i].den
                ):
                    raise ValueError(f"entries are not symmetric at ({i}, {j})")
        self._check_positive_on_grid()

    def _check_positive_on_grid(self):
        for point in _grid_points(self.domain, self.interval, self.grid):
            try:
                m = _eval_entry_matrix(self.entries, point)
            except ZeroDivisionError as exc:
                raise ValueError(
                    f"denominator vanishes at grid point {tuple(map(float, point))}"
                ) from exc
            eigs = np.linalg.eigvalsh(m)
            if eigs[0] <= SPECTRAL_TOL * max(abs(eigs[-1]), 1.0) or eigs[-1] <= 0.0:
                raise ValueError(
                    f"coefficient matrix is not positive definite at grid point "
                    f"{tuple(map(float, point))} (min eigenvalue {eigs[0]:.3e})"
                )

    # -- exact evaluation ------------------------------------------------

    def _check_point(self, x, r) -> tuple[Fraction, ...]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        for k, (lo, hi) in enumerate(self.domain):
            slack = 1e-9 * (1.0 + hi - lo)
            if not (lo - slack <= x[k] <= hi + slack):
                raise ValueError(f"coordinate x[{k}] = {x[k]} outside [{lo}, {hi}]")
        lo, hi = self.interval
        slack = 1e-9 * (1.0 + hi - lo)
        if not (lo - slack <= float(r) <= hi + slack):
            raise ValueError(f"parameter r = {r} outside [{lo}, {hi}]")
        return tuple(Fraction(float(v)) for v in x) + (Fraction(float(r)),)

    def _derived_entry(self, i, j, xorders: tuple[int, ...], l: int) -> RationalField:
        key = (min(i, j), max(i, j), xorders, l)
        cached = self._deriv_cache.get(key)
        if cached is not None:
            return cached
        f = self.entries[i][j]
        for var, count in enumerate(xorders):
            for _ in range(count):
                f = f.diff(var)
        for _ in range(l):
            f = f.diff(self.n)
        self._deriv_cache[key] = f
        return f

    def eval_metric(self, x, r) -> BilinForm:
        """Exact evaluation of the scalar product at (x, r)."""
        point = self._check_point(x, r)
        try:
            m = _eval_entry_matrix(self.entries, point)
        except ZeroDivisionError as exc:
            raise ValueError(str(exc)) from exc
        form = BilinForm(m)
        if form.signature != (self.n, 0, 0):
            raise ValueError(
                f"metric is not positive definite at the requested point "
                f"(signature {form.signature})"
            )
        return form

    def eval_partials(self, x, r, m: int, l: int) -> np.ndarray:
        """Exact derivative tensors of the coefficient field.

        Returns an array of shape (n,)*m + (n, n): m symmetric slots for the
        base directions of differentiation, then the two form slots.  Orders
        are limited to m <= 2, l <= 1.
        """
        if not (0 <= m <= MAX_X_ORDER) or not (0 <= l <= MAX_R_ORDER):
            raise ValueError(f"derivative orders (m={m}, l={l}) out of range")
        point = self._check_point(x, r)
        n = self.n

        def entry(xorders):
            out = np.zeros((n, n))
            for i in range(n):
                for j in range(i, n):
                    v = float(self._derived_entry(i, j, xorders, l).eval(point))
                    out[i, j] = v
                    out[j, i] = v
            return out

        if m == 0:
            return entry((0,) * n)
        if m == 1:
            out = np.zeros((n, n, n))
            for w in range(n):
                orders = tuple(1 if k == w else 0 for k in range(n))
                out[w] = entry(orders)
            return out
        out = np.zeros((n, n, n, n))
        for w1 in range(n):
            for w2 in range(w1, n):
                orders = tuple(
                    (1 if k == w1 else 0) + (1 if k == w2 else 0) for k in range(n)
                )
                block = entry(orders)
                out[w1, w2] = block
                out[w2, w1] = block
        return out


@dataclass
class LightlikeChart:
    """Degenerate metric ``sum a_ij(x, t) dx^i dx^j`` on dimension base+1.

    The kernel is exactly the t-direction by construction: the coefficient
    matrix only pairs base directions.  ``entries`` is the base block, a
    (n-1) x (n-1) symmetric matrix of rational functions in
    (x_1, ..., x_{n-1}, t).
    """

    n: int  # total dimension, base + 1
    domain: list[tuple[float, float]]
    interval: tuple[float, float]
    entries: list[list[RationalField]]
    name: str = "custom"
    params: dict = dc_field(default_factory=dict)
    grid: int = DEFAULT_GRID
    _base_chart: GcsChart = dc_field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"lightlike chart needs total dimension >= 2, got {self.n}")
        # validation and evaluation are shared with the base-dimensional chart
        self._base_chart = GcsChart(
            n=self.n - 1,
            domain=self.domain,
            interval=self.interval,
            entries=self.entries,
            name=self.name,
            params=self.params,
            grid=self.grid,
        )
        self.domain = self._base_chart.domain
        self.interval = self._base_chart.interval

    @property
    def base_dim(self) -> int:
        return self.n - 1

    def eval_base_metric(self, x, t) -> BilinForm:
        """The positive-definite restriction to the base directions."""
        return self._base_chart.eval_metric(x, t)

    def eval_base_partials(self, x, t, m: int, l: int) -> np.ndarray:
        return self._base_chart.eval_partials(x, t, m, l)

    def eval_metric(self, x, t) -> BilinForm:
        """The full degenerate matrix, padded with the zero kernel row/column."""
        base = self.eval_base_metric(x, t).matrix
        full = np.zeros((self.n, self.n))
        full[: self.base_dim, : self.base_dim] = base
        return BilinForm(full)


@dataclass
class GenericityReport:
    """Grid diagnostics of the parameter-derivative field.

    ``nowhere_tr`` holds when the r-derivative is nonzero at every sampled
    point; ``generic`` additionally requires it to be nondegenerate there.
    The minimum absolute eigenvalue over the grid and the point attaining it
    witness the verdicts.
    """

    nowhere_tr: bool
    generic: bool
    worst_min_abs_eig: float
    worst_point: tuple[list[float], float]
    min_norm: float
    min_norm_point: tuple[list[float], float]
    grid: int
    tol: float


def genericity_report(
    chart: GcsChart | LightlikeChart, grid: int | None = None, tol: float = SPECTRAL_TOL
) -> GenericityReport:
    """Sample the r-derivative field over the chart's box and classify it."""
    base = chart._base_chart if isinstance(chart, LightlikeChart) else chart
    per_axis = grid if grid is not None else base.grid
    if per_axis < 2:
        raise ValueError(f"grid must be >= 2 per axis, got {per_axis}")
    n = base.n
    nowhere_tr = True
    generic = True
    worst = np.inf
    worst_point = None
    min_norm = np.inf
    min_norm_point = None
    for point in _grid_points(base.domain, base.interval, per_axis):
        d = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                v = float(base._derived_entry(i, j, (0,) * n, 1).eval(point))
                d[i, j] = v
                d[j, i] = v
        scale = max(
            float(np.max(np.abs(_eval_entry_matrix(base.entries, point)))), 1.0
        )
        norm = float(np.max(np.abs(d)))
        eigs = np.abs(np.linalg.eigvalsh(d))
        min_eig = float(eigs[0])
        floats = ([float(c) for c in point[:-1]], float(point[-1]))
        if norm <= tol * scale:
            nowhere_tr = False
        if min_eig <= tol * scale:
            generic = False
        if min_eig < worst:
            worst = min_eig
            worst_point = floats
        if norm < min_norm:
            min_norm = norm
            min_norm_point = floats
    return GenericityReport(
        nowhere_tr=nowhere_tr,
        generic=generic,
        worst_min_abs_eig=worst,
        worst_point=worst_point,
        min_norm=min_norm,
        min_norm_point=min_norm_point,
        grid=per_axis,
        tol=tol,
    )


def lift_to_lightlike(chart: GcsChart) -> LightlikeChart:
    """Tautological lightlike metric of a chart: same coefficients, one more
    dimension, with the parameter promoted to the kernel coordinate."""
    return LightlikeChart(
        n=chart.n + 1,
        domain=list(chart.domain),
        interval=chart.interval,
        entries=chart.entries,
        name=chart.name,
        params=dict(chart.params),
        grid=chart.grid,
    )


def quotient_to_gcs(lc: LightlikeChart) -> GcsChart:
    """Read the kernel coordinate of a lightlike chart as a curve parameter.

    Exact inverse of :func:`lift_to_lightlike` on the coefficient data.
    Refuses charts whose coefficients do not depend on t at all: those are
    transversally Riemannian and the projected family of scalar products
    degenerates to a point.
    """
    nb = lc.base_dim
    if all(
        lc.entries[i][j].diff(nb).is_zero for i in range(nb) for j in range(i, nb)
    ):
        raise TransversallyRiemannianError(
            "all coefficients are independent of t: the chart is transversally "
            "Riemannian and projects to a single scalar product, not a curve"
        )
    return GcsChart(
        n=nb,
        domain=list(lc.domain),
        interval=lc.interval,
        entries=lc.entries,
        name=lc.name,
        params=dict(lc.params),
        grid=lc.grid,
    )


def pullback_chart(chart: GcsChart, m, domain: list | None = None) -> GcsChart:
    """Pull the chart back along the linear base change x = M y.

    The new coefficient matrix is M^T (a o M) M, computed exactly; M must
    have rational entries.  When ``domain`` is omitted the box is shrunk so
    that its image stays inside the original domain.
    """
    n = chart.n
    mrows = [[_as_fraction(m[i][j]) for j in range(n)] for i in range(n)]
    nv = n + 1
    subst = [[Fraction(0)] * nv for _ in range(nv)]
    for i in range(n):
        for j in range(n):
            subst[i][j] = mrows[i][j]
    subst[n][n] = Fraction(1)
    composed = [[chart.entries[i][j].subst_linear(subst) for j in range(n)] for i in range(n)]
    zero = RationalField.const(nv, 0)
    new_entries = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = zero
            for k in range(n):
                for l in range(n):
                    c = mrows[k][i] * mrows[l][j]
                    if c != 0:
                        acc = acc + composed[k][l].scale(c)
            new_entries[i][j] = acc
            new_entries[j][i] = acc
    if domain is None:
        row_sums = [sum(abs(mrows[i][j]) for j in range(n)) for i in range(n)]
        amp = max(float(max(s, 1)) for s in row_sums)
        widths = [min(abs(lo), abs(hi)) for lo, hi in chart.domain]
        if any(lo > 0 or hi < 0 for lo, hi in chart.domain):
            raise ValueError("automatic domain shrinking needs 0 in the domain box")
        half = min(widths) / amp
        domain = [(-half, half)] * n
    return GcsChart(
        n=n,
        domain=domain,
        interval=chart.interval,
        entries=new_entries,
        name=f"{chart.name}:pullback",
        params=dict(chart.params),
        grid=chart.grid,
    )


# -- builtin catalog ------------------------------------------------------

BUILTIN_DESCRIPTIONS = {
    "conformal_flat": (
        "gcs",
        "ray of flat metrics a = r * Id; parameter derivative is the identity, "
        "so the structure is generic in every dimension",
    ),
    "product_nonrigid": (
        "gcs",
        "a = diag(r, 1+eps*r, ..., 1+eps*r); at eps = 0 the parameter only "
        "scales the first axis, the derivative has rank one and rigidity fails",
    ),
    "linear_hyperbolic": (
        "gcs",
        "metrics transported by the linear hyperbolic flow diag(e^s, e^-s) on a "
        "2-plane plus a flow direction weighted by an increasing positive f; "
        "a = diag(1/(1+r), 1+r, 1+f(r)), generic whenever f' > 0",
    ),
    "lightcone": (
        "lightlike",
        "cone of the quadratic form -x_1^2 + x_2^2 + ... in one dimension up, in "
        "stereographic coordinates: b = 4 t^2 / (1+|x|^2)^2 * Id on the base, "
        "degenerate along the ray direction t",
    ),
}


def builtin_chart(name: str, n: int | None = None, params: dict | None = None):
    """Construct a chart from the builtin catalog.

    Unknown names and invalid parameters raise ValueError; each chart
    satisfies the genericity profile stated in its catalog description.
    """
    params = dict(params or {})
    if name == "conformal_flat":
        return _conformal_flat(n if n is not None else 3, params)
    if name == "product_nonrigid":
        return _product_nonrigid(n if n is not None else 3, params)
    if name == "linear_hyperbolic":
        return _linear_hyperbolic(params)
    if name == "lightcone":
        return _lightcone(n if n is not None else 4, params)
    raise ValueError(
        f"unknown builtin '{name}'; available: {', '.join(sorted(BUILTIN_DESCRIPTIONS))}"
    )


def _interval_param(params: dict, default: tuple[float, float]) -> tuple[float, float]:
    iv = params.get("interval", default)
    if len(iv) != 2:
        raise ValueError(f"interval must be a pair, got {iv}")
    return (float(iv[0]), float(iv[1]))


def _domain_param(params: dict, n: int) -> list[tuple[float, float]]:
    dom = params.get("domain", [(-1.0, 1.0)] * n)
    if len(dom) != n:
        raise ValueError(f"domain must have {n} sides, got {len(dom)}")
    return [(float(lo), float(hi)) for lo, hi in dom]


def _known_params(params: dict, allowed: set[str]):
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"unknown parameter(s): {', '.join(sorted(unknown))}")


def _conformal_flat(n: int, params: dict) -> GcsChart:
    _known_params(params, {"interval", "domain"})
    nv = n + 1
    r = RationalField.from_poly(Poly.var(nv, n))
    zero = RationalField.const(nv, 0)
    entries = [[r if i == j else zero for j in range(n)] for i in range(n)]
    return GcsChart(
        n=n,
        domain=_domain_param(params, n),
        interval=_interval_param(params, (0.5, 2.0)),
        entries=entries,
        name="conformal_flat",
        params=params,
    )


def _product_nonrigid(n: int, params: dict) -> GcsChart:
    _known_params(params, {"interval", "domain", "epsilon"})
    eps = _as_fraction(params.get("epsilon", 0))
    if eps < 0:
        raise ValueError(f"epsilon must be >= 0, got {eps}")
    nv = n + 1
    r = RationalField.from_poly(Poly.var(nv, n))
    one = RationalField.const(nv, 1)
    zero = RationalField.const(nv, 0)
    off_diag = one + r.scale(eps) if eps != 0 else one
    entries = [
        [(r if i == 0 else off_diag) if i == j else zero for j in range(n)]
        for i in range(n)
    ]
    return GcsChart(
        n=n,
        domain=_domain_param(params, n),
        interval=_interval_param(params, (0.5, 2.0)),
        entries=entries,
        name="product_nonrigid",
        params=params,
    )


def _linear_hyperbolic(params: dict) -> GcsChart:
    _known_params(params, {"interval", "domain", "f_coeffs", "shift"})
    n = 3
    nv = n + 1
    interval = _interval_param(params, (0.0, 1.0))
    shift = _as_fraction(params.get("shift", 1))
    coeffs = [_as_fraction(c) for c in params.get("f_coeffs", [1, 0, 1])]
    # f is supplied in a shifted variable: f_used(r) = f(r + shift), the
    # shift keeping f and f' positive over the interval
    r_poly = Poly.var(nv, n)
    shifted = Poly.from_terms(nv, [(shift, (0,) * nv)]) + r_poly
    f_used = Poly.const(nv, 0)
    power = Poly.const(nv, 1)
    for c in coeffs:
        f_used = f_used + power.scale(c)
        power = power * shifted
    f_field = RationalField.from_poly(f_used)
    f_prime = RationalField.from_poly(f_used.diff(n))
    for rv in _axis_samples(interval[0], interval[1], 33):
        point = (Fraction(0),) * n + (rv,)
        if f_field.eval(point) <= 0:
            raise ValueError(f"f must be positive on the interval; fails at r = {float(rv)}")
        if f_prime.eval(point) <= 0:
            raise ValueError(
                f"f must be strictly increasing on the interval; f' fails at r = {float(rv)}"
            )
    one = Poly.const(nv, 1)
    one_plus_r = one + r_poly
    zero = RationalField.const(nv, 0)
    entries = [[zero for _ in range(n)] for _ in range(n)]
    entries[0][0] = RationalField(one, one_plus_r)
    entries[1][1] = RationalField.from_poly(one_plus_r)
    entries[2][2] = RationalField.from_poly(one + f_used)
    return GcsChart(
        n=n,
        domain=_domain_param(params, n),
        interval=interval,
        entries=entries,
        name="linear_hyperbolic",
        params=params,
    )


def _lightcone(n: int, params: dict) -> LightlikeChart:
    _known_params(params, {"interval", "domain"})
    if n < 2:
        raise ValueError(f"lightcone needs total dimension >= 2, got {n}")
    nb = n - 1
    nv = nb + 1
    # base block 4 t^2 / (1 + |x|^2)^2 * Id in stereographic coordinates
    t = Poly.var(nv, nb)
    norm2 = Poly.const(nv, 1)
    for k in range(nb):
        xk = Poly.var(nv, k)
        norm2 = norm2 + xk * xk
    den = norm2 * norm2
    num = (t * t).scale(4)
    diag = RationalField(num, den)
    zero = RationalField.const(nv, 0)
    entries = [[diag if i == j else zero for j in range(nb)] for i in range(nb)]
    return LightlikeChart(
        n=n,
        domain=params.get("domain", [(-0.5, 0.5)] * nb),
        interval=_interval_param(params, (0.5, 2.0)),
        entries=entries,
        name="lightcone",
        params=params,
    )


# -- JSON chart schema -----------------------------------------------------

_CHART_KEYS = {"kind", "n", "domain", "interval", "entries", "builtin", "params"}


def chart_from_doc(doc: dict) -> GcsChart | LightlikeChart:
    """Build a chart from its JSON document form.

    Either a builtin reference ``{"builtin": name, "n": ..., "params": ...}``
    or an explicit coefficient listing; unknown fields are rejected.
    Coefficients are decimal or fraction strings, parsed exactly.
    """
    if not isinstance(doc, dict):
        raise ValueError("chart document must be a JSON object")
    unknown = set(doc) - _CHART_KEYS
    if unknown:
        raise ValueError(f"unknown chart field(s): {', '.join(sorted(unknown))}")
    if doc.get("builtin") is not None and "entries" not in doc:
        return builtin_chart(doc["builtin"], n=doc.get("n"), params=doc.get("params"))
    for key in ("n", "domain", "interval", "entries"):
        if key not in doc:
            raise ValueError(f"chart document is missing '{key}'")
    kind = doc.get("kind", "gcs")
    n = int(doc["n"])
    coeff_dim = n if kind == "gcs" else n - 1
    nv = coeff_dim + 1
    upper: dict[tuple[int, int], RationalField] = {}
    for item in doc["entries"]:
        extra = set(item) - {"i", "j", "num", "den"}
        if extra:
            raise ValueError(f"unknown entry field(s): {', '.join(sorted(extra))}")
        i, j = int(item["i"]), int(item["j"])
        if not (0 <= i < coeff_dim and 0 <= j < coeff_dim):
            raise ValueError(f"entry index ({i}, {j}) out of range for dimension {coeff_dim}")
        num = Poly.from_terms(nv, [(c, e) for c, e in item["num"]])
        den_terms = item.get("den") or [["1", [0] * nv]]
        den = Poly.from_terms(nv, [(c, e) for c, e in den_terms])
        key = (min(i, j), max(i, j))
        if key in upper:
            raise ValueError(f"duplicate entry for ({i}, {j})")
        upper[key] = RationalField(num, den)
    if kind not in ("gcs", "lightlike"):
        raise ValueError(f"unknown chart kind '{kind}'")
    entries = _entries_matrix(coeff_dim, upper, nv)
    cls = GcsChart if kind == "gcs" else LightlikeChart
    return cls(
        n=n,
        domain=[tuple(side) for side in doc["domain"]],
        interval=tuple(doc["interval"]),
        entries=entries,
        name=doc.get("builtin") or "custom",
    )


def chart_to_doc(chart: GcsChart | LightlikeChart) -> dict:
    """Serialize a chart to its JSON document form (exact coefficients)."""
    kind = "lightlike" if isinstance(chart, LightlikeChart) else "gcs"
    coeff_dim = chart.base_dim if isinstance(chart, LightlikeChart) else chart.n
    entries = []
    for i in range(coeff_dim):
        for j in range(i, coeff_dim):
            f = chart.entries[i][j]
            if f.is_zero:
                continue
            entries.append(
                {
                    "i": i,
                    "j": j,
                    "num": f.num.to_json_terms(),
                    "den": f.den.to_json_terms(),
                }
            )
    return {
        "kind": kind,
        "n": chart.n,
        "domain": [[lo, hi] for lo, hi in chart.domain],
        "interval": [chart.interval[0], chart.interval[1]],
        "entries": entries,
        "builtin": chart.name if chart.name in BUILTIN_DESCRIPTIONS else None,
        "params": {k: str(v) for k, v in sorted(chart.params.items())},
    }
