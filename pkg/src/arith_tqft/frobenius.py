"""The universal 𝕌_p-extended Frobenius algebra and generic diagram evaluation.

The universal algebra is free of rank 2 over the scalar ring ℤ[h, t] extended
by nilpotent level symbols [r] — one per finite orientability level r — subject
to

    2·[r] = 0,      [r]·[r'] = h·([r] + [r'] - [min(r, r')]),      [inf] = 0.

A scalar is therefore "an integer polynomial plus an 𝔽₂[h, t]-combination of
brackets".  The algebra itself has basis (1, x) with

    x² = t + h·x,        Δ(1) = 1⊗x + x⊗1 - h·1⊗1,      Δ(x) = t·1⊗1 + x⊗x,
    ε(1) = 0, ε(x) = 1,  φ_α(x) = [level(α)] + x.

Every identity that holds here holds in any specialization, which is what makes
this the universal target for symbolic evaluation of cobordism diagrams.

`evaluate_diagram` and `check_axioms` are generic: they drive any algebra
object exposing `dim`, `max_dim`, `basis_names`, `token_matrix`, and
`identity_matrix` (see dw.DWAlgebra for the finite-group specialization).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .cobordism import TORUS, Diagram, Token
from .errors import ComputationError, ValidationError
from .units import INF, PadicUnit, format_unit, level, one, sample_units

DEFAULT_MAX_LEVEL = 6

# -- sparse bivariate polynomials ----------------------------------------------------
# Terms are {(i, j): c} standing for Σ c · h^i · t^j; mod 0 means over ℤ.


def _pnorm(terms, mod):
    out = {}
    for key, c in terms.items():
        c = c % mod if mod else c
        if c:
            out[key] = c
    return out


def _padd(a, b, mod):
    out = dict(a)
    for key, c in b.items():
        out[key] = out.get(key, 0) + c
    return _pnorm(out, mod)


def _pmul(a, b, mod):
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return _pnorm(out, mod)


def _fmt_monomial(i, j):
    parts = []
    if i:
        parts.append("h" if i == 1 else f"h^{i}")
    if j:
        parts.append("t" if j == 1 else f"t^{j}")
    return "".join(parts)


def _fmt_poly(terms):
    if not terms:
        return "0"
    chunks = []
    for (i, j), c in sorted(terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])):
        mono = _fmt_monomial(i, j)
        if not mono:
            text = str(abs(c))
        elif abs(c) == 1:
            text = mono
        else:
            text = f"{abs(c)}{mono}"
        chunks.append(("- " if c < 0 else "+ ") + text)
    first = chunks[0][2:] if chunks[0].startswith("+ ") else "-" + chunks[0][2:]
    return " ".join([first] + chunks[1:])


# -- scalars -------------------------------------------------------------------------


@dataclass(frozen=True)
class UniversalScalar:
    """free + Σ_r poly_r·[r]: `free` over ℤ, bracket coefficients over 𝔽₂."""

    free: tuple = ()  # sorted (((i, j), c), ...)
    brackets: tuple = ()  # sorted ((r, (((i, j), 1), ...)), ...), finite r only

    @staticmethod
    def _make(free_dict, bracket_dicts):
        free = tuple(sorted(_pnorm(free_dict, 0).items()))
        brs = []
        for r, poly in bracket_dicts.items():
            poly = _pnorm(poly, 2)
            if poly:
                brs.append((r, tuple(sorted(poly.items()))))
        return UniversalScalar(free, tuple(sorted(brs)))

    @staticmethod
    def from_int(c: int) -> "UniversalScalar":
        return UniversalScalar._make({(0, 0): c}, {})

    @staticmethod
    def monomial(i: int, j: int, c: int = 1) -> "UniversalScalar":
        return UniversalScalar._make({(i, j): c}, {})

    def _parts(self):
        return dict(self.free), {r: dict(poly) for r, poly in self.brackets}

    def __add__(self, other):
        other = as_scalar(other)
        f1, b1 = self._parts()
        f2, b2 = other._parts()
        for r, poly in b2.items():
            b1[r] = _padd(b1.get(r, {}), poly, 2)
        return UniversalScalar._make(_padd(f1, f2, 0), b1)

    __radd__ = __add__

    def __neg__(self):
        f, b = self._parts()
        return UniversalScalar._make({k: -c for k, c in f.items()}, b)

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        f1, b1 = self._parts()
        f2, b2 = other._parts()
        free = _pmul(f1, f2, 0)
        brackets = {}

        def put(r, poly):
            brackets[r] = _padd(brackets.get(r, {}), poly, 2)

        for r, poly in b2.items():
            put(r, _pmul(f1, poly, 2))
        for r, poly in b1.items():
            put(r, _pmul(poly, f2, 2))
        h = {(1, 0): 1}
        for r, pr in b1.items():
            for s, ps in b2.items():
                cross = _pmul(_pmul(pr, ps, 2), h, 2)
                if r == s:
                    put(r, cross)  # [r]² = h·[r]
                else:  # [r][s] = h([r] + [s] - [min]); -1 ≡ 1 on brackets
                    put(r, cross)
                    put(s, cross)
                    put(min(r, s), cross)
        return UniversalScalar._make(free, brackets)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValidationError("bad-spec", "scalar powers take a nonnegative integer")
        out = UniversalScalar.from_int(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = UniversalScalar.from_int(other)
        if not isinstance(other, UniversalScalar):
            return NotImplemented
        return self.free == other.free and self.brackets == other.brackets

    def __hash__(self):
        if not self.brackets and len(self.free) <= 1:
            if not self.free:
                return hash(0)
            (key, c) = self.free[0]
            if key == (0, 0):
                return hash(c)
        return hash((self.free, self.brackets))

    def __bool__(self):
        return bool(self.free or self.brackets)

    def __str__(self):
        pieces = []
        if self.free or not self.brackets:
            pieces.append(_fmt_poly(dict(self.free)))
        for r, poly in self.brackets:
            poly = dict(poly)
            if poly == {(0, 0): 1}:
                pieces.append(f"[{r}]")
            elif len(poly) == 1 and next(iter(poly.values())) == 1:
                (i, j) = next(iter(poly))
                pieces.append(f"{_fmt_monomial(i, j)}[{r}]")
            else:
                pieces.append(f"({_fmt_poly(poly)})[{r}]")
        return " + ".join(pieces)

    def to_json(self):
        return {
            "free": [[i, j, c] for (i, j), c in self.free],
            "brackets": [[r, [[i, j, c] for (i, j), c in poly]] for r, poly in self.brackets],
        }


def as_scalar(v) -> UniversalScalar:
    if isinstance(v, UniversalScalar):
        return v
    if isinstance(v, int):
        return UniversalScalar.from_int(v)
    raise ValidationError("bad-spec", f"not a universal scalar: {v!r}")


H = UniversalScalar.monomial(1, 0)
T = UniversalScalar.monomial(0, 1)


def bracket(r, max_level: int = DEFAULT_MAX_LEVEL) -> UniversalScalar:
    """The level symbol [r]; [inf] = 0.  Finite levels live in the window 1..max_level."""
    if r == INF:
        return UniversalScalar()
    if not (isinstance(r, int) and 1 <= r <= max_level):
        raise ValidationError(
            "level-window", f"bracket level {r!r} outside the window 1..{max_level}, inf"
        )
    return UniversalScalar((), ((r, (((0, 0), 1),)),))


# -- elements ------------------------------------------------------------------------


@dataclass(frozen=True)
class UniversalElem:
    """a + b·x in the rank-2 universal algebra."""

    a: UniversalScalar = UniversalScalar()
    b: UniversalScalar = UniversalScalar()

    def __post_init__(self):
        object.__setattr__(self, "a", as_scalar(self.a))
        object.__setattr__(self, "b", as_scalar(self.b))

    def __add__(self, other):
        return UniversalElem(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return UniversalElem(self.a - other.a, self.b - other.b)

    def scale(self, s):
        s = as_scalar(s)
        return UniversalElem(s * self.a, s * self.b)

    def __str__(self):
        return f"({self.a}) + ({self.b})x"

    def to_json(self):
        return {"a": self.a.to_json(), "b": self.b.to_json()}


ONE = UniversalElem(1, 0)
X = UniversalElem(0, 1)


def universal_mul(v: UniversalElem, w: UniversalElem) -> UniversalElem:
    """(a₁ + b₁x)(a₂ + b₂x) with x² = t + h·x."""
    return UniversalElem(
        v.a * w.a + T * (v.b * w.b),
        v.a * w.b + v.b * w.a + H * (v.b * w.b),
    )


def universal_delta(v: UniversalElem) -> list:
    """Δ(v) as a list of simple-tensor pairs: Δ(a + bx) = (a + bx)⊗x + ((tb - ha) + ax)⊗1."""
    return [
        (UniversalElem(v.a, v.b), X),
        (UniversalElem(T * v.b - H * v.a, v.a), ONE),
    ]


def universal_eps(v: UniversalElem) -> UniversalScalar:
    """ε(a + bx) = b."""
    return v.b


def universal_iota(s) -> UniversalElem:
    """ι(s) = s·1."""
    return UniversalElem(as_scalar(s), UniversalScalar())


def _phi_level(r, v: UniversalElem, max_level: int = DEFAULT_MAX_LEVEL) -> UniversalElem:
    return UniversalElem(v.a + bracket(r, max_level) * v.b, v.b)


def universal_phi(u: PadicUnit, v: UniversalElem) -> UniversalElem:
    """φ_u(a + bx) = (a + [level(u)]·b) + b·x — the action only sees the level."""
    if not isinstance(u, PadicUnit):
        raise ValidationError("not-a-unit", f"φ takes a PadicUnit, got {type(u).__name__}")
    return _phi_level(level(u), v)


# -- generic matrices ----------------------------------------------------------------


@dataclass(frozen=True)
class GenericMatrix:
    """A dense matrix over any ring whose elements support +, *, and ==."""

    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValidationError("bad-spec", "ragged matrix rows")

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @staticmethod
    def identity(n: int) -> "GenericMatrix":
        return GenericMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "GenericMatrix") -> "GenericMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValidationError("bad-spec", f"cannot multiply {self.shape} by {other.shape}")
        cols = tuple(zip(*other.rows)) if other.rows else ()
        return GenericMatrix(
            tuple(
                tuple(sum((a * b for a, b in zip(row, col) if a and b), 0) for col in cols)
                for row in self.rows
            )
        )

    def kron(self, other: "GenericMatrix") -> "GenericMatrix":
        n, k = self.shape
        m, l = other.shape
        return GenericMatrix(
            tuple(
                tuple(self.rows[i][j] * other.rows[i2][j2] for j in range(k) for j2 in range(l))
                for i in range(n)
                for i2 in range(m)
            )
        )


# -- the universal algebra as an evaluation target -----------------------------------


class UniversalAlgebra:
    """Matrix model of the universal algebra: basis (1, x), columns act on inputs."""

    name = "universal"
    dim = 2
    max_dim = 64
    basis_names = ("1", "x")

    def __init__(self, max_level: int = DEFAULT_MAX_LEVEL, precheck=("F1", "F2", "F3", "F4", "F5", "FS"), overrides=None):
        self.max_level = max_level
        self.precheck = tuple(precheck)
        self._overrides = dict(overrides or {})
        self._matrices = {}
        self._kappa = {}
        self._precheck_ok = False

    p = 3  # canonical odd prime for default unit sampling; φ only sees levels

    def identity_matrix(self, n: int) -> GenericMatrix:
        return GenericMatrix.identity(n)

    def basis_elem(self, i: int) -> UniversalElem:
        return (ONE, X)[i]

    def _columns(self, images, out_dim):
        def coords(v: UniversalElem):
            return (v.a, v.b)

        cols = [coords(v) for v in images]
        return GenericMatrix(tuple(tuple(col[i] for col in cols) for i in range(out_dim)))

    def kappa(self, r) -> UniversalElem:
        """The handle element κ_r = m∘(φ_α⊗id)∘Δ∘ι(1) for any α of level r (cached)."""
        if r not in self._kappa:
            total = UniversalElem()
            for u, w in universal_delta(ONE):
                total = total + universal_mul(_phi_level(r, u, self.max_level), w)
            self._kappa[r] = total
        return self._kappa[r]

    def token_matrix(self, tok: Token) -> GenericMatrix:
        if tok.kind in self._overrides:
            return self._overrides[tok.kind]
        if tok in self._matrices:
            return self._matrices[tok]
        basis = [ONE, X]
        if tok.kind == "m":
            mat = self._columns([universal_mul(u, w) for u in basis for w in basis], 2)
        elif tok.kind == "d":
            rows = []
            for v in basis:
                flat = [UniversalScalar()] * 4
                for u, w in universal_delta(v):
                    for i, ui in enumerate((u.a, u.b)):
                        for j, wj in enumerate((w.a, w.b)):
                            flat[2 * i + j] = flat[2 * i + j] + ui * wj
                rows.append(flat)
            mat = GenericMatrix(tuple(zip(*rows)))
        elif tok.kind == "cup":
            mat = GenericMatrix(((universal_eps(ONE), universal_eps(X)),))
        elif tok.kind == "cap":
            v = universal_iota(1)
            mat = GenericMatrix(((v.a,), (v.b,)))
        elif tok.kind == "id":
            mat = GenericMatrix.identity(2)
        elif tok.kind == "swap":
            mat = GenericMatrix(
                tuple(
                    tuple(int(2 * i + j == (2 * l + k)) for k in range(2) for l in range(2))
                    for i in range(2)
                    for j in range(2)
                )
            )
        elif tok.kind == "tw":
            mat = self._columns([universal_phi(tok.unit, v) for v in basis], 2)
        elif tok.kind == "tor":
            if tok.level != INF and not (isinstance(tok.level, int) and tok.level <= self.max_level):
                raise ValidationError(
                    "level-window",
                    f"handle level {tok.level!r} outside the window 1..{self.max_level}, inf",
                )
            k = self.kappa(tok.level)
            mat = self._columns([universal_mul(k, v) for v in basis], 2)
        else:
            raise ValidationError("bad-spec", f"unknown token kind {tok.kind!r}")
        self._matrices[tok] = mat
        return mat

    def default_levels(self):
        return (1, 2, INF)

    def default_unit_samples(self, levels):
        out = []
        finite = [r for r in levels if r != INF]
        prec = (max(finite) if finite else 1) + 2
        for r in levels:
            out.extend(sample_units(self.p, prec, r, count=3) if r != INF else [one(self.p, prec)])
        return out


# -- axioms --------------------------------------------------------------------------

AXIOMS = ("F1", "F2", "F3", "F4", "F5", "FS", "F6", "F7", "F8", "F9", "F10", "F11", "F12")


def _tensor_labels(names, width):
    if width == 0:
        return ("",)
    return tuple("⊗".join(combo) for combo in product(names, repeat=width))


def _first_diff(m1: "GenericMatrix", m2, labels):
    """Label of a failing input column, scanning generic (high-degree) inputs first."""
    if m1.shape != m2.shape:
        return f"shape {m1.shape} vs {m2.shape}"
    rows, cols = m1.shape
    for j in reversed(range(cols)):
        for i in range(rows):
            if not (m1.rows[i][j] == m2.rows[i][j]):
                return labels[j] if j < len(labels) else f"column {j}"
    return None


def check_axioms(A, levels=None, sample_units=None, axioms=None):
    """Verify the extended-Frobenius axioms on the algebra A.

    Returns {axiom_id: (ok, witness)} where a witness names the first input
    basis vector (and unit or level data, where relevant) that breaks the law.
    Structural axioms F1–F5/FS need no units; F6–F12 quantify over the sampled
    units, grouped by level, and over the handle operators at the given levels.
    """
    if levels is None:
        levels = A.default_levels()
    levels = tuple(levels)
    if INF not in levels:
        levels = levels + (INF,)
    if sample_units is None:
        sample_units = A.default_unit_samples(levels)
    by_level = {}
    for u in sample_units:
        by_level.setdefault(level(u), []).append(u)
    wanted = AXIOMS if axioms is None else tuple(axioms)
    unknown = set(wanted) - set(AXIOMS)
    if unknown:
        raise ValidationError("bad-spec", f"unknown axioms {sorted(unknown)}; known: {', '.join(AXIOMS)}")

    m_ = A.token_matrix(Token("m"))
    d_ = A.token_matrix(Token("d"))
    e_ = A.token_matrix(Token("cup"))
    i_ = A.token_matrix(Token("cap"))
    s_ = A.token_matrix(Token("swap"))
    I1 = A.identity_matrix(A.dim)
    phi = lambda u: A.token_matrix(Token("tw", unit=u))
    torus = lambda r: A.token_matrix(TORUS(r))
    lab = lambda w: _tensor_labels(A.basis_names, w)

    def eq(lhs, rhs, width, extra=""):
        w = _first_diff(lhs, rhs, lab(width))
        return None if w is None else (w + extra if w else extra.lstrip(", "))

    def structural(name):
        if name == "F1":
            return eq(m_ @ i_.kron(I1), I1, 1) or eq(m_ @ I1.kron(i_), I1, 1)
        if name == "F2":
            return eq(e_.kron(I1) @ d_, I1, 1) or eq(I1.kron(e_) @ d_, I1, 1)
        if name == "F3":
            return eq(m_ @ m_.kron(I1), m_ @ I1.kron(m_), 3)
        if name == "F4":
            return eq(d_.kron(I1) @ d_, I1.kron(d_) @ d_, 1)
        if name == "F5":
            mid = d_ @ m_
            return eq(I1.kron(m_) @ d_.kron(I1), mid, 2) or eq(m_.kron(I1) @ I1.kron(d_), mid, 2)
        if name == "FS":
            return eq(m_ @ s_, m_, 2) or eq(s_ @ d_, d_, 1)
        return None

    report = {}
    for name in wanted:
        witness = None
        if name in ("F1", "F2", "F3", "F4", "F5", "FS"):
            witness = structural(name)
        elif name == "F6":
            for u in sample_units:
                witness = witness or eq(phi(u) @ i_, i_, 0, f", α={format_unit(u)}")
        elif name == "F7":
            for u in sample_units:
                witness = witness or eq(e_ @ phi(u), e_, 1, f", α={format_unit(u)}")
        elif name == "F8":
            for u in sample_units:
                witness = witness or eq(d_ @ phi(u), phi(u).kron(phi(u)) @ d_, 1, f", α={format_unit(u)}")
        elif name == "F9":
            for u in sample_units:
                witness = witness or eq(phi(u) @ m_, m_ @ phi(u).kron(phi(u)), 2, f", α={format_unit(u)}")
        elif name == "F10":
            for r in levels:
                for u in by_level.get(r, []):
                    witness = witness or eq(
                        m_ @ phi(u).kron(I1) @ d_, torus(r), 1, f", α={format_unit(u)} at level {r}"
                    )
        elif name == "F11":
            for r in levels:
                for s in levels:
                    rmin = min(r, s)
                    witness = witness or eq(
                        torus(r) @ torus(s) @ i_,
                        torus(INF) @ torus(rmin) @ i_,
                        0,
                        f", levels ({r}, {s})",
                    )
        elif name == "F12":
            for r in [x for x in levels if x != INF]:
                for s in [x for x in levels if x == INF or x >= r]:
                    for u in by_level.get(s, []):
                        witness = witness or eq(
                            phi(u) @ torus(r), torus(r), 1, f", α={format_unit(u)} on level {r}"
                        )
        report[name] = (witness is None, witness)
    return report


def ensure_prechecked(A):
    """Run the algebra's configured axiom subset once; abort evaluation on failure."""
    if getattr(A, "_precheck_ok", False) or not A.precheck:
        return
    report = check_axioms(A, axioms=A.precheck)
    for name in A.precheck:
        ok, witness = report[name]
        if not ok:
            raise ValidationError("axiom-failure", f"{name} fails on {A.name}: witness {witness}")
    A._precheck_ok = True


# -- evaluation ----------------------------------------------------------------------


def evaluate_diagram(D: Diagram, A):
    """The linear map of D in the algebra A, as a matrix on tensor powers of A.

    Slices act bottom-up by matrix products of Kronecker factors; the leftmost
    strand is the leftmost factor.  A closed diagram yields a 1×1 matrix.
    """
    ensure_prechecked(A)
    dim = A.dim

    def guard(width):
        if dim**width > A.max_dim:
            raise ComputationError(
                "dimension-guard",
                f"slice of width {width} needs dimension {dim}^{width} > {A.max_dim} on {A.name}",
            )

    guard(D.in_arity)
    total = A.identity_matrix(dim**D.in_arity)
    for sl in D.slices:
        guard(sum(t.arity[1] for t in sl))
        slice_mat = A.identity_matrix(1)
        for tok in sl:
            slice_mat = slice_mat.kron(A.token_matrix(tok))
        total = slice_mat @ total
    return total
