"""Exact truncated multivariate power/Laurent series over rational coefficients.

This is the coefficient ring for the whole package.  A series lives in a
SeriesContext that fixes the variable names and, per variable, how deep a
pole may get (``depth``) and whether the variable is nilpotent (``nil``,
meaning x**nil == 0 exactly).  Coefficients are ``fractions.Fraction``;
arithmetic below the tracked precision is exact, and asking for a
coefficient beyond the tracked precision raises ``TruncationError`` instead
of silently returning a wrong value.

Precision bookkeeping: ``prec`` is the signed total degree (nilpotent
variables weigh zero) up to which the stored coefficients are guaranteed
complete.  Products, inverses and exponentials propagate ``prec`` the way
interval arithmetic propagates widths, so a lost coefficient is always
detected at extraction time.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Coeff = Union[Fraction, int]


class SeriesError(Exception):
    """Base class for series arithmetic errors."""


class TruncationError(SeriesError):
    """A coefficient beyond the guaranteed precision was requested."""


class NonUnitError(SeriesError):
    """Inverse of a series whose leading part is not a single monomial unit."""


class PoleDepthError(SeriesError):
    """A computation produced a pole deeper than the variable allows."""


class VariableError(SeriesError):
    """Unknown variable or incompatible contexts."""


class SeriesContext:
    """An ordered variable set with truncation order and per-variable limits.

    Parameters
    ----------
    variables:
        Iterable of names, or of ``(name, spec)`` pairs where ``spec`` is a
        dict with optional keys ``depth`` (maximal pole order, default 0)
        and ``nil`` (nilpotency order k with x**k == 0, default None).
    order:
        Total signed degree up to which freshly built series are exact.
    """

    def __init__(self, variables, order: int):
        names = []
        depth = []
        nil = []
        for v in variables:
            if isinstance(v, str):
                name, spec = v, {}
            else:
                name, spec = v
            names.append(name)
            depth.append(int(spec.get("depth", 0)))
            nil.append(spec.get("nil"))
        if len(set(names)) != len(names):
            raise VariableError("duplicate variable names: %r" % (names,))
        self.names = tuple(names)
        self.depth = tuple(depth)
        self.nil = tuple(None if k is None else int(k) for k in nil)
        self.order = int(order)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.nvars = len(self.names)
        self._zero_key = (0,) * self.nvars

    # -- constructors -------------------------------------------------

    def zero(self) -> "Series":
        return Series(self, {}, self.order)

    def one(self) -> "Series":
        return self.const(1)

    def const(self, c) -> "Series":
        c = Fraction(c)
        terms = {self._zero_key: c} if c else {}
        return Series(self, terms, self.order)

    def var(self, name: str, power: int = 1) -> "Series":
        return self.monomial({name: power})

    def monomial(self, powers: Mapping[str, int], coeff=1) -> "Series":
        key = [0] * self.nvars
        for name, p in powers.items():
            if name not in self.index:
                raise VariableError("unknown variable %r" % name)
            key[self.index[name]] = int(p)
        c = Fraction(coeff)
        key = tuple(key)
        self._check_key(key)
        terms = {key: c} if c else {}
        return Series(self, terms, self.order)

    # -- degree helpers ------------------------------------------------

    def degree_of(self, key) -> int:
        """Signed total degree; nilpotent variables do not count."""
        return sum(e for e, k in zip(key, self.nil) if k is None)

    def _check_key(self, key):
        for e, d in zip(key, self.depth):
            if e < -d:
                raise PoleDepthError(
                    "exponent %r below allowed pole depth in context %r"
                    % (key, self.names)
                )

    def admissible(self, key) -> bool:
        """True if the exponent vector is storable (depth and nilpotency)."""
        for e, d, k in zip(key, self.depth, self.nil):
            if e < -d:
                return False
            if k is not None and e >= k:
                # x**e == 0 exactly: droppable, not an error
                return True
        return True

    def killed(self, key) -> bool:
        """True if the monomial is exactly zero by nilpotency."""
        return any(
            k is not None and e >= k for e, k in zip(key, self.nil)
        )


class Series:
    """Immutable truncated series.  Do not mutate ``terms`` after creation."""

    __slots__ = ("ctx", "terms", "prec")

    def __init__(self, ctx: SeriesContext, terms: dict, prec: int):
        self.ctx = ctx
        self.terms = terms
        self.prec = prec

    # -- basics ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, Series):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ctx), frozenset(self.terms.items())))

    def min_degree(self) -> int:
        """Lower bound for the order of the true series (prec+1 if 0 so far)."""
        if not self.terms:
            return self.prec + 1
        return min(self.ctx.degree_of(k) for k in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ctx._zero_key, Fraction(0))

    # -- ring operations --------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        if isinstance(other, Series):
            if other.ctx is not self.ctx:
                raise VariableError("series from different contexts")
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prec = min(self.prec, o.prec)
        terms = dict(self.terms)
        for k, c in o.terms.items():
            s = terms.get(k, Fraction(0)) + c
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        terms = {k: c for k, c in terms.items() if self.ctx.degree_of(k) <= prec}
        return Series(self.ctx, terms, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.ctx, {k: -c for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        prec = min(self.prec + o.min_degree(), o.prec + self.min_degree(),
                   ctx.order)
        out: dict = {}
        nil = ctx.nil
        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                if ctx.degree_of(key) > prec:
                    continue
                if any(kn is not None and e >= kn for e, kn in zip(key, nil)):
                    continue
                ctx._check_key(key)
                s = out.get(key, Fraction(0)) + c1 * c2
                if s:
                    out[key] = s
                else:
                    del out[key]
        return Series(ctx, out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base2 = base * base if n > 1 else base
            base, n = base2, n >> 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                raise ZeroDivisionError("series divided by zero rational")
            return Series(
                self.ctx, {k: c / q for k, c in self.terms.items()}, self.prec
            )
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    # -- inverse, exp -----------------------------------------------------

    def _leading_monomial(self):
        """The unique minimal-degree monomial, or raise NonUnitError."""
        if not self.terms:
            raise NonUnitError("inverse of (truncation-level) zero series")
        mdeg = self.min_degree()
        leads = [k for k in self.terms if self.ctx.degree_of(k) == mdeg]
        if len(leads) != 1:
            raise NonUnitError(
                "leading part is not a single monomial; factor it out first"
            )
        key = leads[0]
        if self.ctx.killed(tuple(-e for e in key)) or any(
            n is not None and e != 0 for e, n in zip(key, self.ctx.nil)
        ):
            raise NonUnitError("leading monomial involves a nilpotent variable")
        return key, self.terms[key]

    def inv(self) -> "Series":
        """Exact inverse modulo precision.

        The leading (minimal total degree) part must be a single monomial
        c*m; the inverse is computed as the geometric series
        (c*m)^-1 * sum (1 - f/(c*m))^j.  Pole depths are checked.
        """
        ctx = self.ctx
        key, c = self._leading_monomial()
        inv_key = tuple(-e for e in key)
        ctx._check_key(inv_key)
        lead_inv = Series(ctx, {inv_key: 1 / c}, ctx.order)
        # u = 1 - f * lead_inv has ord >= 1 (or is nilpotent-only)
        u = ctx.one() - self * lead_inv
        deg_m = ctx.degree_of(key)
        prec = min(self.prec - 2 * deg_m, ctx.order)
        need = prec + deg_m  # accumulate the unit part this far
        acc = ctx.one()
        term = ctx.one()
        guard = 0
        while True:
            term = term * u
            if term.is_zero():
                break
            if term.min_degree() > need:
                break
            acc = acc + term
            guard += 1
            if guard > 4 * (abs(need) + ctx.nvars + 8) + sum(
                k or 0 for k in ctx.nil
            ):
                raise SeriesError("inv() failed to terminate; bad context?")
        out = acc * lead_inv
        terms = {
            k: c for k, c in out.terms.items() if ctx.degree_of(k) <= prec
        }
        return Series(ctx, terms, prec)

    def exp(self) -> "Series":
        """exp of a series with zero constant term (nilpotent parts allowed).

        Terms of strictly positive degree and degree-zero nilpotent terms
        are both fine; anything with a pole or a plain constant is not.
        """
        ctx = self.ctx
        if self.constant_term():
            raise SeriesError("exp() needs zero constant term")
        if self.terms and self.min_degree() < 0:
            raise SeriesError("exp() of a series with poles is not supported")
        acc = ctx.one()
        term = ctx.one()
        k = 0
        while True:
            k += 1
            term = term * self / k
            if term.is_zero():
                break
            if term.min_degree() > self.prec:
                break
            acc = acc + term
            if k > 4 * (ctx.order + ctx.nvars + 8) + sum(
                n or 0 for n in ctx.nil
            ):
                raise SeriesError("exp() failed to terminate; bad context?")
        return Series(acc.ctx, acc.terms, min(self.prec, ctx.order))

    # -- extraction --------------------------------------------------------

    def residue(self, name: str) -> "Series":
        """Coefficient of name**-1: a series in the remaining variables."""
        ctx = self.ctx
        if name not in ctx.index:
            raise VariableError("unknown variable %r" % name)
        i = ctx.index[name]
        out = {}
        for k, c in self.terms.items():
            if k[i] == -1:
                key = k[:i] + (0,) + k[i + 1:]
                out[key] = c
        return Series(ctx, out, self.prec + 1)

    def coeff(self, powers: Mapping[str, int]) -> Fraction:
        """Exact coefficient of a monomial; TruncationError beyond precision."""
        ctx = self.ctx
        key = [0] * ctx.nvars
        for name, p in powers.items():
            if name not in ctx.index:
                raise VariableError("unknown variable %r" % name)
            key[ctx.index[name]] = int(p)
        key = tuple(key)
        if ctx.degree_of(key) > self.prec:
            raise TruncationError(
                "coefficient %r of degree %d beyond precision %d"
                % (powers, ctx.degree_of(key), self.prec)
            )
        return self.terms.get(key, Fraction(0))

    def coeff_series(self, name: str, power: int) -> "Series":
        """Coefficient of name**power as a series in the other variables."""
        ctx = self.ctx
        if name not in ctx.index:
            raise VariableError("unknown variable %r" % name)
        i = ctx.index[name]
        out = {}
        for k, c in self.terms.items():
            if k[i] == power:
                out[k[:i] + (0,) + k[i + 1:]] = c
        return Series(ctx, out, self.prec - power)

    def subs_zero(self, names: Iterable[str]) -> "Series":
        """Set the given variables to zero."""
        ctx = self.ctx
        idx = [ctx.index[n] for n in names]
        out = {}
        for k, c in self.terms.items():
            if all(k[i] == 0 for i in idx):
                out[k] = out.get(k, Fraction(0)) + c
        return Series(ctx, out, self.prec)

    # -- presentation -------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "<Series 0 (prec %d)>" % self.prec
        bits = []
        for k in sorted(self.terms, key=lambda k: (self.ctx.degree_of(k), k)):
            c = self.terms[k]
            mono = "*".join(
                "%s^%d" % (n, e)
                for n, e in zip(self.ctx.names, k)
                if e
            )
            bits.append("%s%s" % (c, ("*" + mono) if mono else ""))
        return "<Series %s (prec %d)>" % (" + ".join(bits[:12]), self.prec)


def geometric_inverse_example():
    """Tiny smoke helper used by the CLI self-check."""
    ctx = SeriesContext(["t"], order=3)
    t = ctx.var("t")
    return (ctx.one() - t).inv()
