"""Closed-form term algebra on the coordinate plane.

A ClosedForm is a finite sum of terms

    c * prod_axis (x_a)^alpha * log(x_a)^k * exp(s * x_a) * cos(b * x_a + phi)

with at most one factor per axis.  The family is closed under partial
differentiation, addition and multiplication (cosine products are rewritten
with the product-to-sum identity), which is what makes exact Hessians cheap.
sin is represented as a phase-shifted cos.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateSampleError, DomainError, ParseError

MERGE_TOL = 1e-12
MAX_LOG_POWER = 2

FULL_PLANE = "full_plane"
RIGHT_HALF = "right_half"
SPHERE_CHART = "sphere_chart"

_SPHERE_HALF_WIDTH = math.pi / 2 - 0.1

# Boxes the quasi-random sample points are drawn from, per domain.
_SAMPLE_BOX = {
    FULL_PLANE: ((-1.5, 1.5), (-1.5, 1.5)),
    RIGHT_HALF: ((0.4, 2.5), (-1.5, 1.5)),
    SPHERE_CHART: ((-_SPHERE_HALF_WIDTH + 0.05, _SPHERE_HALF_WIDTH - 0.05), (-1.5, 1.5)),
}


def in_domain(point, domain: str) -> bool:
    x1 = point[0]
    if domain == RIGHT_HALF:
        return x1 > 0.0
    if domain == SPHERE_CHART:
        return abs(x1) < _SPHERE_HALF_WIDTH
    return True


def _is_integer(v: float) -> bool:
    return abs(v - round(v)) < MERGE_TOL


def _q(v: float) -> float:
    """Quantize a float for use in merge keys (tolerance MERGE_TOL)."""
    return round(v, 12) + 0.0  # normalize -0.0


@dataclass(frozen=True)
class Factor:
    """Single-axis factor (x)^power * log(x)^log_power * exp(exp_coeff*x) * cos(freq*x + phase)."""

    axis: int  # 1 or 2
    power: float = 0.0
    log_power: int = 0
    exp_coeff: float = 0.0
    freq: float = 0.0  # cosine frequency, 0 means no trig part
    phase: float = 0.0

    def is_trivial(self) -> bool:
        return (
            self.power == 0.0
            and self.log_power == 0
            and self.exp_coeff == 0.0
            and self.freq == 0.0
        )

    def key(self):
        return (
            self.axis,
            _q(self.power),
            self.log_power,
            _q(self.exp_coeff),
            _q(self.freq),
            _q(self.phase),
        )

    def evaluate(self, x: float) -> float:
        val = 1.0
        if self.power != 0.0:
            if _is_integer(self.power):
                n = int(round(self.power))
                if x == 0.0 and n < 0:
                    raise DomainError(f"(x{self.axis})^{n} at x{self.axis}=0")
                val *= x ** n
            else:
                if x <= 0.0:
                    raise DomainError(
                        f"(x{self.axis})^{self.power} needs x{self.axis}>0, got {x}"
                    )
                val *= x ** self.power
        if self.log_power:
            if x <= 0.0:
                raise DomainError(f"log(x{self.axis}) needs x{self.axis}>0, got {x}")
            val *= math.log(x) ** self.log_power
        if self.exp_coeff != 0.0:
            val *= math.exp(self.exp_coeff * x)
        if self.freq != 0.0:
            val *= math.cos(self.freq * x + self.phase)
        return val


def _normalize_factor(coeff: float, f: Factor) -> tuple[float, Factor]:
    """Canonicalize trig orientation: freq > 0, phase in [0, pi)."""
    if f.log_power < 0 or f.log_power > MAX_LOG_POWER:
        raise ValueError(f"log power {f.log_power} outside supported range")
    if f.freq == 0.0:
        if f.phase != 0.0:
            # frequency-free cosine is the constant cos(phase)
            coeff *= math.cos(f.phase)
            f = replace(f, phase=0.0)
        return coeff, f
    freq, phase = f.freq, f.phase
    if freq < 0.0:
        freq, phase = -freq, -phase
    phase = math.fmod(phase, 2.0 * math.pi)
    if phase < 0.0:
        phase += 2.0 * math.pi
    if phase >= math.pi - 1e-15:
        phase -= math.pi
        coeff = -coeff
        if phase < 0.0:  # guard the boundary case phase ~ pi
            phase = 0.0
    return coeff, replace(f, freq=freq, phase=phase)


@dataclass(frozen=True)
class Term:
    coeff: float
    factors: tuple[Factor, ...]  # sorted by axis, at most one per axis, non-trivial

    @staticmethod
    def make(coeff: float, factors) -> "Term":
        by_axis: dict[int, Factor] = {}
        for f in factors:
            if f.axis in by_axis:
                raise ValueError("duplicate axis in term factors")
            coeff, f = _normalize_factor(coeff, f)
            if not f.is_trivial():
                by_axis[f.axis] = f
        kept = tuple(by_axis[a] for a in sorted(by_axis))
        return Term(coeff, kept)

    def factor_on(self, axis: int) -> Factor:
        for f in self.factors:
            if f.axis == axis:
                return f
        return Factor(axis=axis)

    def key(self):
        return tuple(f.key() for f in self.factors)

    def evaluate(self, point) -> float:
        val = self.coeff
        for f in self.factors:
            val *= f.evaluate(point[f.axis - 1])
        return val

    def differentiate(self, axis: int) -> list["Term"]:
        """Product-rule derivative w.r.t. x_axis; returns a list of terms."""
        f = self.factor_on(axis)
        others = tuple(g for g in self.factors if g.axis != axis)
        out: list[Term] = []

        def emit(c: float, g: Factor):
            out.append(Term.make(c, others + (g,)))

        if f.power != 0.0:
            emit(self.coeff * f.power, replace(f, power=f.power - 1.0))
        if f.log_power:
            emit(
                self.coeff * f.log_power,
                replace(f, power=f.power - 1.0, log_power=f.log_power - 1),
            )
        if f.exp_coeff != 0.0:
            emit(self.coeff * f.exp_coeff, f)
        if f.freq != 0.0:
            # d cos(bx+phi) = -b cos(bx + phi - pi/2) dx  (i.e. -b sin)
            emit(self.coeff * (-f.freq), replace(f, phase=f.phase - math.pi / 2.0))
        return out

    def multiply(self, other: "Term") -> list["Term"]:
        """Term product; cosine*cosine on a shared axis splits into two terms."""
        coeff = self.coeff * other.coeff
        alternatives: list[list[tuple[float, Factor]]] = []
        axes = {f.axis for f in self.factors} | {f.axis for f in other.factors}
        for axis in sorted(axes):
            a, b = self.factor_on(axis), other.factor_on(axis)
            log_power = a.log_power + b.log_power
            if log_power > MAX_LOG_POWER:
                raise ValueError(f"log power {log_power} exceeds cap {MAX_LOG_POWER}")
            base = Factor(
                axis=axis,
                power=a.power + b.power,
                log_power=log_power,
                exp_coeff=a.exp_coeff + b.exp_coeff,
            )
            if a.freq != 0.0 and b.freq != 0.0:
                # cos A cos B = (cos(A+B) + cos(A-B)) / 2
                alternatives.append(
                    [
                        (0.5, replace(base, freq=a.freq + b.freq, phase=a.phase + b.phase)),
                        (0.5, replace(base, freq=a.freq - b.freq, phase=a.phase - b.phase)),
                    ]
                )
            else:
                freq = a.freq if a.freq != 0.0 else b.freq
                phase = a.phase if a.freq != 0.0 else b.phase
                alternatives.append([(1.0, replace(base, freq=freq, phase=phase))])
        out = [Term.make(coeff, ())]
        for alts in alternatives:
            out = [
                Term.make(t.coeff * c, t.factors + (f,))
                for t in out
                for c, f in alts
            ]
        return out


@dataclass(frozen=True)
class ClosedForm:
    terms: tuple[Term, ...] = ()

    # -- construction -------------------------------------------------------

    @staticmethod
    def from_terms(terms) -> "ClosedForm":
        return ClosedForm(tuple(terms)).simplify()

    def simplify(self) -> "ClosedForm":
        """Merge terms with identical factor profiles; drop zero coefficients."""
        merged: dict[tuple, Term] = {}
        for t in self.terms:
            k = t.key()
            if k in merged:
                prev = merged[k]
                merged[k] = Term(prev.coeff + t.coeff, prev.factors)
            else:
                merged[k] = t
        kept = [t for t in merged.values() if abs(t.coeff) > MERGE_TOL]
        kept.sort(key=lambda t: t.key())
        return ClosedForm(tuple(kept))

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "ClosedForm") -> "ClosedForm":
        return ClosedForm(self.terms + other.terms).simplify()

    def __sub__(self, other: "ClosedForm") -> "ClosedForm":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return ClosedForm(
                tuple(Term(t.coeff * other, t.factors) for t in self.terms)
            ).simplify()
        prods: list[Term] = []
        for a in self.terms:
            for b in other.terms:
                prods.extend(a.multiply(b))
        return ClosedForm(tuple(prods)).simplify()

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus -----------------------------------------------------------

    def evaluate(self, point, domain: str | None = None) -> float:
        if domain is not None and not in_domain(point, domain):
            raise DomainError(f"point {tuple(point)} outside domain {domain}")
        return sum((t.evaluate(point) for t in self.terms), 0.0)

    def differentiate(self, axis: int) -> "ClosedForm":
        out: list[Term] = []
        for t in self.terms:
            out.extend(t.differentiate(axis))
        return ClosedForm(tuple(out)).simplify()

    # -- text form ----------------------------------------------------------

    def __str__(self) -> str:
        return format_closed_form(self)

    def __repr__(self) -> str:
        return f"ClosedForm({format_closed_form(self)!r})"


ZERO = ClosedForm()


def const(c: float) -> ClosedForm:
    return ClosedForm((Term.make(c, ()),)).simplify()


ONE = const(1.0)


def power(axis: int, alpha: float, coeff: float = 1.0) -> ClosedForm:
    return ClosedForm((Term.make(coeff, (Factor(axis=axis, power=alpha),)),)).simplify()


def coord(axis: int) -> ClosedForm:
    return power(axis, 1.0)


def logf(axis: int, k: int = 1) -> ClosedForm:
    return ClosedForm((Term.make(1.0, (Factor(axis=axis, log_power=k),)),)).simplify()


def expf(axis: int, a: float) -> ClosedForm:
    return ClosedForm((Term.make(1.0, (Factor(axis=axis, exp_coeff=a),)),)).simplify()


def cosf(axis: int, b: float, phase: float = 0.0) -> ClosedForm:
    return ClosedForm((Term.make(1.0, (Factor(axis=axis, freq=b, phase=phase),)),)).simplify()


def sinf(axis: int, b: float) -> ClosedForm:
    return cosf(axis, b, phase=-math.pi / 2.0)


# ---------------------------------------------------------------------------
# Real forms of complex exponentials


def _angle_form(v1: float, v2: float, delta: float, part: str) -> ClosedForm:
    """cos (part='re') or sin (part='im') of v1*x1 + v2*x2 + delta."""
    shift = 0.0 if part == "re" else -math.pi / 2.0
    if v1 == 0.0 and v2 == 0.0:
        return const(math.cos(delta + shift))
    if v2 == 0.0:
        return cosf(1, v1, delta + shift)
    if v1 == 0.0:
        return cosf(2, v2, delta + shift)
    # addition formula: cos(t1+t2) = cos t1 cos t2 - sin t1 sin t2
    if part == "re":
        return cosf(1, v1, delta) * cosf(2, v2) - sinf_phase(1, v1, delta) * sinf_phase(2, v2, 0.0)
    return sinf_phase(1, v1, delta) * cosf(2, v2) + cosf(1, v1, delta) * sinf_phase(2, v2, 0.0)


def sinf_phase(axis: int, b: float, delta: float) -> ClosedForm:
    return cosf(axis, b, delta - math.pi / 2.0)


def realize_complex_exp(
    coeff: complex, powers: tuple[int, int], a1: complex, a2: complex, part: str
) -> ClosedForm:
    """Real or imaginary part of coeff * x1^m x2^n * exp(a1 x1 + a2 x2)."""
    m, n = powers
    mag, delta = abs(coeff), math.atan2(coeff.imag, coeff.real)
    base = const(mag)
    if m:
        base = base * power(1, float(m))
    if n:
        base = base * power(2, float(n))
    if a1.real != 0.0:
        base = base * expf(1, a1.real)
    if a2.real != 0.0:
        base = base * expf(2, a2.real)
    return base * _angle_form(a1.imag, a2.imag, delta, part)


# ---------------------------------------------------------------------------
# Canonical text serialization


def _fmt(v: float) -> str:
    return repr(float(v))


def _format_factor(f: Factor) -> list[str]:
    x = f"x{f.axis}"
    parts = []
    if f.power != 0.0:
        parts.append(f"({x})^{_fmt(f.power)}")
    if f.log_power:
        parts.append(f"log({x})^{f.log_power}")
    if f.exp_coeff != 0.0:
        parts.append(f"exp({_fmt(f.exp_coeff)}*{x})")
    if f.freq != 0.0:
        if f.phase != 0.0:
            parts.append(f"cos({_fmt(f.freq)}*{x} + {_fmt(f.phase)})")
        else:
            parts.append(f"cos({_fmt(f.freq)}*{x})")
    return parts


def format_closed_form(cf: ClosedForm) -> str:
    if not cf.terms:
        return "0"
    rendered = []
    for t in cf.terms:
        atoms = [_fmt(t.coeff)]
        for f in t.factors:
            atoms.extend(_format_factor(f))
        rendered.append(" * ".join(atoms))
    return " + ".join(rendered)


_POW_RE = re.compile(r"^\(x([12])\)\^(.+)$")
_LOG_RE = re.compile(r"^log\(x([12])\)\^(\d+)$")
_EXP_RE = re.compile(r"^exp\((.+)\*x([12])\)$")
_COS_RE = re.compile(r"^cos\((.+)\*x([12])(?: \+ (.+))?\)$")


def _split_top_level(text: str, sep: str) -> list[str]:
    """Split on sep, but only outside parentheses."""
    chunks, depth, start, i = [], 0, 0, 0
    while i < len(text):
        c = text[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            chunks.append(text[start:i])
            i += len(sep)
            start = i
            continue
        i += 1
    chunks.append(text[start:])
    return chunks


def parse_closed_form(text: str) -> ClosedForm:
    """Inverse of format_closed_form; round-trips bit-identically."""
    text = text.strip()
    if text == "0":
        return ZERO
    terms = []
    for chunk in _split_top_level(text, " + "):
        atoms = chunk.split(" * ")
        try:
            coeff = float(atoms[0])
            atoms = atoms[1:]
        except ValueError:
            coeff = 1.0  # leading coefficient may be omitted
        by_axis: dict[int, dict] = {}

        def slot(axis: int) -> dict:
            return by_axis.setdefault(axis, {"axis": axis})

        for atom in atoms:
            if m := _POW_RE.match(atom):
                slot(int(m.group(1)))["power"] = float(m.group(2))
            elif m := _LOG_RE.match(atom):
                slot(int(m.group(1)))["log_power"] = int(m.group(2))
            elif m := _EXP_RE.match(atom):
                slot(int(m.group(2)))["exp_coeff"] = float(m.group(1))
            elif m := _COS_RE.match(atom):
                s = slot(int(m.group(2)))
                s["freq"] = float(m.group(1))
                s["phase"] = float(m.group(3)) if m.group(3) else 0.0
            else:
                raise ParseError(f"unrecognized factor {atom!r}")
        factors = tuple(Factor(**kw) for _, kw in sorted(by_axis.items()))
        terms.append(Term(coeff, factors))
    return ClosedForm(tuple(terms))


# ---------------------------------------------------------------------------
# Numeric rank of a family of functions


def sample_points(domain: str, n: int = 12, seed: int = 7) -> np.ndarray:
    """Quasi-random sample points inside the domain box."""
    (lo1, hi1), (lo2, hi2) = _SAMPLE_BOX[domain]
    h = qmc.Halton(d=2, scramble=True, seed=seed)
    u = h.random(n)
    pts = np.empty((n, 2))
    pts[:, 0] = lo1 + u[:, 0] * (hi1 - lo1)
    pts[:, 1] = lo2 + u[:, 1] * (hi2 - lo2)
    return pts


def evaluation_matrix(funcs, points) -> np.ndarray:
    m = np.empty((len(points), len(funcs)))
    for j, f in enumerate(funcs):
        for i, p in enumerate(points):
            m[i, j] = f.evaluate(p)
    return m


def _matrix_rank(m: np.ndarray, cutoff: float = 1e-9) -> int:
    if m.size == 0:
        return 0
    scale = np.abs(m).max(axis=0)
    scale[scale == 0.0] = 1.0
    sv = np.linalg.svd(m / scale, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > cutoff * sv[0]))


def numeric_rank(funcs, points) -> int:
    """Rank of span{funcs} estimated from evaluations at sample points.

    Raises DegenerateSampleError when the estimate is sensitive to dropping
    points, which signals the caller to resample.
    """
    funcs = list(funcs)
    if not funcs:
        return 0
    points = np.asarray(points, dtype=float)
    if len(points) < len(funcs) + 2:
        raise DegenerateSampleError(
            f"need at least {len(funcs) + 2} points for {len(funcs)} functions"
        )
    m = evaluation_matrix(funcs, points)
    col_max = np.abs(m).max(axis=0)
    for j, f in enumerate(funcs):
        if col_max[j] < 1e-13 and not (hasattr(f, "is_zero") and f.is_zero()):
            raise DegenerateSampleError(
                "nonzero function vanishes on the whole sample set"
            )
    r_full = _matrix_rank(m)
    r_sub = _matrix_rank(m[:-2])
    if r_full != r_sub:
        raise DegenerateSampleError("rank estimate unstable under point removal")
    return r_full


def robust_rank(funcs, domain: str, n: int = 12, retries: int = 3) -> int:
    """numeric_rank with automatic resampling on degenerate draws."""
    funcs = list(funcs)
    n = max(n, len(funcs) + 4)
    last = None
    for attempt in range(retries):
        try:
            return numeric_rank(funcs, sample_points(domain, n=n, seed=7 + attempt))
        except DegenerateSampleError as e:
            last = e
            n += 4
    raise last
