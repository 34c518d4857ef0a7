"""Abstract loop interface and numeric checkers for loop identities.

A loop here is a carrier with a binary operation, a two-sided identity,
and unique left/right division; associativity is not assumed.  The
checkers below measure identities as residual distances rather than
booleans: a property "holds at tolerance tau", and the report says so
explicitly.  Sampling is delegated to the concrete loop -- the kernel has
no way to enumerate elements.

Checkers fold sample residuals with max, so appending samples can only
raise the reported residual, and reports are deterministic given
(seed, count, tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

from .errors import InversesDisagree, SamplerUnavailable
from .groups import SampleStream


@dataclass(frozen=True)
class Loop:
    """A loop presented operationally.

    left_divide(a, b) returns x with a * x = b; right_divide(b, a)
    returns x with x * a = b.  ``sample`` draws one element and returns
    it with the advanced stream.
    """

    mul: Callable[[Any, Any], Any]
    left_divide: Callable[[Any, Any], Any]
    right_divide: Callable[[Any, Any], Any]
    identity: Any
    distance: Callable[[Any, Any], float]
    sample: Optional[Callable[[SampleStream], tuple]] = None


@dataclass(frozen=True)
class IdentityReport:
    property_name: str
    samples: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "property": self.property_name,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _draw(loop: Loop, stream: SampleStream, count: int):
    if loop.sample is None:
        raise SamplerUnavailable("loop provides no sampler")
    out = []
    for _ in range(count):
        x, stream = loop.sample(stream)
        out.append(x)
    return out, stream


def check_loop_axioms(
    loop: Loop, stream: SampleStream, count: int, tolerance: float = 1e-8
) -> IdentityReport:
    """Residuals of e*x = x, x*e = x, a*(a\\b) = b and (b/a)*a = b."""
    e = loop.identity
    worst = 0.0
    for _ in range(count):
        (a, b), stream = _draw(loop, stream, 2)
        worst = max(worst, loop.distance(loop.mul(e, a), a))
        worst = max(worst, loop.distance(loop.mul(a, e), a))
        worst = max(worst, loop.distance(loop.mul(a, loop.left_divide(a, b)), b))
        worst = max(worst, loop.distance(loop.mul(loop.right_divide(b, a), a), b))
    return IdentityReport("loop_axioms", count, worst, tolerance)


def check_bol(loop: Loop, stream: SampleStream, count: int, tolerance: float = 1e-8) -> IdentityReport:
    """Residual of x(y . xz) = (x . yx)z over sampled triples."""
    worst = 0.0
    for _ in range(count):
        (x, y, z), stream = _draw(loop, stream, 3)
        lhs = loop.mul(x, loop.mul(y, loop.mul(x, z)))
        rhs = loop.mul(loop.mul(x, loop.mul(y, x)), z)
        worst = max(worst, loop.distance(lhs, rhs))
    return IdentityReport("bol", count, worst, tolerance)


def inverse_of(loop: Loop, x, tolerance: float = 1e-9):
    """Two-sided inverse e/x, checked to coincide with x\\e."""
    right = loop.right_divide(loop.identity, x)
    left = loop.left_divide(x, loop.identity)
    gap = loop.distance(right, left)
    if gap > tolerance:
        raise InversesDisagree(f"e/x and x\\e differ by {gap:.3e}")
    return right


def check_aip(loop: Loop, stream: SampleStream, count: int, tolerance: float = 1e-8) -> IdentityReport:
    """Residual of the automorphic inverse property (xy)^-1 = x^-1 y^-1."""
    worst = 0.0
    for _ in range(count):
        (x, y), stream = _draw(loop, stream, 2)
        lhs = inverse_of(loop, loop.mul(x, y))
        rhs = loop.mul(inverse_of(loop, x), inverse_of(loop, y))
        worst = max(worst, loop.distance(lhs, rhs))
    return IdentityReport("aip", count, worst, tolerance)


def check_left_a(loop: Loop, stream: SampleStream, count: int, tolerance: float = 1e-8) -> IdentityReport:
    """Residual of lambda_{x,y}(u*v) = lambda_{x,y}(u) * lambda_{x,y}(v),
    where lambda_{x,y}(w) = (x*y) \\ (x*(y*w)).

    The map is evaluated through divisions, so no translation ever has to
    be inverted as a map.
    """

    def lam(x, y, w):
        return loop.left_divide(loop.mul(x, y), loop.mul(x, loop.mul(y, w)))

    worst = 0.0
    for _ in range(count):
        (x, y, u, v), stream = _draw(loop, stream, 4)
        lhs = lam(x, y, loop.mul(u, v))
        rhs = loop.mul(lam(x, y, u), lam(x, y, v))
        worst = max(worst, loop.distance(lhs, rhs))
    return IdentityReport("left_a", count, worst, tolerance)
