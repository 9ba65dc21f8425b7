"""A small expression language for pipelines of families, shears and convolutions.

Grammar::

    expr     := call | angle
    call     := NAME [ "(" [ arg ("," arg)* ] ")" ]
    arg      := NAME "=" value | value
    angle    := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("+" | "-") unary | NUMBER | "pi" | "(" angle ")"

``omega=`` takes a dilatation catalog name verbatim (``z``, ``z2``,
``mobius:a=0.3;mu=0.5``), read up to the next top-level ``,`` or ``)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..errors import ExpressionError, HconvError
from ..families import (
    DcpStatus,
    convolver_by_name,
    f_alpha_prefunction,
    f_theta_prefunction,
    koebe_shear_prefunction,
    parse_omega,
    phi_beta,
    phi_beta_status,
    slanted_halfplane_prefunction,
)
from ..harmonic import (
    Direction,
    HarmonicMap,
    analytic_prefunction,
    harmonic_convolve,
    shear_construct,
)
from ..series import TruncatedSeries, default_order, hadamard

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass
class Evaluated:
    """Result of evaluating an expression plus what was learned along the way."""

    value: object
    gamma: float | None = None
    omega: str | None = None
    convolvers: list[tuple[str, DcpStatus]] = field(default_factory=list)

    @property
    def weakest_status(self) -> DcpStatus | None:
        if not self.convolvers:
            return None
        rank = [DcpStatus.NOT_DCP, DcpStatus.CANDIDATE, DcpStatus.PROVEN_DCP]
        return min((s for _, s in self.convolvers), key=rank.index)


class _Parser:
    def __init__(self, text: str, order: int):
        self.text = text
        self.pos = 0
        self.order = order
        self.result = Evaluated(None)

    # lexical helpers
    def error(self, message: str, pos: int | None = None):
        raise ExpressionError(message, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            self.error(f"expected {ch!r}, found {found}")
        self.pos += 1

    def name(self) -> str | None:
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group()

    # grammar
    def parse(self) -> Evaluated:
        value = self.value()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        self.result.value = value
        return self.result

    def value(self):
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if m and m.group() != "pi":
            return self.call()
        return self.angle()

    def angle(self) -> float:
        total = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            total = total + rhs if op == "+" else total - rhs
        return total

    def term(self) -> float:
        total = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            at = self.pos
            self.pos += 1
            rhs = self.unary()
            if op == "/" and rhs == 0:
                self.error("division by zero", at)
            total = total * rhs if op == "*" else total / rhs
        return total

    def unary(self) -> float:
        ch = self.peek()
        if ch in ("+", "-"):
            self.pos += 1
            v = self.unary()
            return v if ch == "+" else -v
        if ch == "(":
            self.pos += 1
            v = self.angle()
            self.expect(")")
            return v
        start = self.pos
        word = self.name()
        if word == "pi":
            return math.pi
        if word is not None:
            self.error(f"expected a number, found name {word!r}", start)
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.error("expected a number" if ch else "unexpected end of input")
        self.pos = m.end()
        return float(m.group())

    def raw_until_delimiter(self) -> str:
        self.skip()
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            elif ch == "," and depth == 0:
                break
            self.pos += 1
        raw = self.text[start:self.pos].strip()
        if not raw:
            self.error("empty omega value", start)
        return raw

    def call(self):
        start = self.pos
        fname = self.name()
        args: list = []
        kwargs: dict = {}
        if self.peek() == "(":
            self.pos += 1
            if self.peek() != ")":
                while True:
                    self.arg(args, kwargs)
                    if self.peek() == ",":
                        self.pos += 1
                        continue
                    break
            self.expect(")")
        return self.apply(fname, args, kwargs, start)

    def arg(self, args: list, kwargs: dict):
        self.skip()
        save = self.pos
        key = self.name()
        if key is not None and self.peek() == "=":
            self.pos += 1
            if key in kwargs:
                self.error(f"duplicate argument {key!r}", save)
            kwargs[key] = (self.raw_until_delimiter() if key == "omega" else self.value(), save)
            return
        self.pos = save
        if kwargs:
            self.error("positional argument after keyword argument")
        args.append((self.value(), save))

    def apply(self, fname: str, args: list, kwargs: dict, at: int):
        handler = _FUNCTIONS.get(fname)
        if handler is None:
            self.error(f"unknown function {fname!r}", at)
        try:
            return handler(self, args, kwargs, at)
        except HconvError:
            # range and construction problems are reported by the caller, not as syntax
            raise
        except (ValueError, KeyError, TypeError) as exc:
            self.error(f"{fname}: {exc}", at)

    # argument helpers
    def number(self, item, what: str) -> float:
        value, at = item
        if not isinstance(value, float):
            self.error(f"{what} must be a number", at)
        return value

    def series(self, item, what: str) -> TruncatedSeries:
        value, at = item
        if not isinstance(value, TruncatedSeries):
            self.error(f"{what} must be an analytic function", at)
        return value

    def arity(self, fname, args, kwargs, at, positional: int, allowed=()):
        if len(args) != positional:
            self.error(f"{fname} takes {positional} positional argument(s), got {len(args)}", at)
        extra = set(kwargs) - set(allowed)
        if extra:
            self.error(f"{fname} got unexpected keyword {sorted(extra)[0]!r}", kwargs[sorted(extra)[0]][1])


def _family(fname: str, builder, with_param: bool, *, convolver: bool = False):
    def handler(p: _Parser, args, kwargs, at):
        p.arity(fname, args, kwargs, at, 1 if with_param else 0)
        if with_param:
            x = p.number(args[0], f"{fname} parameter")
            value = builder(x, p.order)
        else:
            value = builder(p.order)
        if convolver:
            status = phi_beta_status(x) if fname == "phi_beta" else convolver_by_name(fname, order=1).status
            p.result.convolvers.append((fname, status))
        return value

    return handler


def _convolver_only(name: str):
    def build(order):
        return convolver_by_name(name, order=order).series

    return _family(name, build, False, convolver=True)


def _shear(p: _Parser, args, kwargs, at):
    p.arity("shear", args, kwargs, at, 1, allowed=("omega", "gamma"))
    F = p.series(args[0], "shear prefunction")
    if "omega" not in kwargs or "gamma" not in kwargs:
        p.error("shear needs omega=<name> and gamma=<angle>", at)
    omega_name, omega_at = kwargs["omega"]
    try:
        omega = parse_omega(omega_name, p.order)
    except HconvError:
        raise
    except ValueError as exc:
        p.error(str(exc), omega_at)
    gamma = p.number(kwargs["gamma"], "gamma")
    p.result.gamma = Direction(gamma).gamma
    p.result.omega = omega_name
    return shear_construct(F, omega, gamma)


def _convolve(p: _Parser, args, kwargs, at):
    p.arity("convolve", args, kwargs, at, 2)
    (f, f_at), (phi, phi_at) = args
    phi = p.series((phi, phi_at), "convolver")
    if isinstance(f, HarmonicMap):
        return harmonic_convolve(f, phi)
    return hadamard(p.series((f, f_at), "first convolve argument"), phi)


def _prefunction(p: _Parser, args, kwargs, at):
    p.arity("prefunction", args, kwargs, at, 1, allowed=("gamma",))
    f, f_at = args[0]
    if not isinstance(f, HarmonicMap):
        p.error("prefunction needs a harmonic map", f_at)
    if "gamma" in kwargs:
        gamma = p.number(kwargs["gamma"], "gamma")
    elif p.result.gamma is not None:
        gamma = p.result.gamma
    else:
        p.error("prefunction needs gamma=<angle>", at)
    return analytic_prefunction(f, gamma)


_FUNCTIONS = {
    "f_alpha": _family("f_alpha", f_alpha_prefunction, True),
    "f_theta": _family("f_theta", f_theta_prefunction, True),
    "koebe_shear": _family("koebe_shear", koebe_shear_prefunction, False),
    "slanted": _family("slanted", slanted_halfplane_prefunction, True),
    "phi_beta": _family("phi_beta", phi_beta, True, convolver=True),
    "identity": _convolver_only("identity"),
    "linear": _convolver_only("linear"),
    "strip": _convolver_only("strip"),
    "shear": _shear,
    "convolve": _convolve,
    "prefunction": _prefunction,
}

FUNCTION_NAMES = tuple(_FUNCTIONS)


def evaluate_expression(text: str, order: int | None = None) -> Evaluated:
    """Parse and build ``text``; raises :class:`ExpressionError` with a character offset."""
    return _Parser(text, default_order() if order is None else order).parse()


def parse_angle(text: str) -> float:
    """Evaluate an angle expression such as ``pi/2-0.7854``."""
    value = evaluate_expression(text, order=1).value
    if not isinstance(value, float):
        raise ExpressionError("expected an angle", 0)
    return value
