"""
Immutable expression DAG over real chart coordinates.

Nodes are built through the module-level constructors (``add``, ``mul``, ``div`` ...)
which fold constants and flatten nested sums/products; nothing else is simplified.
Equality and hashing are by identity so shared subtrees can be memoised cheaply.
"""
import cmath
import numbers

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp")

_CMATH = {
    "sin": cmath.sin,
    "cos": cmath.cos,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
    "exp": cmath.exp,
}

# Printing precedence
_SUM, _PRODUCT, _UNARY, _POWER, _ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base node. Subclasses are immutable after construction."""

    __slots__ = ("_derivatives",)
    precedence = _ATOM

    def __init__(self):
        # Per-coordinate derivative cache, filled by differentiate().
        self._derivatives = {}

    @property
    def children(self):
        return ()

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __str__(self):
        return to_source(self)

    def __repr__(self):
        return f"{type(self).__name__}({to_source(self)!r})"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        super().__init__()
        value = complex(value)
        if value.imag == 0:
            value = complex(value.real, 0.0)
        self.value = value


class ImaginaryUnit(Expr):
    __slots__ = ()


class Var(Expr):
    """Real chart coordinate, addressed by index."""

    __slots__ = ("index", "name")

    def __init__(self, index, name):
        super().__init__()
        self.index = index
        self.name = name


class Param(Expr):
    """Named real parameter (μ, ω, β ...) bound at evaluation time."""

    __slots__ = ("name",)

    def __init__(self, name):
        super().__init__()
        self.name = name


class Sum(Expr):
    __slots__ = ("terms",)
    precedence = _SUM

    def __init__(self, terms):
        super().__init__()
        self.terms = tuple(terms)

    @property
    def children(self):
        return self.terms


class Product(Expr):
    __slots__ = ("factors",)
    precedence = _PRODUCT

    def __init__(self, factors):
        super().__init__()
        self.factors = tuple(factors)

    @property
    def children(self):
        return self.factors


class Quotient(Expr):
    __slots__ = ("numerator", "denominator")
    precedence = _PRODUCT

    def __init__(self, numerator, denominator):
        super().__init__()
        self.numerator = numerator
        self.denominator = denominator

    @property
    def children(self):
        return (self.numerator, self.denominator)


class Power(Expr):
    __slots__ = ("base", "exponent")
    precedence = _POWER

    def __init__(self, base, exponent):
        super().__init__()
        self.base = base
        self.exponent = int(exponent)

    @property
    def children(self):
        return (self.base,)


class Neg(Expr):
    __slots__ = ("arg",)
    precedence = _UNARY

    def __init__(self, arg):
        super().__init__()
        self.arg = arg

    @property
    def children(self):
        return (self.arg,)


class Func(Expr):
    """One of sin, cos, sinh, cosh, exp applied to an argument."""

    __slots__ = ("name", "arg")

    def __init__(self, name, arg):
        super().__init__()
        if name not in FUNCTIONS:
            raise ValueError(f"Unsupported function: {name}")
        self.name = name
        self.arg = arg

    @property
    def children(self):
        return (self.arg,)


class Conj(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        super().__init__()
        self.arg = arg

    @property
    def children(self):
        return (self.arg,)


I = ImaginaryUnit()
ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, numbers.Number):
        return const(value)
    raise TypeError(f"Cannot use {type(value).__name__} as an expression")


def const(value):
    value = complex(value)
    if value == 0:
        return ZERO
    if value == 1:
        return ONE
    return Const(value)


def param(name):
    return Param(name)


def is_zero(e):
    return isinstance(e, Const) and e.value == 0


def is_one(e):
    return isinstance(e, Const) and e.value == 1


def add(*terms):
    flat = []
    constant = 0j
    for term in terms:
        term = as_expr(term)
        parts = term.terms if isinstance(term, Sum) else (term,)
        for part in parts:
            if isinstance(part, Const):
                constant += part.value
            else:
                flat.append(part)
    if constant != 0:
        flat.append(const(constant))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Sum(flat)


def sub(a, b):
    return add(a, neg(b))


def mul(*factors):
    flat = []
    constant = 1 + 0j
    for factor in factors:
        factor = as_expr(factor)
        parts = factor.factors if isinstance(factor, Product) else (factor,)
        for part in parts:
            if isinstance(part, Const):
                constant *= part.value
            else:
                flat.append(part)
    if constant == 0:
        return ZERO
    if not flat:
        return const(constant)
    if constant == -1:
        return neg(flat[0] if len(flat) == 1 else Product(flat))
    if constant != 1:
        flat.insert(0, const(constant))
    if len(flat) == 1:
        return flat[0]
    return Product(flat)


def div(numerator, denominator):
    numerator = as_expr(numerator)
    denominator = as_expr(denominator)
    if is_zero(numerator):
        return ZERO
    if is_one(denominator):
        return numerator
    if isinstance(denominator, Const) and denominator.value != 0:
        return mul(const(1 / denominator.value), numerator)
    return Quotient(numerator, denominator)


def power(base, exponent):
    base = as_expr(base)
    if int(exponent) != exponent:
        raise ValueError("Only integer exponents are supported")
    exponent = int(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const) and (base.value != 0 or exponent > 0):
        return const(base.value ** exponent)
    return Power(base, exponent)


def neg(arg):
    arg = as_expr(arg)
    if isinstance(arg, Const):
        return const(-arg.value)
    if isinstance(arg, Neg):
        return arg.arg
    return Neg(arg)


def func(name, arg):
    arg = as_expr(arg)
    if isinstance(arg, Const):
        return const(_CMATH[name](arg.value))
    return Func(name, arg)


def sin(arg):
    return func("sin", arg)


def cos(arg):
    return func("cos", arg)


def sinh(arg):
    return func("sinh", arg)


def cosh(arg):
    return func("cosh", arg)


def exp(arg):
    return func("exp", arg)


def conj(arg):
    arg = as_expr(arg)
    if isinstance(arg, Const):
        return const(arg.value.conjugate())
    if isinstance(arg, Conj):
        return arg.arg
    if isinstance(arg, (Var, Param)):
        # coordinates and parameters are real
        return arg
    if isinstance(arg, ImaginaryUnit):
        return neg(I)
    return Conj(arg)


def real_part(e):
    return mul(0.5, add(e, conj(e)))


def imag_part(e):
    return mul(-0.5j, sub(e, conj(e)))


def abs_squared(e):
    return mul(e, conj(e))


def substitute(e, bindings):
    """Replace parameters by expressions (numbers are accepted)."""
    bindings = {name: as_expr(value) for name, value in bindings.items()}
    memo = {}

    def visit(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Param):
            result = bindings.get(node.name, node)
        elif isinstance(node, Sum):
            result = add(*[visit(t) for t in node.terms])
        elif isinstance(node, Product):
            result = mul(*[visit(f) for f in node.factors])
        elif isinstance(node, Quotient):
            result = div(visit(node.numerator), visit(node.denominator))
        elif isinstance(node, Power):
            result = power(visit(node.base), node.exponent)
        elif isinstance(node, Neg):
            result = neg(visit(node.arg))
        elif isinstance(node, Func):
            result = func(node.name, visit(node.arg))
        elif isinstance(node, Conj):
            result = conj(visit(node.arg))
        else:
            result = node
        memo[key] = result
        return result

    return visit(as_expr(e))


def parameters_of(e):
    """Names of the parameters occurring in ``e``."""
    names = set()
    for node in walk(e):
        if isinstance(node, Param):
            names.add(node.name)
    return names


def walk(e):
    """Yield each distinct node of the DAG once."""
    seen = set()
    stack = [as_expr(e)]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(node.children)


def depth(e):
    memo = {}

    def visit(node):
        if id(node) not in memo:
            memo[id(node)] = 1 + max((visit(c) for c in node.children), default=0)
        return memo[id(node)]

    return visit(as_expr(e))


def _format_number(value):
    if value.imag == 0:
        text = repr(float(value.real))
        return f"({text})" if value.real < 0 else text
    return f"({float(value.real)!r} + {float(value.imag)!r}*i)"


def to_source(e):
    """Print an expression in the parser's grammar."""

    def wrap(node, minimum):
        text = visit(node)
        if node.precedence < minimum:
            return f"({text})"
        return text

    def visit(node):
        if isinstance(node, Const):
            return _format_number(node.value)
        if isinstance(node, ImaginaryUnit):
            return "i"
        if isinstance(node, (Var, Param)):
            return node.name
        if isinstance(node, Sum):
            return " + ".join(wrap(t, _SUM) for t in node.terms)
        if isinstance(node, Product):
            return "*".join(wrap(f, _UNARY) for f in node.factors)
        if isinstance(node, Quotient):
            return f"{wrap(node.numerator, _UNARY)}/{wrap(node.denominator, _POWER)}"
        if isinstance(node, Power):
            exponent = node.exponent if node.exponent > 0 else f"({node.exponent})"
            return f"{wrap(node.base, _ATOM)}^{exponent}"
        if isinstance(node, Neg):
            return f"-{wrap(node.arg, _POWER)}"
        if isinstance(node, Func):
            return f"{node.name}({visit(node.arg)})"
        if isinstance(node, Conj):
            return f"conj({visit(node.arg)})"
        raise TypeError(f"Unknown node {type(node).__name__}")

    return visit(as_expr(e))
