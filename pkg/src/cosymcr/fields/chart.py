from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cosymcr.config import BOX_HALF_WIDTH, DEFAULT_SEED
from cosymcr.errors import ChartMismatchError
from cosymcr.expr.expression import I, Param, Var, add, mul, sub


def default_coordinate_names(n):
    return ("t",) + tuple(f"x{i}" for i in range(1, n + 1)) + tuple(f"y{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class ChartDecl:
    """
    A real chart (t, x¹..xⁿ, y¹..yⁿ) of dimension 2n+1.

    The complex coordinates zⁱ = xⁱ + i yⁱ are not coordinates of the chart; they are
    available as expression aliases only.
    """

    n: int
    names: tuple = None
    box: tuple = None
    parameters: tuple = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("The CR dimension n must be at least 1")
        names = tuple(self.names) if self.names is not None else default_coordinate_names(self.n)
        if len(names) != self.dimension:
            raise ChartMismatchError(f"A chart with n={self.n} needs {self.dimension} coordinate names, got {len(names)}")
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate coordinate names: {names}")
        box = self.box
        if box is None:
            box = tuple((-BOX_HALF_WIDTH, BOX_HALF_WIDTH) for _ in names)
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        if len(box) != self.dimension:
            raise ChartMismatchError("The sampling box must give one interval per coordinate")
        for lo, hi in box:
            if not lo < hi:
                raise ValueError(f"Empty sampling interval [{lo}, {hi}]")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "parameters", tuple(self.parameters))

    @property
    def dimension(self):
        return 2 * self.n + 1

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ChartMismatchError(f"'{name}' is not a coordinate of this chart") from None

    def x_index(self, i):
        """Index of xⁱ, with i counted from 1."""
        self._check_complex_index(i)
        return i

    def y_index(self, i):
        self._check_complex_index(i)
        return self.n + i

    def _check_complex_index(self, i):
        if not 1 <= i <= self.n:
            raise ChartMismatchError(f"Complex coordinate index {i} outside 1..{self.n}")

    @cached_property
    def variables(self):
        return tuple(Var(k, name) for k, name in enumerate(self.names))

    def var(self, key):
        """Coordinate variable by index or by name."""
        if isinstance(key, str):
            key = self.index(key)
        return self.variables[key]

    @cached_property
    def parameter_nodes(self):
        return {name: Param(name) for name in self.parameters}

    def z(self, i):
        return add(self.var(self.x_index(i)), mul(I, self.var(self.y_index(i))))

    def zbar(self, i):
        return sub(self.var(self.x_index(i)), mul(I, self.var(self.y_index(i))))

    @cached_property
    def aliases(self):
        """Complex-coordinate aliases recognised by the expression parser."""
        table = {}
        for i in range(1, self.n + 1):
            table[f"z{i}"] = self.z(i)
            table[f"zb{i}"] = self.zbar(i)
            table[f"zbar{i}"] = self.zbar(i)
        if self.n == 1:
            table["z"] = self.z(1)
            table["zb"] = self.zbar(1)
            table["zbar"] = self.zbar(1)
        for name in self.names:
            table.pop(name, None)
        return table

    def with_parameters(self, *names):
        merged = tuple(dict.fromkeys(self.parameters + tuple(names)))
        return ChartDecl(self.n, self.names, self.box, merged)

    def sample(self, count, seed=DEFAULT_SEED):
        """Deterministic uniform sample of ``count`` points in the box, shape (count, dim)."""
        if count < 1:
            raise ValueError("At least one sample point is required")
        rng = np.random.default_rng(seed)
        lows = np.array([lo for lo, _ in self.box])
        highs = np.array([hi for _, hi in self.box])
        return lows + (highs - lows) * rng.random((count, self.dimension))

    def origin(self):
        return np.zeros(self.dimension)

    def same_as(self, other):
        return self.n == other.n and self.names == other.names

    def require_same(self, other):
        if not self.same_as(other):
            raise ChartMismatchError(f"Charts differ: {self.names} vs {other.names}")
