"""
Frame fields of the (−1, μ, 0) model spaces and the structure they define.

Every model is given by a frame (ξ, X₁…Xₙ, Y₁…Yₙ) declared orthonormal, with η = dt,
φX_i = Y_i and φY_i = −X_i. The frames used here have the block form

    ξ = ∂_t + Σ (cⁱ_x ∂_{xⁱ} + cⁱ_y ∂_{yⁱ}),   X_i, Y_i ∈ span(∂_{xⁱ}, ∂_{yⁱ}),

so the coframe is obtained blockwise from 2x2 inverses.
"""
import logging
from dataclasses import dataclass

from cosymcr.accs.structure import ChartStructure
from cosymcr.expr.expression import ONE, ZERO, add, cos, cosh, div, is_one, mul, neg, param, sin, sinh, sub
from cosymcr.fields.tensors import KForm, MetricField, Tensor11, VectorField

logger = logging.getLogger(__name__)

MU = param("mu")
OMEGA = param("w")


@dataclass(frozen=True)
class FrameBlock:
    """Components of X_i and Y_i on (∂_{xⁱ}, ∂_{yⁱ})."""

    x_of_x: object
    y_of_x: object
    x_of_y: object
    y_of_y: object
    # the model blocks have determinant 1 identically
    unimodular: bool = False


def hyperbolic_block(t):
    """|μ| < 2, ω = √(1 − μ²/4)."""
    ch, sh = cosh(mul(OMEGA, t)), sinh(mul(OMEGA, t))
    shifted = div(mul(MU, sh), mul(2.0, OMEGA))
    return FrameBlock(add(ch, div(sh, OMEGA)), neg(shifted), shifted, sub(ch, div(sh, OMEGA)), True)


def linear_block(t):
    """|μ| = 2, ε = μ/2 = ±1."""
    epsilon_t = mul(0.5, MU, t)
    return FrameBlock(add(ONE, t), neg(epsilon_t), epsilon_t, sub(ONE, t), True)


def trigonometric_block(t):
    """|μ| > 2, ω = √(μ²/4 − 1)."""
    c, s = cos(mul(OMEGA, t)), sin(mul(OMEGA, t))
    shifted = div(mul(MU, s), mul(2.0, OMEGA))
    return FrameBlock(add(c, div(s, OMEGA)), neg(shifted), shifted, sub(c, div(s, OMEGA)), True)


@dataclass
class Frame:
    """Real frame (ξ, X₁…Xₙ, Y₁…Yₙ) with the 2x2 blocks and ξ shifts it was built from."""

    chart: object
    xi: VectorField
    X: list
    Y: list
    blocks: list
    shift: list

    def vectors(self):
        return [self.xi] + list(self.X) + list(self.Y)


def block_frame(chart, blocks, shift=None):
    """
    Frame from one 2x2 block per complex direction and an optional ξ shift
    (cⁱ_x, cⁱ_y) per direction.
    """
    n = chart.n
    dim = chart.dimension
    shift = shift or [(ZERO, ZERO)] * n
    xi = [ZERO] * dim
    xi[0] = ONE
    X, Y = [], []
    for i in range(1, n + 1):
        x, y = chart.x_index(i), chart.y_index(i)
        block = blocks[i - 1]
        xi[x], xi[y] = shift[i - 1]
        xc, yc = [ZERO] * dim, [ZERO] * dim
        xc[x], xc[y] = block.x_of_x, block.y_of_x
        yc[x], yc[y] = block.x_of_y, block.y_of_y
        X.append(VectorField(chart, xc))
        Y.append(VectorField(chart, yc))
    return Frame(chart, VectorField(chart, xi), X, Y, list(blocks), list(shift))


def coframe(frame):
    """
    Rows θ^a of the inverse frame matrix, ordered (η, θ^{X_1}…θ^{X_n}, θ^{Y_1}…θ^{Y_n}),
    each a list of components on (dt, dx¹…, dy¹…).
    """
    chart = frame.chart
    n = chart.n
    dim = chart.dimension
    rows = [[ZERO] * dim for _ in range(dim)]
    rows[0][0] = ONE
    for i in range(1, n + 1):
        x, y = chart.x_index(i), chart.y_index(i)
        b = frame.blocks[i - 1]
        det = sub(mul(b.x_of_x, b.y_of_y), mul(b.x_of_y, b.y_of_x))
        # inverse of [[X^x, Y^x], [X^y, Y^y]]
        inv = [[b.y_of_y, neg(b.x_of_y)], [neg(b.y_of_x), b.x_of_x]]
        if not (b.unimodular or is_one(det)):
            inv = [[div(e, det) for e in row] for row in inv]
        cx, cy = frame.shift[i - 1]
        for r, a in ((0, i), (1, n + i)):
            rows[a][x] = inv[r][0]
            rows[a][y] = inv[r][1]
            rows[a][0] = neg(add(mul(inv[r][0], cx), mul(inv[r][1], cy)))
    return rows


def frame_structure(frame, params, name):
    """ChartStructure declaring the frame orthonormal, with φX_i = Y_i and φY_i = −X_i."""
    chart = frame.chart
    n = chart.n
    dim = chart.dimension
    theta = coframe(frame)
    vectors = frame.vectors()

    phi = [[None] * dim for _ in range(dim)]
    for p in range(dim):
        for q in range(dim):
            terms = []
            for i in range(n):
                terms.append(mul(frame.Y[i][p], theta[1 + i][q]))
                terms.append(neg(mul(frame.X[i][p], theta[1 + n + i][q])))
            phi[p][q] = add(*terms)

    g = [[add(*[mul(theta[a][p], theta[a][q]) for a in range(dim)]) for q in range(dim)] for p in range(dim)]
    g_inverse = [[add(*[mul(v[p], v[q]) for v in vectors]) for q in range(dim)] for p in range(dim)]

    return ChartStructure(
        chart=chart,
        phi=Tensor11(chart, phi),
        xi=frame.xi,
        eta=KForm.one_form(chart, theta[0]),
        g=MetricField(chart, g),
        params=dict(params),
        name=name,
        g_inverse=MetricField(chart, g_inverse, contravariant=True),
    )
