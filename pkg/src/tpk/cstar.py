"""Grid model of two projections on A = C([0,1]; M_2(C)) acting on itself by left multiplication.

``P`` multiplies by the constant matrix ``diag(1, 0)``, and ``Q`` by the
rank-one projector onto ``(cos(pi t/2), sin(pi t/2))``. Each of the four
sums ``P+Q``, ``P+I-Q``, ``I-P+Q`` and ``I-P+I-Q`` has a singular
multiplier at one endpoint, which keeps the unit ``e`` at distance at
least 1 from its range.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadGrid, GridMismatch
from .linalg import DEFAULT_POLICY

__all__ = [
    "GridFunction",
    "ExampleOperators",
    "COMBINATIONS",
    "build_example",
    "sup_norm",
    "apply_left",
    "distance_to_unit",
    "distance_to_unit_batch",
    "least_squares_adversary",
    "KernelProbe",
    "kernel_probe",
    "norms_2x2",
    "refinement_levels",
]

COMBINATIONS = ("P,Q", "P,I-Q", "I-P,Q", "I-P,I-Q")
I2 = np.eye(2, dtype=np.complex128)


def norms_2x2(m):
    """Spectral norms of a stack of 2x2 matrices, shape ``(..., 2, 2) -> (...)``.

    Uses the closed form ``s_max^2 = (f + sqrt(f^2 - 4|det|^2)) / 2`` with
    ``f`` the squared Frobenius norm.
    """
    f = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    disc = np.sqrt(np.maximum(f * f - 4 * np.abs(det) ** 2, 0.0))
    return np.sqrt(0.5 * (f + disc))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Continuous piecewise-linear function ``[0, 1] -> M_2(C)`` given by node values."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=np.complex128)
        if nodes.ndim != 1 or nodes.size < 2:
            raise BadGrid("need at least two nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0 or np.any(np.diff(nodes) <= 0):
            raise BadGrid("nodes must increase strictly from 0 to 1")
        if values.shape != (nodes.size, 2, 2):
            raise BadGrid(f"values must have shape ({nodes.size}, 2, 2), got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise BadGrid("non-finite values")
        nodes.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, n_nodes, fn=None, values=None):
        if n_nodes < 2:
            raise BadGrid("n_nodes must be at least 2")
        t = np.linspace(0.0, 1.0, n_nodes)
        if values is None:
            values = np.stack([fn(s) for s in t]) if fn else np.zeros((n_nodes, 2, 2))
        return cls(t, values)

    @classmethod
    def constant(cls, nodes, m):
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.broadcast_to(np.asarray(m, dtype=np.complex128), (nodes.size, 2, 2)))

    @classmethod
    def unit(cls, nodes):
        return cls.constant(nodes, I2)

    @property
    def n_nodes(self):
        return self.nodes.size

    @property
    def max_spacing(self):
        return float(np.max(np.diff(self.nodes)))

    def __call__(self, t):
        """Linear interpolation at scalar or array ``t``."""
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        out = np.empty(flat.shape + (2, 2), dtype=np.complex128)
        for i in range(2):
            for j in range(2):
                v = self.values[:, i, j]
                out[:, i, j] = np.interp(flat, self.nodes, v.real) + 1j * np.interp(flat, self.nodes, v.imag)
        return out.reshape(t.shape + (2, 2))

    def _same_grid(self, other):
        if self.nodes.shape != other.nodes.shape or not np.array_equal(self.nodes, other.nodes):
            raise GridMismatch("grid functions live on different grids")

    def __add__(self, other):
        self._same_grid(other)
        return GridFunction(self.nodes, self.values + other.values)

    def __sub__(self, other):
        self._same_grid(other)
        return GridFunction(self.nodes, self.values - other.values)

    def __neg__(self):
        return GridFunction(self.nodes, -self.values)

    def adjoint(self):
        return GridFunction(self.nodes, np.conj(np.swapaxes(self.values, -1, -2)))


def apply_left(a, x):
    """The left-multiplication operator ``L_a`` applied to ``x``, node by node."""
    a._same_grid(x)
    return GridFunction(a.nodes, a.values @ x.values)


def sup_norm(x, rigorous=False, lipschitz=np.pi / 2):
    """Maximum over nodes of the 2x2 spectral norm.

    With ``rigorous=True`` the result is an upper bound for a function whose
    node values come from an underlying ``lipschitz``-continuous function:
    ``lipschitz * max_spacing`` is added to the node maximum.
    """
    m = float(np.max(norms_2x2(x.values)))
    if rigorous:
        m += lipschitz * x.max_spacing
    return m


def _p_values(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = 1.0
    return out


def _q_values(t):
    t = np.asarray(t, dtype=float)
    # exact endpoints: Q(0) = diag(1, 0) and Q(1) = diag(0, 1)
    c = np.where(t == 1.0, 0.0, np.cos(np.pi * t / 2))
    s = np.sin(np.pi * t / 2)
    out = np.empty(t.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c * c
    out[..., 0, 1] = s * c
    out[..., 1, 0] = s * c
    out[..., 1, 1] = s * s
    return out


@dataclass(frozen=True, eq=False)
class ExampleOperators:
    p_tilde: GridFunction
    q_tilde: GridFunction

    @property
    def n_nodes(self):
        return self.p_tilde.n_nodes

    @property
    def nodes(self):
        return self.p_tilde.nodes

    @staticmethod
    def p_at(t):
        return _p_values(t)

    @staticmethod
    def q_at(t):
        return _q_values(t)

    def pair_at(self, combo, t):
        """Exact values of the two multipliers of ``combo`` at ``t``."""
        first, second = _split(combo)
        p, q = _p_values(t), _q_values(t)
        return (I2 - p if first == "I-P" else p), (I2 - q if second == "I-Q" else q)

    def sum_values(self, combo="P,Q", t=None):
        """Node (or ``t``) values of the multiplier of the summed operator."""
        a, b = self.pair_at(combo, self.nodes if t is None else t)
        return a + b

    def summed(self, combo="P,Q"):
        return GridFunction(self.nodes, self.sum_values(combo))

    def continuity_jump(self):
        """Largest ``||Q(t_{k+1}) - Q(t_k)||`` over adjacent nodes."""
        return float(np.max(norms_2x2(np.diff(self.q_tilde.values, axis=0))))


def _split(combo):
    if combo not in COMBINATIONS:
        raise ValueError(f"unknown combination {combo!r}; expected one of {COMBINATIONS}")
    return combo.split(",")


def build_example(n_nodes):
    if n_nodes < 2:
        raise BadGrid("n_nodes must be at least 2")
    t = np.linspace(0.0, 1.0, n_nodes)
    return ExampleOperators(GridFunction(t, _p_values(t)), GridFunction(t, _q_values(t)))


def distance_to_unit(ex, x, combo="P,Q"):
    """``sup_t ||(A(t) + B(t)) x(t) - I||`` for the pair named by ``combo``."""
    ex.p_tilde._same_grid(x)
    return sup_norm(apply_left(ex.summed(combo), x) - GridFunction.unit(x.nodes))


def distance_to_unit_batch(ex, xs, combo="P,Q"):
    """Vectorized :func:`distance_to_unit` over values of shape ``(batch, n_nodes, 2, 2)``."""
    xs = np.asarray(xs, dtype=np.complex128)
    if xs.shape[-3:] != (ex.n_nodes, 2, 2):
        raise GridMismatch(f"values shape {xs.shape} does not match a {ex.n_nodes}-node grid")
    r = ex.sum_values(combo) @ xs - I2
    return np.max(norms_2x2(r), axis=-1)


def least_squares_adversary(ex, combo="P,Q"):
    """Node-wise minimizer of ``||(A + B) v - I||``: the pseudoinverse at each node."""
    return GridFunction(ex.nodes, np.linalg.pinv(ex.sum_values(combo)))


@dataclass(frozen=True)
class KernelProbe:
    pointwise_kernel_dims: list
    bump_ratio: float


def refinement_levels(n_nodes, levels=3, factor=4):
    """Grid sizes obtained by coarsening ``n_nodes`` by ``factor`` up to ``levels`` times."""
    out = [n_nodes]
    intervals = n_nodes - 1
    while len(out) < levels and intervals % factor == 0 and intervals // factor >= 1:
        intervals //= factor
        out.append(intervals + 1)
    return sorted(out)


def kernel_probe(ex, policy=DEFAULT_POLICY, samples=256):
    """Pointwise kernel dimensions of ``P(t) + Q(t)`` and the hat-function ratio.

    The hat element is ``x_h(t) = (1 - t/t_1)_+ E_21`` supported on
    ``[0, t_1]``. ``||(P+Q) x_h|| / ||x_h||`` is evaluated with the exact
    multipliers on ``samples`` points of ``[0, t_1]``; it vanishes as the grid
    refines, which is how the non-closed range shows up at finite size.
    """
    s = ex.sum_values("P,Q")
    sv = np.linalg.svd(s, compute_uv=False)
    dims = [2 - policy.rank(row) for row in sv]

    t1 = ex.nodes[1]
    t = np.linspace(0.0, t1, samples)
    hat = np.zeros((samples, 2, 2), dtype=np.complex128)
    hat[:, 1, 0] = 1.0 - t / t1
    image = ex.sum_values("P,Q", t) @ hat
    ratio = float(np.max(norms_2x2(image)) / np.max(norms_2x2(hat)))
    return KernelProbe(dims, ratio)
