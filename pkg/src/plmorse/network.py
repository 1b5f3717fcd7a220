"""ReLU network model: exact evaluation, serialization, and constructions.

A network is a chain of affine layers with ReLU on every hidden layer and no
activation on the final (scalar) layer.  All parameters are Fractions, so
evaluation, activation signs, and every downstream geometric predicate are
exact.  Includes two explicit depth-2 families on the plane built from lines
tangent to the unit circle, plus seeded random ensembles.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .geometry import Polyhedron, Vec, dot, vec

RELU = "relu"
NONE = "none"


class NetworkFormatError(ValueError):
    """Problem with network data (file or construction)."""


class NetworkShapeError(NetworkFormatError):
    """Layer dimensions do not line up."""


class RationalParseError(NetworkFormatError):
    """A scalar could not be read as an exact rational."""


@dataclass(frozen=True)
class AffineLayer:
    weights: tuple[tuple[Fraction, ...], ...]
    bias: tuple[Fraction, ...]
    activation: str

    @classmethod
    def make(cls, weights, bias, activation: str) -> "AffineLayer":
        return cls(
            tuple(tuple(Fraction(w) for w in row) for row in weights),
            tuple(Fraction(b) for b in bias),
            activation,
        )

    @property
    def out_dim(self) -> int:
        return len(self.weights)

    @property
    def in_dim(self) -> int:
        return len(self.weights[0]) if self.weights else 0

    def preactivation(self, x) -> tuple[Fraction, ...]:
        return tuple(dot(row, x) + b for row, b in zip(self.weights, self.bias))


@dataclass(frozen=True)
class Network:
    layers: tuple[AffineLayer, ...]

    def __post_init__(self):
        if not self.layers:
            raise NetworkShapeError("network needs at least one layer")
        for i, layer in enumerate(self.layers):
            if layer.out_dim != len(layer.bias):
                raise NetworkShapeError(
                    f"layer {i}: {layer.out_dim} weight rows but {len(layer.bias)} biases"
                )
            for r, row in enumerate(layer.weights):
                if len(row) != layer.in_dim:
                    raise NetworkShapeError(
                        f"layer {i} row {r}: expected length {layer.in_dim}, got {len(row)}"
                    )
            if i > 0 and layer.in_dim != self.layers[i - 1].out_dim:
                raise NetworkShapeError(
                    f"layer {i} takes {layer.in_dim} inputs but layer {i - 1} "
                    f"outputs {self.layers[i - 1].out_dim}"
                )
            want = NONE if i == len(self.layers) - 1 else RELU
            if layer.activation != want:
                raise NetworkFormatError(
                    f"layer {i}: activation must be {want!r}, got {layer.activation!r}"
                )
        if self.layers[-1].out_dim != 1:
            raise NetworkShapeError("final layer must have a single output")

    @property
    def architecture(self) -> tuple[int, ...]:
        return (self.layers[0].in_dim,) + tuple(l.out_dim for l in self.layers)

    @property
    def n0(self) -> int:
        return self.layers[0].in_dim

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(l.out_dim for l in self.layers[:-1])

    @property
    def total_hidden(self) -> int:
        return sum(self.hidden_widths)

    @property
    def depth(self) -> int:
        """Number of hidden layers."""
        return len(self.layers) - 1

    def evaluate(self, point) -> tuple[Fraction, tuple[Fraction, ...]]:
        """Exact output value and the flat tuple of hidden pre-activations."""
        x = vec(point)
        if len(x) != self.n0:
            raise NetworkShapeError(f"point has length {len(x)}, expected {self.n0}")
        pre: list[Fraction] = []
        for layer in self.layers[:-1]:
            z = layer.preactivation(x)
            pre.extend(z)
            x = tuple(max(zi, Fraction(0)) for zi in z)
        out = self.layers[-1].preactivation(x)
        return out[0], tuple(pre)

    def activation_pattern(self, point) -> tuple[int, ...]:
        """Ternary sign (+1/0/-1) of every hidden pre-activation at the point."""
        _, pre = self.evaluate(point)
        return tuple((z > 0) - (z < 0) for z in pre)

    def negate(self) -> "Network":
        """Network computing -F (output layer negated)."""
        last = self.layers[-1]
        flipped = AffineLayer(
            tuple(tuple(-w for w in row) for row in last.weights),
            tuple(-b for b in last.bias),
            NONE,
        )
        return Network(self.layers[:-1] + (flipped,))


# ---------------------------------------------------------------------------
# serialization


def _fraction_from_json(x, where: str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ZeroDivisionError:
            raise RationalParseError(f"{where}: zero denominator in {x!r}") from None
        except ValueError:
            raise RationalParseError(f"{where}: cannot parse {x!r} as a rational") from None
    raise RationalParseError(f"{where}: expected number or 'p/q' string, got {type(x).__name__}")


def _reject_constant(text: str):
    raise RationalParseError(f"non-finite number {text!r} is not a rational")


def load_network(path) -> Network:
    """Read a network from JSON, parsing every scalar exactly.

    JSON numbers are read as the exact rational their decimal literal denotes
    (0.1 means 1/10); strings use 'p/q' form.
    """
    with open(path) as fh:
        data = json.load(fh, parse_float=Fraction, parse_constant=_reject_constant)
    if not isinstance(data, dict) or "layers" not in data:
        raise NetworkFormatError("top level must be an object with a 'layers' key")
    layers = []
    for i, spec in enumerate(data["layers"]):
        where = f"layer {i}"
        if not isinstance(spec, dict):
            raise NetworkFormatError(f"{where}: expected an object")
        try:
            raw_w, raw_b, act = spec["weights"], spec["bias"], spec["activation"]
        except KeyError as missing:
            raise NetworkFormatError(f"{where}: missing key {missing}") from None
        if act not in (RELU, NONE):
            raise NetworkFormatError(f"{where}: unknown activation {act!r}")
        weights = tuple(
            tuple(_fraction_from_json(w, f"{where} row {r}") for w in row)
            for r, row in enumerate(raw_w)
        )
        bias = tuple(_fraction_from_json(b, f"{where} bias") for b in raw_b)
        layers.append(AffineLayer(weights, bias, act))
    return Network(tuple(layers))


def network_to_json(net: Network) -> dict:
    return {
        "layers": [
            {
                "weights": [
                    [f"{w.numerator}/{w.denominator}" for w in row] for row in layer.weights
                ],
                "bias": [f"{b.numerator}/{b.denominator}" for b in layer.bias],
                "activation": layer.activation,
            }
            for layer in net.layers
        ]
    }


def save_network(net: Network, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_json(net), fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# explicit families: tangent lines to the unit circle


def _circle_point(theta: float, precision: int = 1 << 20) -> Vec:
    """Rational point on the unit circle near angle theta (measured from north,
    clockwise), via the tangent half-angle parametrization."""
    # (sin, cos) = (2t/(1+t^2), (1-t^2)/(1+t^2)) with t = tan(theta/2)
    half = theta / 2.0
    if abs(math.cos(half)) < 1e-9:
        return vec((0, -1))
    t = Fraction(round(math.tan(half) * precision), precision)
    d = 1 + t * t
    return (2 * t / d, (1 - t * t) / d)


def _cross(p: Vec, q: Vec) -> Fraction:
    return p[0] * q[1] - p[1] * q[0]


def _assert_cyclic_tangency_points(points: list[Vec], wraparound: bool = True):
    for p in points:
        assert p[0] * p[0] + p[1] * p[1] == 1
    last = len(points) if wraparound else len(points) - 1
    for i in range(last):
        q = points[(i + 1) % len(points)]
        assert _cross(points[i], q) < 0, "tangency points out of clockwise order"
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            assert dot(p, q) < 1, "coincident tangency points"


def build_fan_network(n: int) -> Network:
    """Depth-2 network on the plane whose hidden layer is 2n+2 lines tangent
    to the unit circle at equally spaced points, with alternating output
    weights.  The inscribed (2n+2)-gon is a flat region at level 0."""
    if n < 1:
        raise ValueError("need n >= 1")
    count = 2 * n + 2
    points = [_circle_point(math.pi * j / (n + 1)) for j in range(1, count + 1)]
    _assert_cyclic_tangency_points(points)
    hidden = AffineLayer(
        tuple((p[0], p[1]) for p in points),
        tuple(Fraction(-1) for _ in points),
        RELU,
    )
    out = AffineLayer(
        (tuple(Fraction((-1) ** j) for j in range(1, count + 1)),),
        (Fraction(0),),
        NONE,
    )
    return Network((hidden, out))


def build_coarse_bound_network(m: int) -> Network:
    """Depth-2 network on the plane from m tangent lines on the upper half of
    the circle, with output weights -1, ±2, ..., ±1 chosen so sublevel sets
    below every threshold keep m-2 bounded loops' worth of relative cycles."""
    if m < 3:
        raise ValueError("need m >= 3")
    points = [_circle_point(math.pi * i / (m + 1)) for i in range(1, m + 1)]
    _assert_cyclic_tangency_points(points, wraparound=False)
    hidden = AffineLayer(
        tuple((-p[0], -p[1]) for p in points),
        tuple(Fraction(1) for _ in points),
        RELU,
    )
    w = [Fraction(0)] * m
    w[0] = Fraction(-1)
    for i in range(2, m):
        w[i - 1] = Fraction(2 * (-1) ** i)
    w[m - 1] = Fraction((-1) ** m)
    out = AffineLayer((tuple(w),), (Fraction(0),), NONE)
    return Network((hidden, out))


def prescribe_edge_orientations(layer1: AffineLayer, signs) -> tuple[Fraction, ...]:
    """Output-weight vector steering the flow across each wall of the flat cell.

    layer1 must have a full-dimensional region where every neuron is inactive;
    the returned vector s puts slope signs[i] on neuron i's wall, so crossing
    wall i out of the flat cell raises the output iff signs[i] = +1.  Neurons
    whose hyperplane does not support a facet of the region get weight 0.
    """
    signs = tuple(int(s) for s in signs)
    if len(signs) != layer1.out_dim:
        raise ValueError(f"need {layer1.out_dim} signs, got {len(signs)}")
    if any(s not in (-1, 1) for s in signs):
        raise ValueError("signs must be +1 or -1")
    n = layer1.in_dim
    walls = [
        (tuple(-w for w in row), -b) for row, b in zip(layer1.weights, layer1.bias)
    ]
    region = Polyhedron(n, ges=walls)
    if region.dim != n:
        raise ValueError("inactive region of layer is empty or lower-dimensional")
    out = []
    for wall, s in zip(walls, signs):
        facet = region.with_constraints(eqs=[wall])
        out.append(Fraction(s) if facet.dim == n - 1 else Fraction(0))
    return tuple(out)


# ---------------------------------------------------------------------------
# random ensembles

_SNAP = 1 << 53


def _snap(x: float) -> Fraction:
    return Fraction(round(x * _SNAP), _SNAP)


def random_network(arch, seed: int, scheme: str = "gaussian") -> Network:
    """Seeded random network with parameters snapped to dyadic rationals.

    arch lists all widths (n0, ..., nm, 1); scheme is 'gaussian' or 'uniform',
    both symmetric about zero.  Deterministic in (arch, seed, scheme).
    """
    arch = tuple(int(a) for a in arch)
    if len(arch) < 2:
        raise ValueError("architecture needs at least input and output widths")
    if any(a < 1 for a in arch):
        raise ValueError("widths must be positive")
    if arch[-1] != 1:
        raise ValueError("output width must be 1")
    if scheme == "gaussian":
        draw = lambda rng: rng.gauss(0.0, 1.0)
    elif scheme == "uniform":
        draw = lambda rng: rng.uniform(-1.0, 1.0)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    rng = random.Random(f"plmorse|{scheme}|{','.join(map(str, arch))}|{seed}")
    layers = []
    for i in range(len(arch) - 1):
        rows = tuple(
            tuple(_snap(draw(rng)) for _ in range(arch[i])) for _ in range(arch[i + 1])
        )
        bias = tuple(_snap(draw(rng)) for _ in range(arch[i + 1]))
        layers.append(AffineLayer(rows, bias, NONE if i == len(arch) - 2 else RELU))
    return Network(tuple(layers))
