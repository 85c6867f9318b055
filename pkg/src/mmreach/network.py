"""Dense feedforward networks ``x_i = phi(W_i x_{i-1} + b_i)``.

The activation is applied at every layer, including the last.  Each node may
use its own activation; homogeneous layers take a fast path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .activations import ActivationSpec, builtin, local_bounds_array
from .errors import DimensionMismatch, SchemaError, ShapeMismatch, UnknownActivation
from .interval import IntervalVector

FORMAT_VERSION = 1
PRNG_ID = "numpy-philox4x64-10"


class Layer:
    """One affine map followed by a per-node activation."""

    __slots__ = ("W", "b", "activation", "_groups")

    def __init__(self, W, b, activation):
        W = np.array(W, dtype=float)
        b = np.array(b, dtype=float)
        if W.ndim != 2 or b.shape != (W.shape[0],):
            raise ShapeMismatch(f"weights {W.shape} and bias {b.shape} do not match")
        if W.shape[0] == 0 or W.shape[1] == 0:
            raise ShapeMismatch("layers must have at least one input and one output")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise SchemaError("non-finite weight or bias")
        if isinstance(activation, (str, ActivationSpec)):
            activation = [activation] * W.shape[0]
        acts = tuple(builtin(a) if isinstance(a, str) else a for a in activation)
        if len(acts) != W.shape[0]:
            raise ShapeMismatch(f"{len(acts)} activations for {W.shape[0]} nodes")
        W.flags.writeable = False
        b.flags.writeable = False
        self.W = W
        self.b = b
        self.activation = acts
        self._groups = _group_nodes(acts)

    @property
    def n_in(self) -> int:
        return self.W.shape[1]

    @property
    def n_out(self) -> int:
        return self.W.shape[0]

    @property
    def homogeneous(self) -> bool:
        return len(self._groups) == 1

    def activation_names(self) -> list[str]:
        return [a.name for a in self.activation]

    def phi(self, Z: np.ndarray) -> np.ndarray:
        if self.homogeneous:
            return self.activation[0].phi.eval(Z)
        out = np.empty_like(Z)
        for spec, idx in self._groups:
            out[..., idx] = spec.phi.eval(Z[..., idx])
        return out

    def _bounds(self, which: str, lo: np.ndarray, hi: np.ndarray):
        if self.homogeneous:
            return local_bounds_array(getattr(self.activation[0], which), lo, hi)
        out_lo = np.empty_like(lo)
        out_hi = np.empty_like(hi)
        for spec, idx in self._groups:
            out_lo[idx], out_hi[idx] = local_bounds_array(getattr(spec, which), lo[idx], hi[idx])
        return out_lo, out_hi

    def phi_bounds(self, lo, hi):
        """Per-node range of the activation over pre-activation bounds."""
        return self._bounds("phi", lo, hi)

    def dphi_bounds(self, lo, hi):
        """Per-node range of the activation derivative over pre-activation bounds."""
        return self._bounds("dphi", lo, hi)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.phi(X @ self.W.T + self.b)


def _group_nodes(acts):
    names = {}
    for i, a in enumerate(acts):
        names.setdefault(a.name, (a, []))[1].append(i)
    return [(a, np.array(idx)) for a, idx in names.values()]


class Network:
    """A sequence of chained layers; layer indices are 1-based in public calls."""

    def __init__(self, layers):
        layers = list(layers)
        if not layers:
            raise ShapeMismatch("a network needs at least one layer")
        for i in range(1, len(layers)):
            if layers[i].n_in != layers[i - 1].n_out:
                raise ShapeMismatch(
                    f"layer {i + 1} expects {layers[i].n_in} inputs but layer {i} "
                    f"produces {layers[i - 1].n_out}"
                )
        self.layers = tuple(layers)

    @classmethod
    def from_weights(cls, weights, biases, activation="relu") -> Network:
        return cls(Layer(W, b, activation) for W, b in zip(weights, biases))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def n_inputs(self) -> int:
        return self.layers[0].n_in

    @property
    def n_outputs(self) -> int:
        return self.layers[-1].n_out

    @property
    def dims(self) -> list[int]:
        return [self.n_inputs] + [layer.n_out for layer in self.layers]

    @property
    def n_neurons(self) -> int:
        return sum(layer.n_out for layer in self.layers)

    def forward(self, x, k: int = 1, l: int | None = None) -> np.ndarray:
        """Evaluate the partial network made of layers ``k..l`` (1-based, inclusive).

        ``x`` may be a single input vector or a batch with one input per row.
        """
        l = self.depth if l is None else l
        if not 1 <= k <= l <= self.depth:
            raise DimensionMismatch(f"invalid partial network ({k}, {l}) for depth {self.depth}")
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.layers[k - 1].n_in:
            raise DimensionMismatch(
                f"layer {k} expects inputs of dim {self.layers[k - 1].n_in}, got {x.shape[-1]}"
            )
        for layer in self.layers[k - 1 : l]:
            x = layer(x)
        return x

    __call__ = forward

    def __eq__(self, other):
        if not isinstance(other, Network) or self.depth != other.depth:
            return NotImplemented if not isinstance(other, Network) else False
        return all(
            np.array_equal(a.W, b.W)
            and np.array_equal(a.b, b.b)
            and a.activation_names() == b.activation_names()
            for a, b in zip(self.layers, other.layers)
        )

    __hash__ = None

    def __repr__(self):
        return f"Network(dims={self.dims})"


forward = Network.forward


# --- serialization ------------------------------------------------------------


def _encode_array(a: np.ndarray, encoding: str):
    flat = np.ascontiguousarray(a, dtype=">f8").ravel()
    if encoding == "hex":
        return flat.tobytes().hex()
    return [float(v) for v in flat]


def _decode_array(value, count: int, what: str) -> np.ndarray:
    if isinstance(value, str):
        try:
            raw = bytes.fromhex(value)
        except ValueError as e:
            raise SchemaError(f"{what}: invalid hex payload") from e
        if len(raw) != 8 * count:
            raise ShapeMismatch(f"{what}: expected {count} values, got {len(raw) / 8:g}")
        return np.frombuffer(raw, dtype=">f8").astype(float)
    if not isinstance(value, list):
        raise SchemaError(f"{what}: expected a list of numbers or a hex string")
    if value and isinstance(value[0], list):
        value = [v for row in value for v in row]
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{what}: non-numeric entries") from e
    if arr.size != count:
        raise ShapeMismatch(f"{what}: expected {count} values, got {arr.size}")
    return arr


def network_to_dict(net: Network, *, encoding: str = "decimal", meta: dict | None = None) -> dict:
    if encoding not in ("decimal", "hex"):
        raise ValueError(f"unknown weight encoding {encoding!r}")
    names = [layer.activation_names() for layer in net.layers]
    flat = [n for layer in names for n in layer]
    default = max(set(flat), key=flat.count)
    doc = {"format_version": FORMAT_VERSION, "activation": default, "prng": PRNG_ID}
    if meta:
        doc["meta"] = meta
    layers = []
    for layer, acts in zip(net.layers, names):
        entry = {"rows": layer.n_out, "cols": layer.n_in}
        if any(a != default for a in acts):
            entry["activation"] = acts[0] if len(set(acts)) == 1 else acts
        entry["encoding"] = encoding
        entry["W"] = _encode_array(layer.W, encoding)
        entry["b"] = _encode_array(layer.b, encoding)
        layers.append(entry)
    doc["layers"] = layers
    return doc


def network_from_dict(doc) -> Network:
    if not isinstance(doc, dict):
        raise SchemaError("network document must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {doc.get('format_version')!r}")
    layers_doc = doc.get("layers")
    if not isinstance(layers_doc, list) or not layers_doc:
        raise SchemaError("'layers' must be a non-empty list")
    default = doc.get("activation", "relu")
    layers = []
    for i, entry in enumerate(layers_doc, start=1):
        if not isinstance(entry, dict):
            raise SchemaError(f"layer {i}: expected an object")
        try:
            rows, cols = int(entry["rows"]), int(entry["cols"])
            W_raw, b_raw = entry["W"], entry["b"]
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"layer {i}: missing or invalid field ({e})") from e
        if rows < 1 or cols < 1:
            raise ShapeMismatch(f"layer {i}: dimensions must be positive")
        if layers and cols != layers[-1].n_out:
            raise ShapeMismatch(
                f"layer {i} has {cols} columns but layer {i - 1} has {layers[-1].n_out} rows"
            )
        W = _decode_array(W_raw, rows * cols, f"layer {i} W").reshape(rows, cols)
        b = _decode_array(b_raw, rows, f"layer {i} b")
        act = entry.get("activation", default)
        if isinstance(act, list) and len(act) != rows:
            raise ShapeMismatch(f"layer {i}: {len(act)} activations for {rows} nodes")
        layers.append(Layer(W, b, act))
    return Network(layers)


def serialize_network(net: Network, *, encoding: str = "decimal", meta: dict | None = None) -> str:
    return json.dumps(network_to_dict(net, encoding=encoding, meta=meta), indent=1)


def parse_network(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not a JSON document: {e}") from e
    return network_from_dict(doc)


def load_network(path) -> Network:
    with open(path) as fh:
        return parse_network(fh.read())


def save_network(net: Network, path, **kw):
    with open(path, "w") as fh:
        fh.write(serialize_network(net, **kw))


def box_to_dict(box: IntervalVector, center=None, eps=None) -> dict:
    if center is not None:
        return {"center": [float(c) for c in center], "eps": float(eps)}
    return box.to_dict()


def box_from_dict(doc, eps: float | None = None) -> IntervalVector:
    """Parse a box document; ``eps`` overrides the radius around the center."""
    if not isinstance(doc, dict):
        raise SchemaError("box document must be an object")
    try:
        if "center" in doc:
            center = np.array(doc["center"], dtype=float)
            r = float(doc.get("eps", 0.1)) if eps is None else float(eps)
            if center.ndim != 1 or r < 0:
                raise SchemaError("box center must be a list and eps non-negative")
            return IntervalVector(center - r, center + r)
        lo = np.array(doc["lo"], dtype=float)
        hi = np.array(doc["hi"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"invalid box document ({e})") from e
    if eps is not None:
        mid = 0.5 * (lo + hi)
        lo, hi = mid - eps, mid + eps
    try:
        return IntervalVector(lo, hi)
    except ValueError as e:
        raise SchemaError(f"invalid box: {e}") from e


def load_box(path, eps: float | None = None) -> IntervalVector:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not a JSON document: {e}") from e
    return box_from_dict(doc, eps)


# --- random generation ------------------------------------------------------


@dataclass(frozen=True)
class RandomNetConfig:
    """Ranges (inclusive) for random network dimensions plus suite settings."""

    depth: tuple[int, int] = (1, 5)
    n_in: tuple[int, int] = (1, 10)
    n_out: tuple[int, int] = (1, 10)
    hidden: tuple[int, int] = (1, 30)
    activation: str = "relu"
    eps: float = 0.1
    count: int = 1000
    base_seed: int = 0
    preset: str = "custom"

    def __post_init__(self):
        for name in ("depth", "n_in", "n_out", "hidden"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"empty range for {name}: {lo}..{hi}")
            if lo < 1:
                raise ValueError(f"{name} must be at least 1, got {lo}")
            object.__setattr__(self, name, (int(lo), int(hi)))
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.count < 0:
            raise ValueError("count must be non-negative")

    @classmethod
    def small(cls, **kw) -> RandomNetConfig:
        return cls(**{"depth": (1, 5), "n_in": (1, 10), "n_out": (1, 10), "hidden": (1, 30),
                      "preset": "small", **kw})

    @classmethod
    def large(cls, **kw) -> RandomNetConfig:
        return cls(**{"depth": (5, 10), "n_in": (500, 1000), "n_out": (10, 50),
                      "hidden": (100, 200), "preset": "large", "count": 1000, **kw})

    @classmethod
    def from_preset(cls, preset: str, **kw) -> RandomNetConfig:
        if preset == "small":
            return cls.small(**kw)
        if preset == "large":
            return cls.large(**kw)
        if preset == "custom":
            return cls(**kw)
        raise ValueError(f"unknown preset {preset!r}")

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "depth": list(self.depth),
            "n_in": list(self.n_in),
            "n_out": list(self.n_out),
            "hidden": list(self.hidden),
            "activation": self.activation,
            "eps": self.eps,
            "count": self.count,
            "base_seed": self.base_seed,
        }


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; ``stream`` separates networks from input boxes."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), stream])))


def random_network(cfg: RandomNetConfig, seed: int) -> Network:
    """Draw dimensions uniformly from ``cfg`` and weights from a fan-in scaled uniform."""
    act = builtin(cfg.activation)
    rng = make_rng(seed, 0)
    L = int(rng.integers(cfg.depth[0], cfg.depth[1], endpoint=True))
    n0 = int(rng.integers(cfg.n_in[0], cfg.n_in[1], endpoint=True))
    nL = int(rng.integers(cfg.n_out[0], cfg.n_out[1], endpoint=True))
    hidden = rng.integers(cfg.hidden[0], cfg.hidden[1], size=L - 1, endpoint=True)
    dims = [n0, *(int(h) for h in hidden), nL]
    layers = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        W = rng.uniform(-1.0, 1.0, size=(fan_out, fan_in)) / np.sqrt(fan_in)
        b = rng.uniform(-0.5, 0.5, size=fan_out)
        layers.append(Layer(W, b, act))
    return Network(layers)


def random_input_box(net: Network, seed: int, eps: float = 0.1) -> IntervalVector:
    """Hypercube of radius ``eps`` around a center drawn uniformly from [-1, 1]^n0."""
    return IntervalVector.from_center(random_center(net.n_inputs, seed), eps)


def random_center(n: int, seed: int) -> np.ndarray:
    return make_rng(seed, 1).uniform(-1.0, 1.0, size=n)
