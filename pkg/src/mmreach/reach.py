"""Mixed-monotonicity reachability over all partial networks, plus plain IBP.

``reach_mm`` walks the network layer by layer.  At layer ``l`` it bounds the
activation derivative on the pre-activation box, extends the Jacobian bounds
of every partial network ``(k, l-1)`` by one layer, applies the
mixed-monotonicity bound of :func:`mm_bound` to each partial network
``(k, l)`` with input box ``x_{k-1}``, and intersects the ``l`` resulting
boxes.  The cost is quadratic in depth: ``L (L + 1) / 2`` bound computations.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import DimensionMismatch
from .interval import (
    IntervalMatrix,
    IntervalVector,
    _affine_bounds,
    _matmul_bounds,
    _row_scale_bounds,
    iv_intersect,
    iv_width_2norm,
)
from .network import Network

# Jacobian bounds of a partial network are an interval matrix; J* is its .center
JacobianBounds = IntervalMatrix


@dataclass
class ReachResult:
    method: str
    input_box: IntervalVector
    per_layer: list[IntervalVector]
    per_pair: dict[tuple[int, int], IntervalVector] | None = None
    elapsed: float = 0.0
    eval_count: int = 0
    raw_eval_count: int = 0
    pair_count: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def output(self) -> IntervalVector:
        return self.per_layer[-1]

    @property
    def width(self) -> float:
        return iv_width_2norm(self.output)

    def to_dict(self, keep_partial: bool = True) -> dict:
        doc = {
            "method": self.method,
            "output": self.output.to_dict(),
            "width": self.width,
            "per_layer": [b.to_dict() for b in self.per_layer],
            "eval_count": self.eval_count,
            "raw_eval_count": self.raw_eval_count,
            "pair_count": self.pair_count,
            "elapsed": self.elapsed,
        }
        if keep_partial and self.per_pair is not None:
            doc["per_pair"] = [
                {"k": k, "l": l, **b.to_dict()} for (k, l), b in sorted(self.per_pair.items())
            ]
        return doc


def _mm_bounds(f, xlo, xhi, Jlo, Jhi):
    """Array-level mixed-monotonicity bound; returns ``(lo, hi, n_evaluations)``."""
    pos = (0.5 * (Jlo + Jhi)) >= 0.0
    w = xhi - xlo
    # alpha * (xi_lower - xi_upper), always >= 0
    slack = np.where(pos, -np.minimum(Jlo, 0.0), np.maximum(Jhi, 0.0)) @ w
    patterns, inverse = np.unique(pos, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    u = patterns.shape[0]
    corners = np.empty((2 * u, xlo.shape[0]))
    corners[:u] = np.where(patterns, xlo, xhi)
    corners[u:] = np.where(patterns, xhi, xlo)
    values = np.asarray(f(corners), dtype=float)
    rows = np.arange(pos.shape[0])
    lo = values[inverse, rows] - slack
    hi = values[u + inverse, rows] + slack
    return lo, hi, 2 * u


def mm_bound(f, box: IntervalVector, J: IntervalMatrix) -> IntervalVector:
    """Bound ``f`` over ``box`` given Jacobian bounds ``J`` valid on the box.

    ``f`` maps a batch of inputs (one per row) to a batch of outputs.  For each
    output ``i`` it is evaluated at two opposite corners chosen from the sign
    of the center of ``J[i]``; entries of ``J[i]`` whose bounds straddle zero
    widen the result.  Outputs sharing a sign pattern share corners.
    """
    if J.cols != box.dim:
        raise DimensionMismatch(f"Jacobian bounds {J.shape} do not match a box of dim {box.dim}")
    lo, hi, _ = _mm_bounds(f, box.lo, box.hi, J.lo, J.hi)
    if lo.shape != (J.rows,):
        raise DimensionMismatch(f"function returned {lo.shape[0]} outputs, Jacobian has {J.rows} rows")
    return IntervalVector(lo, hi)


def jacobian_update(dphi_bounds: IntervalVector, W, prev: IntervalMatrix | None = None) -> IntervalMatrix:
    """Extend Jacobian bounds by one layer: ``[dphi] * W * prev``.

    ``prev=None`` stands for the identity (partial network of a single layer).
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != dphi_bounds.dim:
        raise DimensionMismatch(f"weights {W.shape} vs derivative bounds of dim {dphi_bounds.dim}")
    lo, hi = _row_scale_bounds(dphi_bounds.lo, dphi_bounds.hi, W)
    if prev is None:
        return IntervalMatrix(lo, hi, check=False)
    if prev.rows != W.shape[1]:
        raise DimensionMismatch(f"weights {W.shape} cannot follow Jacobian bounds {prev.shape}")
    return IntervalMatrix(*_matmul_bounds(lo, hi, prev.lo, prev.hi), check=False)


def _check_input(net: Network, box: IntervalVector):
    if box.dim != net.n_inputs:
        raise DimensionMismatch(f"input box has dim {box.dim}, network expects {net.n_inputs}")


def reach_mm(
    net: Network,
    box: IntervalVector,
    *,
    keep_partial: bool = False,
    workers: int | None = None,
    derivative_boxes: str = "pair",
) -> ReachResult:
    """Mixed-monotonicity over-approximation of every layer's output.

    The Jacobian bounds of a partial network ``(k, l)`` must hold on the whole
    input box ``x_{k-1}``, whose image through layers ``k..l-1`` is enclosed by
    the pair's own box ``x(k, l-1)`` but not by the intersected layer box
    ``x_{l-1}``.  ``derivative_boxes="pair"`` (default) therefore bounds the
    layer-``l`` derivative of pair ``k`` on ``x(k, l-1)``.  ``"layer"`` reuses
    the intersected box for every ``k``; it is cheaper and tighter but can
    produce invalid Jacobian bounds, hence unsound or empty boxes.

    With ``workers > 1`` the bounds of the partial networks ending at a
    given layer are computed in a thread pool; results are identical to the
    sequential run because each task is pure and the intersection is reduced
    in a fixed order.
    """
    if derivative_boxes not in ("pair", "layer"):
        raise ValueError(f"derivative_boxes must be 'pair' or 'layer', got {derivative_boxes!r}")
    _check_input(net, box)
    start = time.perf_counter()
    boxes = [(box.lo, box.hi)]
    per_layer = []
    per_pair = {} if keep_partial else None
    jacobians = {}
    jac = {}
    evals = raw = pairs = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers and workers > 1 else None

    try:
        for l, layer in enumerate(net.layers, start=1):
            pre_lo, pre_hi = _affine_bounds(layer.W, layer.b, *boxes[l - 1])
            dlo, dhi = layer.dphi_bounds(pre_lo, pre_hi)
            head = _row_scale_bounds(dlo, dhi, layer.W)

            def bound_pair(k, l=l, layer=layer, head=head):
                if k == l:
                    J = head
                else:
                    prev_J, prev_box = jac[k]
                    if derivative_boxes == "pair":
                        plo, phi = _affine_bounds(layer.W, layer.b, *prev_box)
                        J = _row_scale_bounds(*layer.dphi_bounds(plo, phi), layer.W)
                    else:
                        J = head
                    J = _matmul_bounds(*J, *prev_J)
                f = partial(net.forward, k=k, l=l)
                return (J, *_mm_bounds(f, *boxes[k - 1], *J))

            ks = range(1, l + 1)
            results = list(pool.map(bound_pair, ks)) if pool else [bound_pair(k) for k in ks]

            acc = None
            for k, (J, lo, hi, n) in zip(ks, results):
                candidate = IntervalVector(lo, hi, check=False)
                acc = candidate if acc is None else iv_intersect(acc, candidate)
                if per_pair is not None:
                    per_pair[(k, l)] = candidate
                    jacobians[(k, l)] = IntervalMatrix(*J, check=False)
                evals += n
                raw += 2 * layer.n_out
                pairs += 1
            # only J(k, l) and x(k, l) are needed at the next layer
            jac = {k: (r[0], (r[1], r[2])) for k, r in zip(ks, results)}
            per_layer.append(acc)
            boxes.append((acc.lo, acc.hi))
    finally:
        if pool:
            pool.shutdown()

    return ReachResult(
        method="mm",
        input_box=box,
        per_layer=per_layer,
        per_pair=per_pair,
        elapsed=time.perf_counter() - start,
        eval_count=evals,
        raw_eval_count=raw,
        pair_count=pairs,
        extra={"jacobians": jacobians} if keep_partial else {},
    )


def reach_ibp(net: Network, box: IntervalVector) -> ReachResult:
    """Naive interval bound propagation; exact activation ranges per node."""
    _check_input(net, box)
    start = time.perf_counter()
    lo, hi = box.lo, box.hi
    per_layer = []
    for layer in net.layers:
        pre_lo, pre_hi = _affine_bounds(layer.W, layer.b, lo, hi)
        lo, hi = layer.phi_bounds(pre_lo, pre_hi)
        per_layer.append(IntervalVector(lo, hi, check=False))
    return ReachResult(
        method="ibp", input_box=box, per_layer=per_layer, elapsed=time.perf_counter() - start
    )


METHODS = {"mm": reach_mm, "ibp": reach_ibp}


def reach(net: Network, box: IntervalVector, method: str = "mm", **kw) -> ReachResult:
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(METHODS)}") from None
    return fn(net, box, **kw) if method == "mm" else fn(net, box)


# --- fixed decompositions -------------------------------------------------------


def decompositions(depth: int):
    """Yield every split of layers ``1..depth`` into consecutive ``(k, l)`` segments."""
    for cuts in itertools.product((False, True), repeat=depth - 1):
        segments, k = [], 1
        for i, cut in enumerate(cuts, start=1):
            if cut:
                segments.append((k, i))
                k = i + 1
        segments.append((k, depth))
        yield segments


def reach_segments(net: Network, box: IntervalVector, segments) -> IntervalVector:
    """Output box from chaining the mixed-monotonicity bound over fixed segments.

    Each segment ``(k, l)`` is bounded as a single partial network whose input
    is the previous segment's output box.  Derivative bounds inside a segment
    come from the bounds of its own prefixes ``(k, m)``, so no partial network
    crossing a segment boundary is ever used.
    """
    _check_input(net, box)
    expected = 1
    lo, hi = box.lo, box.hi
    for k, l in segments:
        if k != expected or l < k:
            raise ValueError(f"segments {segments} are not a consecutive split")
        expected = l + 1
        seg_in = (lo, hi)
        J = None
        for m in range(k, l + 1):
            layer = net.layers[m - 1]
            pre_lo, pre_hi = _affine_bounds(layer.W, layer.b, lo, hi)
            dlo, dhi = layer.dphi_bounds(pre_lo, pre_hi)
            head = _row_scale_bounds(dlo, dhi, layer.W)
            J = head if J is None else _matmul_bounds(*head, *J)
            f = partial(net.forward, k=k, l=m)
            lo, hi, _ = _mm_bounds(f, *seg_in, *J)
    if expected != net.depth + 1:
        raise ValueError(f"segments {segments} do not cover {net.depth} layers")
    return IntervalVector(lo, hi, check=False)
