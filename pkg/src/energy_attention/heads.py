"""Attention heads: closed-form linear head and iterative non-linear heads.

A head projects tokens, forms the attention context, and produces a state
matrix Z. The linear head returns Z = AV directly. Non-linear heads start
the descent at Z0 = AV, which is already stationary for every form, so the
unperturbed run converges at iteration 0; setting ``perturb_sigma`` > 0
adds seeded Gaussian noise to Z0 to make the dynamics observable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attention import AttentionContext, ProjectionWeights, build_context
from .dynamics import DescentConfig, DescentTrace, descend
from .energy import EnergyForm, linear_energy
from .linalg import ShapeError
from .rng import GaussianStream

__all__ = ["HeadSpec", "HeadOutput", "linear_head", "nonlinear_head", "run_head", "multi_head"]


@dataclass(frozen=True)
class HeadSpec:
    d: int
    d_k: int
    d_v: int
    form: EnergyForm
    descent: DescentConfig = field(default_factory=DescentConfig)
    perturb_sigma: float = 0.0
    perturb_seed: int = 0

    def __post_init__(self):
        for name in ("d", "d_k", "d_v"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.perturb_sigma < 0:
            raise ValueError(f"perturb_sigma must be >= 0, got {self.perturb_sigma}")


@dataclass(frozen=True)
class HeadOutput:
    z: np.ndarray
    trace: DescentTrace
    context: AttentionContext


def _check_head_input(x: np.ndarray, w: ProjectionWeights, spec: HeadSpec):
    if x.shape[1] != spec.d:
        raise ShapeError(f"tokens {x.shape} do not match head embedding dim d={spec.d}")
    if w.d != spec.d or w.d_k != spec.d_k or w.d_v != spec.d_v:
        raise ShapeError(
            f"weights (d={w.d}, d_k={w.d_k}, d_v={w.d_v}) do not match head spec "
            f"(d={spec.d}, d_k={spec.d_k}, d_v={spec.d_v})"
        )


def linear_head(x: np.ndarray, w: ProjectionWeights, spec: HeadSpec) -> HeadOutput:
    """Closed-form head: Z = AV, no descent iterations."""
    if spec.form.kind != "linear":
        raise ValueError(f"linear_head requires the linear form, got {spec.form.label}")
    _check_head_input(x, w, spec)
    ctx = build_context(x, w, spec.d_k)
    z = ctx.av
    trace = DescentTrace(
        energies=(linear_energy(z, ctx.a, ctx.v),),
        grad_norms=(0.0,),
        iters=0,
        converged=True,
    )
    return HeadOutput(z=z, trace=trace, context=ctx)


def nonlinear_head(x: np.ndarray, w: ProjectionWeights, spec: HeadSpec) -> HeadOutput:
    """Iterative head: descend the regularized energy from Z0 = AV (+ noise)."""
    if spec.form.kind == "linear":
        return linear_head(x, w, spec)
    _check_head_input(x, w, spec)
    ctx = build_context(x, w, spec.d_k)
    z0 = ctx.av
    if spec.perturb_sigma > 0.0:
        noise = GaussianStream(spec.perturb_seed).matrix(ctx.n, spec.d_v)
        z0 = ctx.av + spec.perturb_sigma * noise
    z, trace = descend(spec.form, ctx, z0, spec.descent)
    return HeadOutput(z=z, trace=trace, context=ctx)


def run_head(x: np.ndarray, w: ProjectionWeights, spec: HeadSpec) -> HeadOutput:
    """Dispatch on the head's energy form."""
    if spec.form.kind == "linear":
        return linear_head(x, w, spec)
    return nonlinear_head(x, w, spec)


def multi_head(x: np.ndarray, heads) -> np.ndarray:
    """Concatenate independent head outputs along the feature axis.

    ``heads`` is a sequence of (ProjectionWeights, HeadSpec) pairs that all
    share the token matrix and its embedding dimension.
    """
    heads = list(heads)
    if not heads:
        raise ValueError("multi_head requires at least one head")
    for w, spec in heads:
        if spec.d != x.shape[1]:
            raise ShapeError(
                f"head expects d={spec.d} but tokens are {x.shape}; "
                "all heads must share the input embedding dimension"
            )
    outputs = [run_head(x, w, spec).z for w, spec in heads]
    return np.concatenate(outputs, axis=1)
