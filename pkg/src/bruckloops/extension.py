"""The loop of affine subspaces carried by translations along a transversal.

The carrier set is the orbit of a coordinate subspace W_i (the span of the
first p1 or last p2 basis vectors) under compositions of positive-definite
isometries with translations along a fixed transversal subspace.  Every
orbit subspace is identified by the pair

    (intersection point with the transversal,  direction at infinity)

and the direction is in turn carried by a canonical positive-definite lift,
so an element is stored as ``(w, rho)``.  Realizing an element re-creates
the subspace; the coordinate map ``omega`` inverts realization.

The orbit of W_1 at infinity consists of direction spans on which the
indefinite form stays positive definite (images of a positive-definite
subspace under isometries), which is what the sign checks in
``lift_from_infinity`` exploit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import (
    ConfigInvalid,
    DimensionMismatch,
    IsotropicPivot,
    NotInOrbit,
    RankAmbiguous,
    WitnessNotFound,
)
from .geometry import (
    AffineSubspace,
    Affinity,
    InfinityDirection,
    apply,
    at_infinity,
    linear_affinity,
    meet_point,
    projector,
    subspace,
    subspace_distance,
    transversality_check,
)
from .groups import (
    PhiElement,
    SampleStream,
    SigmaElement,
    SignatureForm,
    element_from_json,
    element_to_json,
    matrix_from_json,
    matrix_to_json,
    polar_factorize,
    sample_phi,
    sample_sigma,
    sigma_from_block,
)
from .kernel import Loop
from .linalg import COMPLEX, DEFAULT_TOL, Tolerance, dag, orthonormalize
from .matrixloop import MatrixLoop


def coordinate_subspace(form: SignatureForm, which: int) -> AffineSubspace:
    """W_1 = span of the first p1 basis vectors, W_2 = span of the last p2."""
    eye = np.eye(form.n, dtype=form.dtype)
    cols = eye[:, : form.p1] if which == 1 else eye[:, form.p1 :]
    return subspace(np.zeros(form.n, dtype=form.dtype), cols)


@dataclass(frozen=True, eq=False)
class ExtensionConfig:
    """Validated configuration: form, carrier index i, transversal subspace."""

    form: SignatureForm
    carrier: int
    wtilde: AffineSubspace
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def complement_index(self) -> int:
        return 2 if self.carrier == 1 else 1

    @property
    def carrier_dim(self) -> int:
        return self.form.p1 if self.carrier == 1 else self.form.p2

    @property
    def transversal_dim(self) -> int:
        return self.form.n - self.carrier_dim

    def carrier_subspace(self) -> AffineSubspace:
        return coordinate_subspace(self.form, self.carrier)

    def identity_element(self) -> "ExtensionElement":
        return ExtensionElement(
            np.zeros(self.form.n, dtype=self.form.dtype),
            SigmaElement(np.eye(self.form.n, dtype=self.form.dtype), self.form),
        )


def extension_config(
    form: SignatureForm,
    carrier: int = 1,
    wtilde: AffineSubspace | None = None,
    tol: Tolerance = DEFAULT_TOL,
    check_samples: int = 50,
    check_seed: int = 1,
) -> ExtensionConfig:
    """Build and validate a configuration.

    The transversal defaults to the complementary coordinate subspace.
    Any non-default transversal must pass through 0, have the right
    dimension, and survive a transversality check against a sample of the
    orbit at infinity; the checks run once here so the loop operations
    can trust the configuration.
    """
    if carrier not in (1, 2):
        raise ConfigInvalid(f"carrier index must be 1 or 2, got {carrier}")
    j = 2 if carrier == 1 else 1
    if wtilde is None:
        wtilde = coordinate_subspace(form, j)
    else:
        wtilde = geometry.canonical(wtilde, tol)
    pj = form.n - (form.p1 if carrier == 1 else form.p2)
    if wtilde.ambient != form.n or wtilde.dim != pj:
        raise ConfigInvalid(
            f"transversal must be a {pj}-dimensional subspace of F^{form.n}, "
            f"got dim {wtilde.dim} in F^{wtilde.ambient}"
        )
    if float(np.linalg.norm(wtilde.base)) > 10 * tol.tau_abs:
        raise ConfigInvalid("transversal must pass through 0")
    cfg = ExtensionConfig(form, carrier, wtilde, tol)
    stream = SampleStream(check_seed)
    # the identity is always in the orbit; sampling alone could miss the
    # degenerate transversals that only collide with specific members
    rhos = [SigmaElement(np.eye(form.n, dtype=form.dtype), form)]
    for _ in range(check_samples):
        rho, stream = sample_sigma(form, stream, tol=tol)
        rhos.append(rho)
    transversality_check(wtilde, rhos, cfg.carrier_subspace(), tol)
    return cfg


@dataclass(frozen=True, eq=False)
class ExtensionElement:
    """Coordinates (w, rho): the transversal intersection point and the
    canonical positive-definite lift of the direction at infinity."""

    w: np.ndarray
    rho: SigmaElement

    def to_json(self) -> dict:
        return {"w": matrix_to_json(self.w.reshape(1, -1))[0], "rho": element_to_json(self.rho)}


def extension_element_from_json(obj: dict) -> ExtensionElement:
    rho = element_from_json(obj["rho"])
    w = matrix_from_json([obj["w"]], rho.form.field)[0]
    return ExtensionElement(w, rho)


def element_affinity(e: ExtensionElement) -> Affinity:
    """The left-translation affinity carried by an element: the linear lift
    followed by the translation to its transversal point."""
    return Affinity(e.w, e.rho.matrix)


def realize(e: ExtensionElement, cfg: ExtensionConfig) -> AffineSubspace:
    """The orbit subspace encoded by an element: the image of the carrier
    under the linear lift, translated so its transversal intersection lands
    on w."""
    cols = e.rho.matrix[:, : cfg.form.p1] if cfg.carrier == 1 else e.rho.matrix[:, cfg.form.p1 :]
    through_zero = subspace(np.zeros(cfg.form.n, dtype=cfg.form.dtype), cols, cfg.tol)
    q = meet_point(through_zero, cfg.wtilde, cfg.tol)
    return subspace(e.w - q, through_zero.frame, cfg.tol)


def lift_from_infinity(z: InfinityDirection, cfg: ExtensionConfig) -> SigmaElement:
    """The unique positive-definite isometry whose carrier image has the
    given direction at infinity.

    The direction frame is orthonormalized against the form (its form
    norms must all match the carrier's sign), extended by a form-orthonormal
    basis of the form-orthogonal complement, and assembled into an isometry
    M whose carrier block spans z.  One complement column is rescaled by the
    unit scalar 1/det(M) to force determinant 1; this changes only the
    block-diagonal factor of M and never the positive factor, so the lift is
    well defined.  The positive factor of M is the answer, since the
    block-diagonal factor fixes the carrier coordinate subspace.
    """
    form = cfg.form
    if z.frame.shape[0] != form.n or z.dim != cfg.carrier_dim:
        raise DimensionMismatch(
            f"direction must be {cfg.carrier_dim}-dimensional in F^{form.n}"
        )
    j = form.j_matrix()
    want = 1.0 if cfg.carrier == 1 else -1.0
    try:
        basis, signs = orthonormalize(z.frame.astype(form.dtype), form=j, tol=cfg.tol)
    except IsotropicPivot as exc:
        raise NotInOrbit(f"direction is isotropic for the form: {exc}") from exc
    if np.any(signs != want):
        raise NotInOrbit("the form restricted to the direction has the wrong sign")
    # form-orthogonal complement: null space of basis* J
    u, sv, vh = np.linalg.svd(dag(basis) @ j)
    comp = dag(vh[z.dim :, :])
    try:
        comp_basis, comp_signs = orthonormalize(comp, form=j, tol=cfg.tol)
    except IsotropicPivot as exc:
        raise NotInOrbit(f"complement is isotropic for the form: {exc}") from exc
    if np.any(comp_signs != -want):
        raise NotInOrbit("the form-orthogonal complement has the wrong signature")
    if cfg.carrier == 1:
        m = np.hstack([basis, comp_basis])
        fix_col = form.n - 1
    else:
        m = np.hstack([comp_basis, basis])
        fix_col = form.p1 - 1
    det = np.linalg.det(m)
    m[:, fix_col] = m[:, fix_col] / det
    s1, _ = polar_factorize(m, form, tol=cfg.tol)
    return s1


def omega(s: AffineSubspace, cfg: ExtensionConfig) -> ExtensionElement:
    """Coordinates of an orbit subspace: the transversal intersection point
    and the lift of the direction at infinity."""
    w = meet_point(s, cfg.wtilde, cfg.tol)
    rho = lift_from_infinity(at_infinity(s), cfg)
    return ExtensionElement(w, rho)


def ext_mul(e1: ExtensionElement, e2: ExtensionElement, cfg: ExtensionConfig) -> ExtensionElement:
    """Coordinate multiplication.

    The direction part is the positive factor of the matrix product
    rho1 rho2 (which coincides with the matrix-loop product of the
    direction lifts); the point part translates the image of the second
    subspace under the first lift back to the transversal and shifts by
    w1."""
    s = e1.rho.matrix @ e2.rho.matrix
    rho3, _ = polar_factorize(s, cfg.form, tol=cfg.tol)
    image = apply(linear_affinity(e1.rho.matrix), realize(e2, cfg), cfg.tol)
    p = meet_point(image, cfg.wtilde, cfg.tol)
    return ExtensionElement(e1.w + p, rho3)


def solve_translation(
    d1: AffineSubspace, d2: AffineSubspace, cfg: ExtensionConfig
) -> tuple[np.ndarray, SigmaElement]:
    """The unique (translation along the transversal, positive isometry)
    pair mapping the first orbit subspace onto the second.

    The isometry is the right division of the direction lifts (the unique
    positive element whose loop product with the first lift gives the
    second); the translation then matches the transversal intersection
    points."""
    rho1 = lift_from_infinity(at_infinity(d1), cfg)
    rho2 = lift_from_infinity(at_infinity(d2), cfg)
    loop = MatrixLoop(cfg.form, cfg.tol)
    rho = loop.right_divide(rho2, rho1)
    moved = apply(linear_affinity(rho.matrix), d1, cfg.tol)
    t = meet_point(d2, cfg.wtilde, cfg.tol) - meet_point(moved, cfg.wtilde, cfg.tol)
    return t, rho


def ext_loop_interface(
    cfg: ExtensionConfig, sample_radius: float = 0.75, w_scale: float = 1.0
) -> Loop:
    """The loop interface on extension elements.

    Left division inverts the left-translation affinity of the divisor and
    reads the coordinates of the image; right division is the sharp
    transitivity solver.  The sampler draws a uniform point of the
    transversal and a random positive isometry.
    """
    form = cfg.form

    def mul(a, b):
        return ext_mul(a, b, cfg)

    def left_divide(a, c):
        image = apply(element_affinity(a).inverse(), realize(c, cfg), cfg.tol)
        return omega(image, cfg)

    def right_divide(c, a):
        t, rho = solve_translation(realize(a, cfg), realize(c, cfg), cfg)
        return ExtensionElement(t, rho)

    def distance(a, b):
        return subspace_distance(realize(a, cfg), realize(b, cfg))

    def sample(stream: SampleStream):
        k = cfg.wtilde.dim
        if form.field == COMPLEX:
            vals, stream = stream.next_uniforms(2 * k, -w_scale, w_scale)
            coef = vals[0::2] + 1j * vals[1::2]
        else:
            vals, stream = stream.next_uniforms(k, -w_scale, w_scale)
            coef = vals
        w = cfg.wtilde.frame @ coef.astype(form.dtype)
        rho, stream = sample_sigma(form, stream, sample_radius, cfg.tol)
        return ExtensionElement(w, rho), stream

    return Loop(
        mul=mul,
        left_divide=left_divide,
        right_divide=right_divide,
        identity=cfg.identity_element(),
        distance=distance,
        sample=sample,
    )


@dataclass(frozen=True)
class WitnessReport:
    element: PhiElement
    displacement: float
    samples_used: int


def nonisomorphism_witness(
    cfg: ExtensionConfig,
    stream: SampleStream | None = None,
    budget: int = 100,
    threshold: float = 1e-3,
) -> WitnessReport:
    """Search for a block-diagonal unitary that moves the transversal.

    Such an element conjugates translations along the transversal to
    translations along a genuinely different subspace, so the left
    translation set is not normalized and the loop cannot be isomorphic to
    the one built on the coordinate transversal.  Requires the transversal
    to differ from the coordinate one; the coordinate subspaces are
    invariant under every block-diagonal unitary, so no witness exists
    there.
    """
    w_standard = coordinate_subspace(cfg.form, cfg.complement_index)
    if subspace_distance(cfg.wtilde, w_standard) <= threshold:
        raise ConfigInvalid(
            "transversal coincides with the coordinate subspace; every "
            "block-diagonal unitary stabilizes it"
        )
    if stream is None:
        stream = SampleStream(1)
    for used in range(1, budget + 1):
        g, stream = sample_phi(cfg.form, stream)
        moved = apply(linear_affinity(g.matrix), cfg.wtilde, cfg.tol)
        disp = subspace_distance(moved, cfg.wtilde)
        if disp > threshold:
            return WitnessReport(g, disp, used)
    raise WitnessNotFound(f"no displacement above {threshold:g} in {budget} samples")


# ---------------------------------------------------------------------------
# Dimension of the carrier manifold by numeric rank of the coordinate chart.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionReport:
    rank: int
    ranks: tuple
    gap_fraction: float
    points: int


def expected_dimension(cfg: ExtensionConfig) -> int:
    eps = 2 if cfg.form.field == COMPLEX else 1
    return eps * (cfg.transversal_dim + cfg.form.p1 * cfg.form.p2)


def _element_from_chart(cfg: ExtensionConfig, theta: np.ndarray) -> ExtensionElement:
    form = cfg.form
    k = cfg.wtilde.dim
    if form.field == COMPLEX:
        wc = theta[: 2 * k]
        coef = wc[0::2] + 1j * wc[1::2]
        xc = theta[2 * k :]
        x = (xc[0::2] + 1j * xc[1::2]).reshape(form.p1, form.p2)
    else:
        coef = theta[:k]
        x = theta[k:].reshape(form.p1, form.p2)
    w = cfg.wtilde.frame @ coef.astype(form.dtype)
    return ExtensionElement(w, sigma_from_block(form, x.astype(form.dtype), cfg.tol))


def _embed(cfg: ExtensionConfig, e: ExtensionElement) -> np.ndarray:
    s = realize(e, cfg)
    p = projector(s.frame, cfg.form.n)
    if cfg.form.field == COMPLEX:
        return np.concatenate(
            [p.real.ravel(), p.imag.ravel(), s.base.real, s.base.imag]
        )
    return np.concatenate([p.ravel(), s.base])


def dimension_rank_report(
    cfg: ExtensionConfig,
    points: int = 20,
    stream: SampleStream | None = None,
    step: float = 1e-5,
    gap: float = 1e-4,
    ambiguity_fraction: float = 0.10,
) -> DimensionReport:
    """Estimate the manifold dimension of the carrier set.

    The chart (transversal coordinates) x (exponential block) is pushed
    through realization into the projector-plus-base embedding; the real
    rank of a central finite-difference Jacobian is estimated at sampled
    chart points.  A point's rank counts the singular values at or above
    ``gap`` relative to the largest; the point is trustworthy only when
    kept and discarded values are separated by at least ``gap``.  The modal
    rank is returned; if more than ``ambiguity_fraction`` of the points
    lack the gap the estimate is refused.
    """
    if stream is None:
        stream = SampleStream(1)
    d = expected_dimension(cfg)
    ranks = []
    ok = 0
    for _ in range(points):
        theta, stream = stream.next_uniforms(d, -0.4, 0.4)
        cols = []
        for idx in range(d):
            hi = theta.copy()
            hi[idx] += step
            lo = theta.copy()
            lo[idx] -= step
            cols.append(
                (_embed(cfg, _element_from_chart(cfg, hi)) - _embed(cfg, _element_from_chart(cfg, lo)))
                / (2 * step)
            )
        jac = np.column_stack(cols)
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv.size == 0 or sv[0] == 0.0:
            ranks.append(0)
            continue
        sn = sv / sv[0]
        kept = sn[sn >= gap]
        dropped = sn[sn < gap]
        rank = int(kept.size)
        margin = float(kept[-1] - (dropped[0] if dropped.size else 0.0)) if kept.size else 0.0
        if margin >= gap:
            ok += 1
        ranks.append(rank)
    gap_fraction = ok / points if points else 0.0
    if gap_fraction < 1.0 - ambiguity_fraction:
        raise RankAmbiguous(
            f"singular-value gap present at only {gap_fraction:.0%} of {points} points"
        )
    modal = Counter(ranks).most_common(1)[0][0]
    return DimensionReport(modal, tuple(ranks), gap_fraction, points)


def dimension_rank_check(
    cfg: ExtensionConfig, points: int = 20, stream: SampleStream | None = None
) -> int:
    return dimension_rank_report(cfg, points, stream).rank
