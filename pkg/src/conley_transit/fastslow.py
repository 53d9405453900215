"""Fast-slow assembly on the doubled poset and singular transition matrices.

The slow drift turns two one-parameter connection matrices into a single
boundary map on the doubled index set: minus copies first, suspended plus
copies above, and the corner block coupling them.  Square-zero of the
assembly is exactly the compatibility equation d- T + T d+^S = 0, and the
corner is a degree-1 transition matrix between the suspended plus braid
and the minus braid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .braid import (BraidMorphism, HomologyBraid, build_homology_braid,
                    induced_braid_morphism, verify_braid_morphism)
from .errors import IncompatibleBlock, NotValid, ShapeMismatch
from .fields import FieldSpec
from .graded import BlockGradedMap, GradedMap, GradedSpace
from .posets import Poset, close_and_validate, doubled_poset


@dataclass(frozen=True)
class SuspensionData:
    """Per-element degree -1 identification of C+(p) with its shifted copy.

    ``style`` tags which suspension convention produced the data: the
    drift-flow identification ("psi") or the index suspension ("sigma");
    the matrix algebra is identical, only the covered isomorphism differs.
    """

    maps: tuple[GradedMap, ...]
    style: str = "sigma"

    def __post_init__(self):
        for p, gm in enumerate(self.maps):
            if gm.degree != -1:
                raise ShapeMismatch(f"suspension at element {p} must have degree -1")
            if not gm.is_isomorphism():
                raise ShapeMismatch(f"suspension at element {p} is not invertible")

    @classmethod
    def identity_shift(cls, fld: FieldSpec, spaces: Sequence[GradedSpace],
                       style: str = "sigma") -> "SuspensionData":
        maps = []
        for s in spaces:
            target = s.shift(1)
            blocks = {k: _identity_block(fld, d) for k, d in s.dims}
            maps.append(GradedMap.build(fld, s, target, -1, blocks))
        return cls(tuple(maps), style)

    def suspended_spaces(self) -> tuple[GradedSpace, ...]:
        return tuple(gm.target for gm in self.maps)

    def as_block_map(self, fld: FieldSpec, poset: Poset) -> BlockGradedMap:
        sources = tuple(gm.source for gm in self.maps)
        return BlockGradedMap.build(fld, poset, sources, self.suspended_spaces(), -1,
                                    {(p, p): gm for p, gm in enumerate(self.maps)})


def _identity_block(fld, d):
    from .matrices import Matrix
    return Matrix.identity(fld, d)


def suspend_conjugate(delta: BlockGradedMap, sigma: SuspensionData) -> BlockGradedMap:
    """Conjugated boundary on the shifted spaces: S(q) d(q,p) S(p)^{-1}."""
    if len(sigma.maps) != delta.poset.n:
        raise ShapeMismatch("suspension data does not match the poset")
    sus = sigma.suspended_spaces()
    entries = {}
    for (q, p), gm in delta.entries:
        entries[(q, p)] = sigma.maps[q].compose(gm).compose(sigma.maps[p].inverse())
    return BlockGradedMap.build(delta.field, delta.poset, sus, sus, 1, entries)


@dataclass(frozen=True)
class FastSlowAssembly:
    """The doubled-poset boundary map and the data it was built from."""

    doubled: Poset
    base_order: Poset
    delta_eps: BlockGradedMap
    delta_minus: BlockGradedMap
    delta_plus: BlockGradedMap
    delta_plus_sus: BlockGradedMap
    sigma: SuspensionData
    t_corner: BlockGradedMap

    @property
    def field(self) -> FieldSpec:
        return self.delta_eps.field

    @property
    def n(self) -> int:
        return self.delta_minus.poset.n

    def minus_interval(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    def plus_interval(self) -> tuple[int, ...]:
        return tuple(range(self.n, 2 * self.n))


def fastslow_residual(delta_minus: BlockGradedMap, delta_plus_sus: BlockGradedMap,
                      t_corner: BlockGradedMap) -> BlockGradedMap:
    """d- T + T d+^S: the corner of the assembled square."""
    return delta_minus.compose(t_corner).add(t_corner.compose(delta_plus_sus))


def assemble_fastslow(delta_minus: BlockGradedMap, delta_plus: BlockGradedMap,
                      sigma: SuspensionData, t_corner: BlockGradedMap) -> FastSlowAssembly:
    """Assemble [[d-, T], [0, d+^S]] on the doubled poset.

    ``t_corner`` is the degree-1 corner from the suspended plus summands
    into the minus summands.  Raises IncompatibleBlock with the residual
    attached when square-zero fails.
    """
    fld = delta_minus.field
    n = delta_minus.poset.n
    if delta_plus.poset.n != n:
        raise ShapeMismatch("the two sides index different element sets")
    delta_plus_sus = suspend_conjugate(delta_plus, sigma)
    if t_corner.degree != 1:
        raise ShapeMismatch("corner block must have degree 1")
    if t_corner.source != delta_plus_sus.source or t_corner.target != delta_minus.source:
        raise ShapeMismatch("corner block spaces do not match the two sides")
    residual = fastslow_residual(delta_minus, delta_plus_sus, t_corner)
    if not residual.is_zero():
        raise IncompatibleBlock("square-zero fails: d- T + T d+^S != 0", residual)

    doubled = doubled_poset(delta_minus.poset, delta_minus.poset, delta_plus.poset)
    base_order = close_and_validate(
        sorted(set(delta_minus.poset.lt) | set(delta_plus.poset.lt)), n,
        delta_minus.poset.labels)
    spaces = tuple(delta_minus.source) + delta_plus_sus.source
    entries = {}
    for (q, p), gm in delta_minus.entries:
        entries[(q, p)] = gm
    for (q, p), gm in delta_plus_sus.entries:
        entries[(n + q, n + p)] = gm
    for (q, p), gm in t_corner.entries:
        entries[(q, n + p)] = gm
    delta_eps = BlockGradedMap.build(fld, doubled, spaces, spaces, 1, entries)
    return FastSlowAssembly(doubled, base_order, delta_eps, delta_minus, delta_plus,
                            delta_plus_sus, sigma, t_corner)


@dataclass(frozen=True)
class SingularCertificate:
    """Verification record for an extracted singular transition matrix."""

    t_singular: BlockGradedMap
    suspension_style: str
    compatibility: bool
    chain_isomorphism: bool
    upper_triangular: bool
    connecting_iso_by_rank: bool
    connecting_iso_by_les: bool
    delta_morphism: BraidMorphism | None

    @property
    def connecting_isomorphism(self) -> bool:
        return self.connecting_iso_by_rank

    @property
    def sides_agree(self) -> bool:
        return self.connecting_iso_by_rank == self.connecting_iso_by_les

    def to_json(self):
        return {"compatibility": self.compatibility,
                "chain_isomorphism": self.chain_isomorphism,
                "upper_triangular": self.upper_triangular,
                "connecting_iso_by_rank": self.connecting_iso_by_rank,
                "connecting_iso_by_les": self.connecting_iso_by_les,
                "sides_agree": self.sides_agree,
                "suspension_style": self.suspension_style}


def extract_singular(assembly: FastSlowAssembly,
                     reference_order: Poset | None = None
                     ) -> tuple[BlockGradedMap, SingularCertificate]:
    """The corner block as a degree-1 transition matrix, with its checks.

    The connecting-isomorphism flag is computed two independent ways:
    total homology of the assembled complex vanishing (rank route) and
    invertibility of the attractor-repeller connecting map (exact
    sequence route).
    """
    ref = reference_order or assembly.base_order
    fld = assembly.field
    t_base = _rebase(assembly.t_corner, ref)
    compatibility = fastslow_residual(assembly.delta_minus, assembly.delta_plus_sus,
                                      assembly.t_corner).is_zero()
    flat = t_base.to_graded_map()
    chain_iso = flat.is_isomorphism()
    triangular = t_base.is_upper_triangular()

    doubled_braid = build_homology_braid(assembly.delta_eps)
    total = tuple(range(2 * assembly.n))
    rank_route = doubled_braid.space(total).is_zero()
    pair = (assembly.minus_interval(), assembly.plus_interval())
    connect = doubled_braid.braid.pair(*pair).connect
    les_route = connect.is_isomorphism()

    delta_morphism = None
    if triangular:
        minus_braid = build_homology_braid(_rebase(assembly.delta_minus, ref))
        plus_sus_braid = build_homology_braid(_rebase(assembly.delta_plus_sus, ref))
        delta_morphism = induced_braid_morphism(t_base, plus_sus_braid, minus_braid)
    cert = SingularCertificate(t_base, assembly.sigma.style, compatibility, chain_iso,
                               triangular, rank_route, les_route, delta_morphism)
    return t_base, cert


def _rebase(block_map: BlockGradedMap, poset: Poset) -> BlockGradedMap:
    """Same entries, re-indexed by another order on the same elements."""
    return BlockGradedMap.build(block_map.field, poset, block_map.source,
                                block_map.target, block_map.degree, dict(block_map.entries))


def compose_with_suspension(t_singular: BlockGradedMap, sigma: SuspensionData
                            ) -> BlockGradedMap:
    """Degree-0 transition matrix T = T_s o (sum of Sigma(p))."""
    sigma_block = sigma.as_block_map(t_singular.field, t_singular.poset)
    if sigma_block.target != t_singular.source:
        raise ShapeMismatch("suspension does not feed the singular matrix")
    return t_singular.compose(sigma_block)


def singular_cover_data(assembly: FastSlowAssembly,
                        flow_morphism: BraidMorphism | None = None):
    """Braids and morphisms for the degree-0 covering of the composed map.

    Returns (T, plus_braid, minus_braid, theta) over the base order,
    where theta is the supplied flow-defined morphism or the canonical
    composite of the suspension identification with the connecting-map
    morphism of the assembly.
    """
    ref = assembly.base_order
    t_base, cert = extract_singular(assembly)
    if cert.delta_morphism is None:
        raise NotValid("corner is not triangular over the base order")
    hb_plus = build_homology_braid(_rebase(assembly.delta_plus, ref))
    hb_plus_sus = build_homology_braid(_rebase(assembly.delta_plus_sus, ref))
    hb_minus = build_homology_braid(_rebase(assembly.delta_minus, ref))
    sigma_block = _rebase(assembly.sigma.as_block_map(assembly.field,
                                                      assembly.delta_minus.poset), ref)
    sigma_star = induced_braid_morphism(sigma_block, hb_plus, hb_plus_sus)
    theta = flow_morphism or cert.delta_morphism.compose(sigma_star)
    T = compose_with_suspension(t_base, assembly.sigma)
    return T, hb_plus, hb_minus, theta
