"""Homology braids generated by a poset-graded boundary map.

For every interval I the restricted complex (sum of C(p) for p in I,
restricted boundary) gets a canonical homology presentation; every
adjacent pair (I,J) gets inclusion/projection/connecting maps whose long
exact sequence is certified by exact rank identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ExactnessFailure, MissingInterval, ShapeMismatch
from .fields import FieldSpec
from .graded import BlockGradedMap, GradedMap, GradedSpace, sum_spaces
from .homology import ChainComplex, HomologyPresentation, homology, induced_map, is_chain_map
from .matrices import Matrix
from .posets import Interval, Poset, union_interval


@dataclass(frozen=True)
class PairMaps:
    """The three maps of an adjacent pair (I, J): H(I) -> H(IJ) -> H(J) -> H(I)."""

    incl: GradedMap
    proj: GradedMap
    connect: GradedMap


@dataclass(frozen=True)
class ModuleBraid:
    """Graded spaces per interval plus i/p/connecting maps per adjacent pair.

    This is plain data: it may be generated from a boundary map or supplied
    abstractly, and it can be tampered with for negative controls.
    """

    poset: Poset
    field: FieldSpec
    spaces: tuple[tuple[Interval, GradedSpace], ...]
    pairs: tuple[tuple[tuple[Interval, Interval], PairMaps], ...]

    @classmethod
    def build(cls, poset: Poset, field: FieldSpec, spaces: Mapping[Interval, GradedSpace],
              pairs: Mapping[tuple[Interval, Interval], PairMaps]) -> "ModuleBraid":
        for I in poset.intervals():
            if I not in spaces:
                raise MissingInterval(f"no space for interval {I}")
        for (I, J) in poset.adjacent_pairs():
            if (I, J) not in pairs:
                raise MissingInterval(f"no pair maps for {(I, J)}")
        return cls(poset, field, tuple(sorted(spaces.items())), tuple(sorted(pairs.items())))

    def space(self, I: Interval) -> GradedSpace:
        for key, s in self.spaces:
            if key == I:
                return s
        raise MissingInterval(f"interval {I} not in braid")

    def pair(self, I: Interval, J: Interval) -> PairMaps:
        for key, pm in self.pairs:
            if key == (I, J):
                return pm
        raise MissingInterval(f"pair {(I, J)} not in braid")

    def with_pair(self, I: Interval, J: Interval, pm: PairMaps) -> "ModuleBraid":
        """Copy with one pair replaced (used by negative controls)."""
        out = dict(self.pairs)
        out[(I, J)] = pm
        return ModuleBraid(self.poset, self.field, self.spaces, tuple(sorted(out.items())))


@dataclass(frozen=True)
class HomologyBraid:
    """ModuleBraid generated by a boundary map, with its presentations."""

    braid: ModuleBraid
    delta: BlockGradedMap
    presentations: tuple[tuple[Interval, HomologyPresentation], ...]

    @property
    def poset(self) -> Poset:
        return self.braid.poset

    @property
    def field(self) -> FieldSpec:
        return self.delta.field

    def presentation(self, I: Interval) -> HomologyPresentation:
        for key, pres in self.presentations:
            if key == I:
                return pres
        raise MissingInterval(f"interval {I} not in braid")

    def space(self, I: Interval) -> GradedSpace:
        return self.braid.space(I)


def restrict(delta: BlockGradedMap, I: Interval) -> ChainComplex:
    """The complex (sum of C(p) over I, delta restricted to I)."""
    return ChainComplex.build(delta.space_of(I, "source"),
                              delta.restrict(I).to_graded_map(I))


def interval_inclusion_chain(delta: BlockGradedMap, I: Interval, IJ: Interval) -> GradedMap:
    """Chain-level inclusion of summands C(I) -> C(IJ)."""
    fld = delta.field
    src = delta.space_of(I, "source")
    tgt = delta.space_of(IJ, "source")
    blocks = {}
    for k in src.degrees():
        rows, cols = tgt.dim(k), src.dim(k)
        if not rows or not cols:
            continue
        grid = [[fld.zero] * cols for _ in range(rows)]
        src_off = delta.offsets(I, k, "source")
        tgt_off = delta.offsets(IJ, k, "source")
        for p in I:
            for i in range(delta.source[p].dim(k)):
                grid[tgt_off[p] + i][src_off[p] + i] = fld.one
        blocks[k] = Matrix(fld, rows, cols, tuple(tuple(r) for r in grid))
    return GradedMap.build(fld, src, tgt, 0, blocks)


def interval_projection_chain(delta: BlockGradedMap, IJ: Interval, J: Interval) -> GradedMap:
    """Chain-level projection C(IJ) -> C(J)."""
    fld = delta.field
    src = delta.space_of(IJ, "source")
    tgt = delta.space_of(J, "source")
    blocks = {}
    for k in src.degrees():
        rows, cols = tgt.dim(k), src.dim(k)
        if not rows or not cols:
            continue
        grid = [[fld.zero] * cols for _ in range(rows)]
        src_off = delta.offsets(IJ, k, "source")
        tgt_off = delta.offsets(J, k, "source")
        for p in J:
            for i in range(delta.source[p].dim(k)):
                grid[tgt_off[p] + i][src_off[p] + i] = fld.one
        blocks[k] = Matrix(fld, rows, cols, tuple(tuple(r) for r in grid))
    return GradedMap.build(fld, src, tgt, 0, blocks)


def build_les(delta: BlockGradedMap, pres: Mapping[Interval, HomologyPresentation],
              pair: tuple[Interval, Interval], check: bool = True) -> PairMaps:
    """Inclusion, projection and snake connecting map of an adjacent pair.

    The connecting map lifts a J-cycle into C(IJ), applies the boundary
    and reads off the I-component; with block-triangular boundaries this
    is the literal connecting block acting on representatives.
    """
    I, J = pair
    IJ = union_interval(I, J)
    h_i, h_ij, h_j = pres[I], pres[IJ], pres[J]
    incl = induced_map(interval_inclusion_chain(delta, I, IJ), h_i, h_ij)
    proj = induced_map(interval_projection_chain(delta, IJ, J), h_ij, h_j)

    fld = delta.field
    d_ij = h_ij.complex.d
    blocks = {}
    for k, Q in h_j.reps:
        cols = []
        for j in range(Q.ncols):
            z = Q.column(j)
            lifted = _embed(fld, delta, J, IJ, k, z)
            w = d_ij.block(k).apply(lifted)
            w_i = _project(fld, delta, IJ, I, k - 1, w)
            cols.append(h_i.coords(k - 1, w_i))
        rows = h_i.homology.dim(k - 1)
        if rows and cols:
            blocks[k] = Matrix.from_columns(fld, cols, rows)
    connect = GradedMap.build(fld, h_j.homology, h_i.homology, 1, blocks)
    maps = PairMaps(incl, proj, connect)
    if check:
        failures = exactness_failures(h_i.homology, h_ij.homology, h_j.homology, maps)
        if failures:
            raise ExactnessFailure(f"pair {(I, J)}: {failures[0]}")
    return maps


def _embed(fld, delta, small: Interval, big: Interval, k: int, vec) -> tuple:
    out = [fld.zero] * delta.space_of(big, "source").dim(k)
    small_off = delta.offsets(small, k, "source")
    big_off = delta.offsets(big, k, "source")
    for p in small:
        d = delta.source[p].dim(k)
        for i in range(d):
            out[big_off[p] + i] = vec[small_off[p] + i]
    return tuple(out)


def _project(fld, delta, big: Interval, small: Interval, k: int, vec) -> tuple:
    out = [fld.zero] * delta.space_of(small, "source").dim(k)
    small_off = delta.offsets(small, k, "source")
    big_off = delta.offsets(big, k, "source")
    for p in small:
        d = delta.source[p].dim(k)
        for i in range(d):
            out[small_off[p] + i] = vec[big_off[p] + i]
    return tuple(out)


def exactness_failures(h_i: GradedSpace, h_ij: GradedSpace, h_j: GradedSpace,
                       maps: PairMaps) -> list[str]:
    """image = kernel at the three node types, per degree, by ranks."""
    out = []
    if not maps.proj.compose(maps.incl).is_zero():
        out.append("p o i != 0")
    if not maps.connect.compose(maps.proj).is_zero():
        out.append("bd o p != 0")
    if not maps.incl.compose(maps.connect).is_zero():
        out.append("i o bd != 0")
    degrees = sorted(set(h_i.degrees()) | set(h_ij.degrees()) | set(h_j.degrees()))
    for k in degrees:
        if maps.incl.block(k).rank() != h_ij.dim(k) - maps.proj.block(k).rank():
            out.append(f"exactness at H_{k}(IJ)")
        if maps.proj.block(k).rank() != h_j.dim(k) - maps.connect.block(k).rank():
            out.append(f"exactness at H_{k}(J)")
        if maps.connect.block(k + 1).rank() != h_i.dim(k) - maps.incl.block(k).rank():
            out.append(f"exactness at H_{k}(I)")
    return out


def build_homology_braid(delta: BlockGradedMap, check: bool = True) -> HomologyBraid:
    """The homology braid generated by a boundary map."""
    poset = delta.poset
    pres = {}
    spaces = {}
    for I in poset.intervals():
        cx = restrict(delta, I)
        h = homology(cx)
        pres[I] = h
        spaces[I] = h.homology
    pairs = {}
    for (I, J) in poset.adjacent_pairs():
        pairs[(I, J)] = build_les(delta, pres, (I, J), check=check)
    braid = ModuleBraid.build(poset, delta.field, spaces, pairs)
    return HomologyBraid(braid, delta, tuple(sorted(pres.items())))


# -- axioms -----------------------------------------------------------------


@dataclass(frozen=True)
class BraidReport:
    """Per-axiom verdicts; ok is the conjunction."""

    entries: tuple[tuple[str, str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, _, passed in self.entries)

    def failures(self) -> list[tuple[str, str]]:
        return [(axiom, where) for axiom, where, passed in self.entries if not passed]

    def to_json(self):
        return {"ok": self.ok,
                "checks": [{"axiom": a, "at": w, "pass": p} for a, w, p in self.entries]}


def _fmt(*intervals) -> str:
    return "|".join("{" + ",".join(str(p) for p in I) + "}" for I in intervals)


def verify_braid_axioms(braid: ModuleBraid) -> BraidReport:
    """Exactness for every pair, the noncomparable identity, and the six
    commuting relations of every adjacent triple."""
    entries = []
    P = braid.poset
    for (I, J) in P.adjacent_pairs():
        maps = braid.pair(I, J)
        failures = exactness_failures(braid.space(I), braid.space(union_interval(I, J)),
                                      braid.space(J), maps)
        entries.append(("les_exactness", _fmt(I, J), not failures))
        if P.noncomparable_intervals(I, J):
            ident = GradedMap.identity(braid.field, braid.space(I))
            back = braid.pair(J, I).proj
            entries.append(("noncomparable_identity", _fmt(I, J),
                            back.compose(maps.incl).sub(ident).is_zero()))
    for (I, J, K) in P.adjacent_triples():
        IJ = union_interval(I, J)
        JK = union_interval(J, K)
        IJK = union_interval(IJ, K)
        p_ij = braid.pair(I, J)
        p_jk = braid.pair(J, K)
        p_i_jk = braid.pair(I, JK)
        p_ij_k = braid.pair(IJ, K)
        where = _fmt(I, J, K)
        entries.append(("triple_incl_triangle", where,
                        p_ij_k.incl.compose(p_ij.incl).sub(p_i_jk.incl).is_zero()))
        entries.append(("triple_proj_triangle", where,
                        p_jk.proj.compose(p_i_jk.proj).sub(p_ij_k.proj).is_zero()))
        entries.append(("triple_middle_square", where,
                        p_i_jk.proj.compose(p_ij_k.incl).sub(p_jk.incl.compose(p_ij.proj)).is_zero()))
        entries.append(("triple_connect_to_sub", where,
                        p_ij.proj.compose(p_ij_k.connect).sub(p_jk.connect).is_zero()))
        entries.append(("triple_connect_from_sub", where,
                        p_i_jk.connect.compose(p_jk.incl).sub(p_ij.connect).is_zero()))
        entries.append(("triple_crossing_square", where,
                        p_ij_k.connect.compose(p_jk.proj)
                        .sub(p_ij.incl.compose(p_i_jk.connect)).is_zero()))
    return BraidReport(tuple(entries))


# -- braid morphisms ---------------------------------------------------------


@dataclass(frozen=True)
class BraidMorphism:
    """Degree-r maps H(I) -> H'(I) commuting with all i/p/connecting maps."""

    source: ModuleBraid
    target: ModuleBraid
    degree: int
    components: tuple[tuple[Interval, GradedMap], ...]

    @classmethod
    def build(cls, source: ModuleBraid, target: ModuleBraid, degree: int,
              components: Mapping[Interval, GradedMap]) -> "BraidMorphism":
        comps = dict(components)
        for I in source.poset.intervals():
            if I not in comps:
                if not I:
                    comps[I] = GradedMap.zero_map(source.field, source.space(I),
                                              target.space(I), degree)
                else:
                    raise MissingInterval(f"morphism lacks component for {I}")
            gm = comps[I]
            if gm.source != source.space(I) or gm.target != target.space(I) or gm.degree != degree:
                raise ShapeMismatch(f"component at {I} inconsistent")
        return cls(source, target, degree, tuple(sorted(comps.items())))

    def component(self, I: Interval) -> GradedMap:
        for key, gm in self.components:
            if key == I:
                return gm
        raise MissingInterval(f"interval {I} not in morphism")

    def is_isomorphism(self) -> bool:
        return all(gm.is_isomorphism() for key, gm in self.components if key)

    def inverse(self) -> "BraidMorphism":
        return BraidMorphism.build(self.target, self.source, -self.degree,
                                   {key: gm.inverse() for key, gm in self.components})

    def compose(self, inner: "BraidMorphism") -> "BraidMorphism":
        if inner.target is not self.source and inner.target != self.source:
            raise ShapeMismatch("braid morphism composition mismatch")
        return BraidMorphism.build(inner.source, self.target, self.degree + inner.degree,
                                   {key: self.component(key).compose(gm)
                                    for key, gm in inner.components})

    @classmethod
    def identity(cls, braid: ModuleBraid) -> "BraidMorphism":
        return cls.build(braid, braid, 0,
                         {I: GradedMap.identity(braid.field, braid.space(I))
                          for I in braid.poset.intervals()})


def verify_braid_morphism(theta: BraidMorphism, detail: bool = False):
    """All three ladder squares for every adjacent pair.

    Returns bool, or (bool, failures) when detail is requested.
    """
    failures = []
    for (I, J) in theta.source.poset.adjacent_pairs():
        IJ = union_interval(I, J)
        src = theta.source.pair(I, J)
        tgt = theta.target.pair(I, J)
        t_i, t_ij, t_j = theta.component(I), theta.component(IJ), theta.component(J)
        if not tgt.incl.compose(t_i).sub(t_ij.compose(src.incl)).is_zero():
            failures.append(f"incl ladder at {(I, J)}")
        if not tgt.proj.compose(t_ij).sub(t_j.compose(src.proj)).is_zero():
            failures.append(f"proj ladder at {(I, J)}")
        if not tgt.connect.compose(t_j).sub(t_i.compose(src.connect)).is_zero():
            failures.append(f"connect ladder at {(I, J)}")
    if detail:
        return not failures, failures
    return not failures


def induced_braid_morphism(T: BlockGradedMap, src: HomologyBraid, tgt: HomologyBraid) -> BraidMorphism:
    """Morphism induced on homology braids by a block chain map.

    The restriction T(I) must intertwine the restricted boundaries for
    every interval; upper triangular T with T d = d' T guarantees this.
    """
    comps = {}
    for I in src.poset.intervals():
        if not I:
            continue
        flat = T.restrict(I).to_graded_map(I)
        comps[I] = induced_map(flat, src.presentation(I), tgt.presentation(I))
    return BraidMorphism.build(src.braid, tgt.braid, T.degree, comps)
