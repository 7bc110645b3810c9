"""Composition machinery: weight-3 inflation, TD truncation, resolvable
inflation, difference-matrix products, filling holes and PBD closure.

Every composition is re-verified from scratch through the nesting module;
nothing structural is ever trusted.  Ingredient lookup goes through an
IngredientRegistry; the default registry resolves catalog entries and the
parametric constructions lazily, so compositions can name what they need
and fail loudly when it does not exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .designs import (
    Design,
    DesignError,
    GroupDivisibleDesign,
    affine_plane,
    design,
    gdd,
    point_key,
    sort_block,
    verify_bibd,
    verify_gdd,
)
from .families import DifferenceFamily, brdf_to_nested_gdd, family, verify_brdf
from .groups import FiniteField, GroupError, make_group
from .nestings import Nesting, verify_nesting


class MissingIngredient(DesignError):
    """A composition asked for an ingredient the registry cannot provide."""


# ---------------------------------------------------------------------------
# difference matrices


@dataclass(frozen=True)
class DifferenceMatrix:
    """k x |G| matrix over a field; rows index multipliers, columns elements."""

    fld: FiniteField
    rows: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))

    @property
    def k(self) -> int:
        return len(self.rows)

    def is_difference_matrix(self) -> bool:
        q = self.fld.q
        for i in range(self.k):
            for j in range(i + 1, self.k):
                diffs = {self.fld.sub(a, b) for a, b in zip(self.rows[i], self.rows[j])}
                if len(diffs) != q:
                    return False
        return True

    def is_homogeneous(self) -> bool:
        return all(len(set(r)) == self.fld.q for r in self.rows)


def hdm_from_field(q: int, k: int) -> DifferenceMatrix:
    """Homogeneous (GF(q),k,1)-DM: the multiplication table minus the zero
    row, keeping the first k nonzero multipliers."""
    from .direct import field_for

    fld = field_for(q)
    if not 1 <= k <= q - 1:
        raise DesignError(f"need 1 <= k <= q-1, got k={k}")
    rows = [tuple(fld.mul(m, c) for c in range(q)) for m in range(1, k + 1)]
    m = DifferenceMatrix(fld, tuple(rows))
    if not (m.is_difference_matrix() and m.is_homogeneous()):
        raise DesignError("multiplication table failed the DM axioms")  # unreachable
    return m


def hdm_product(f: DifferenceFamily, m: DifferenceMatrix) -> DifferenceFamily:
    """(G1,H,k,1)-BRDF x (G2,k,1)-HDM -> (G1 x G2, H x G2, k, 1)-BRDF.

    Block elements in canonical order pair with matrix rows; every column
    contributes one product block.
    """
    report = verify_brdf(f)
    if not report.ok:
        raise DesignError(f"product needs a strict family: {report.first_problem()}")
    if not m.is_homogeneous() or not m.is_difference_matrix():
        raise DesignError("product needs a homogeneous difference matrix")
    if m.k != f.k:
        raise DesignError(f"matrix has {m.k} rows but blocks have size {f.k}")
    g1 = f.group
    q = m.fld.q
    g = make_group(g1.descriptor() + "x" + m.fld.descriptor())

    def emb(a, x: int) -> tuple:
        return (g1.coords(a)) + (x,)

    blocks = []
    for blk in f.blocks:  # canonical order within each block
        for c in range(q):
            blocks.append(tuple(emb(b, m.rows[r][c]) for r, b in enumerate(blk)))
    h = [emb(a, x) for a in f.subgroup.sorted_elements() for x in range(q)]
    out = family(g, h, blocks, kind="brdf", lam=1)
    report = verify_brdf(out)
    if not report.ok:
        raise DesignError(f"product failed verification: {report.first_problem()}")
    return out


# ---------------------------------------------------------------------------
# registry


def _freeze(param):
    if isinstance(param, (list, tuple)):
        return tuple(_freeze(p) for p in param)
    return param


@dataclass
class IngredientRegistry:
    """(role, parameter) -> verified ingredient.

    Roles: nested-bibd (v), nested-gdd-3 (u), brdf ((g,h)), hdm ((q,k)),
    td ((k,m)), rbibd (v), pbd (v).  With builtins enabled, lookups fall
    back to the catalog and the parametric constructions; everything that
    comes out of here has passed its verifier.
    """

    builtins: bool = True
    _store: dict = dc_field(default_factory=dict)
    _cache: dict = dc_field(default_factory=dict)

    def add(self, role: str, param, obj) -> None:
        key = (role, _freeze(param))
        _verify_ingredient(role, param, obj)
        self._store[key] = obj

    def get(self, role: str, param):
        key = (role, _freeze(param))
        if key in self._store:
            return self._store[key]
        if key in self._cache:
            return self._cache[key]
        if self.builtins:
            obj = _builtin(self, role, param)
            if obj is not None:
                self._cache[key] = obj
                return obj
        return None

    def require(self, role: str, param):
        obj = self.get(role, param)
        if obj is None:
            raise MissingIngredient(f"no ingredient for role={role!r} param={param!r}")
        return obj


def _verify_ingredient(role: str, param, obj) -> None:
    if role == "nested-bibd":
        report = verify_nesting(obj, 1)
        if not report.ok or obj.base.v != param:
            raise DesignError(f"ingredient fails as nested ({param},4,1) design")
    elif role == "nested-gdd-3":
        report = verify_nesting(obj, 1)
        counts = obj.base.type_vector()
        if not report.ok or counts != {3: param}:
            raise DesignError(f"ingredient fails as nested GDD of type 3^{param}")
    elif role == "brdf":
        report = verify_brdf(obj)
        if not report.ok:
            raise DesignError(f"ingredient fails the Banff axioms: {report.first_problem()}")
    elif role == "hdm":
        if not (obj.is_difference_matrix() and obj.is_homogeneous()):
            raise DesignError("ingredient fails the HDM axioms")
    elif role == "td":
        k, m_ = param
        report = verify_gdd(obj, k, 1)
        if not report.ok or obj.type_vector() != {m_: k}:
            raise DesignError(f"ingredient fails as TD({k},{m_})")
    elif role == "rbibd":
        d, classes = obj
        report = verify_bibd(d, param, _single_size(d), 1)
        if not report.ok or not _is_resolution(d, classes):
            raise DesignError("ingredient fails as a resolvable design")
    elif role == "pbd":
        report = verify_bibd(obj, obj.v, obj.block_sizes(), 1)
        if not report.ok:
            raise DesignError(f"ingredient fails as a PBD: {report.first_problem()}")
    else:
        raise DesignError(f"unknown ingredient role {role!r}")


def _single_size(d: Design) -> int:
    sizes = d.block_sizes()
    if len(sizes) != 1:
        raise DesignError("expected one block size")
    return next(iter(sizes))


def _is_resolution(d: Design, classes) -> bool:
    from collections import Counter

    all_blocks = Counter(d.blocks)
    in_classes = Counter(b for cls in classes for b in cls)
    if all_blocks != in_classes:
        return False
    pts = set(d.points)
    for cls in classes:
        seen = [p for b in cls for p in b]
        if len(seen) != len(pts) or set(seen) != pts:
            return False
    return True


def _builtin(reg: IngredientRegistry, role: str, param):
    from . import catalog

    if role == "nested-bibd":
        entry = catalog.nested_bibd_entry(param)
        if entry is not None:
            return catalog.materialize(entry).nesting
        return None
    if role == "nested-gdd-3":
        u = param
        if u == 8:
            return catalog.materialize("gdd-3x8").nesting
        try:
            from .direct import construct_3v_brdf

            f = construct_3v_brdf(u)
        except DesignError:
            return None
        _, nesting = brdf_to_nested_gdd(f)
        return nesting
    if role == "hdm":
        q, k = param
        try:
            return hdm_from_field(q, k)
        except (DesignError, GroupError):  # non-prime-power q
            return None
    if role == "td":
        k, m_ = param
        try:
            from .designs import transversal_design

            return transversal_design(k, m_)
        except DesignError:
            return None
    if role == "rbibd":
        # only the affine planes are constructible in-artifact
        from .groups import factorize

        root = round(param ** 0.5)
        if root * root == param and len(factorize(root)) == 1:
            return affine_plane(root)
        return None
    return None


def default_registry() -> IngredientRegistry:
    return IngredientRegistry(builtins=True)


# ---------------------------------------------------------------------------
# Wilson weight-3 inflation


def wilson_weight3(g: GroupDivisibleDesign, reg: IngredientRegistry) -> Nesting:
    """Weight-3 inflation of a (K,1)-GDD into a nested (3|X|+1,4,1)-BIBD.

    Points triple to (p, 0|1|2) plus one shared new point.  Each block is
    replaced by a relabeled nested (4,1)-GDD of type 3^|block| whose groups
    align with the block's tripled points; each group of the input GDD is
    replaced by a relabeled nested (3|group|+1,4,1)-BIBD on its tripled
    points plus the shared point.
    """
    report = verify_gdd(g, g.block_sizes() or {0}, 1)
    if not report.ok:
        raise DesignError(f"input is not a (K,1)-GDD: {report.first_problem()}")
    new_point = "w"
    out_blocks: list[tuple] = []
    out_phi: list = []

    for blk in g.blocks:
        ingredient = reg.get("nested-gdd-3", len(blk))
        if ingredient is None:
            raise MissingIngredient(f"no nested (4,1)-GDD of type 3^{len(blk)}")
        base: GroupDivisibleDesign = ingredient.base
        mapping = {}
        for grp, p in zip(base.groups, blk):
            for i, old in enumerate(grp):
                mapping[old] = (p, i)
        _relabel_into(ingredient, mapping, out_blocks, out_phi)

    for grp in g.groups:
        v_ing = 3 * len(grp) + 1
        ingredient = reg.get("nested-bibd", v_ing)
        if ingredient is None:
            raise MissingIngredient(f"no nested ({v_ing},4,1) design for a group of size {len(grp)}")
        pts = list(ingredient.base.points)
        mapping = {}
        for i, old in enumerate(pts[:-1]):
            mapping[old] = (grp[i // 3], i % 3)
        mapping[pts[-1]] = new_point
        _relabel_into(ingredient, mapping, out_blocks, out_phi)

    points = [(p, i) for p in g.points for i in range(3)] + [new_point]
    nesting = _sorted_nesting(points, out_blocks, out_phi)
    report = verify_nesting(nesting, 1)
    if not report.ok:
        raise DesignError(f"inflated design does not verify: {report.first_problem()}")
    return nesting


def _relabel_into(ingredient: Nesting, mapping: dict, out_blocks: list, out_phi: list) -> None:
    for blk, nested in zip(ingredient.base.blocks, ingredient.phi):
        out_blocks.append(sort_block(mapping[p] for p in blk))
        out_phi.append(mapping[nested])


def _sorted_nesting(points, blocks, phi) -> Nesting:
    order = sorted(range(len(blocks)),
                   key=lambda i: tuple(point_key(p) for p in blocks[i]) + (point_key(phi[i]),))
    base = Design(tuple(sorted(points, key=point_key)),
                  tuple(blocks[i] for i in order))
    return Nesting(base, tuple(phi[i] for i in order))


# ---------------------------------------------------------------------------
# GDD builders feeding the inflation


def truncate_td(td: GroupDivisibleDesign, t: int) -> GroupDivisibleDesign:
    """Delete all but t points from the last group of a TD."""
    groups = list(td.groups)
    last = groups[-1]
    if not 0 <= t <= len(last):
        raise DesignError(f"t={t} out of range for a group of size {len(last)}")
    remove = set(last[t:])
    new_groups = groups[:-1] + ([last[:t]] if t else [])
    new_blocks = [tuple(p for p in blk if p not in remove) for blk in td.blocks]
    points = [p for p in td.points if p not in remove]
    out = gdd(points, new_groups, new_blocks)
    sizes = out.block_sizes()
    report = verify_gdd(out, sizes, 1)
    if not report.ok:
        raise DesignError(f"truncation failed verification: {report.first_problem()}")
    return out


def rbibd_inflate(resolvable: tuple[Design, list], t: int) -> GroupDivisibleDesign:
    """Resolvable (56m+8,8,1)-BIBD -> ({8,9},1)-GDD of type 8^(7m+1) t^1.

    Classes P_1..P_t each get a new point appended to every block; the
    blocks of class P_{t+1} become the groups; the new points form the
    final group.  When the target is v = 4 mod 12, t must be 1 mod 4 (and
    at least 5); other t still yield a valid GDD, so that is only checked
    by the planner.
    """
    d, classes = resolvable
    n = d.v
    if (n - 8) % 56 != 0:
        raise DesignError(f"{n} is not of the form 56m+8")
    m = (n - 8) // 56
    if not 0 <= t <= 8 * m:
        raise DesignError(f"t={t} out of range 0..{8 * m}")
    if t % 4 not in (0, 1):
        import warnings

        warnings.warn(f"t={t}: only t = 1 mod 4 (t >= 5) leads to v = 4 mod 12",
                      stacklevel=2)
    if len(classes) != 8 * m + 1 or not _is_resolution(d, classes):
        raise DesignError("design is not resolvable into 8m+1 parallel classes")
    inf = [f"add{i}" for i in range(1, t + 1)]
    blocks = []
    for i, cls in enumerate(classes):
        if i < t:
            blocks.extend(sort_block(tuple(b) + (inf[i],)) for b in cls)
        elif i == t:
            groups = [tuple(b) for b in cls]
        else:
            blocks.extend(tuple(b) for b in cls)
    groups = groups + ([tuple(inf)] if inf else [])
    out = gdd(list(d.points) + inf, groups, blocks)
    report = verify_gdd(out, {8, 9}, 1)
    if not report.ok:
        raise DesignError(f"inflation failed verification: {report.first_problem()}")
    return out


# ---------------------------------------------------------------------------
# filling holes and PBD closure


def fill_groups(g_nesting: Nesting, reg: IngredientRegistry) -> Nesting:
    """Fill every group of a nested (4,1)-GDD with a nested (h,4,1) design.

    Size-1 groups need no filling; a uniform type 1^u GDD therefore returns
    its own nesting reinterpreted over a plain design.
    """
    base: GroupDivisibleDesign = g_nesting.base  # type: ignore[assignment]
    if not isinstance(base, GroupDivisibleDesign):
        raise DesignError("fill_groups expects a nested GDD")
    out_blocks = list(base.blocks)
    out_phi = list(g_nesting.phi)
    for grp in base.groups:
        h = len(grp)
        if h == 1:
            continue
        ingredient = reg.get("nested-bibd", h)
        if ingredient is None:
            raise MissingIngredient(f"no nested ({h},4,1) design to fill a group")
        mapping = dict(zip(ingredient.base.points, grp))
        _relabel_into(ingredient, mapping, out_blocks, out_phi)
    nesting = _sorted_nesting(list(base.points), out_blocks, out_phi)
    report = verify_nesting(nesting, 1)
    if not report.ok:
        raise DesignError(f"filled design does not verify: {report.first_problem()}")
    return nesting


def pbd_closure(d: Design, reg: IngredientRegistry) -> Nesting:
    """Replace every block of a PBD with a relabeled nested (k,4,1) design."""
    report = verify_bibd(d, d.v, d.block_sizes(), 1)
    if not report.ok:
        raise DesignError(f"input is not a PBD: {report.first_problem()}")
    out_blocks: list[tuple] = []
    out_phi: list = []
    for blk in d.blocks:
        ingredient = reg.get("nested-bibd", len(blk))
        if ingredient is None:
            raise MissingIngredient(f"no nested ({len(blk)},4,1) design for block size {len(blk)}")
        mapping = dict(zip(ingredient.base.points, blk))
        _relabel_into(ingredient, mapping, out_blocks, out_phi)
    nesting = _sorted_nesting(list(d.points), out_blocks, out_phi)
    report = verify_nesting(nesting, 1)
    if not report.ok:
        raise DesignError(f"closure does not verify: {report.first_problem()}")
    return nesting
