"""Ultrametric disk trees of finite point sets, their labelling and the Phi map.

Radii and valuations here are in S-units of the points' field (T-units when
e = 1, the only case the labelling supports).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import CheckFailed, FieldError, PrecisionError
from .laurent import LaurentSeries

OPEN, CLOSED = "open", "closed"


@dataclass(frozen=True)
class Disk:
    center: LaurentSeries
    radius: Fraction
    kind: str = OPEN

    def __contains__(self, x: LaurentSeries) -> bool:
        d = (x - self.center).lower_order()
        r = self.radius * x.field.e
        return d > r if self.kind == OPEN else d >= r


@dataclass
class Node:
    members: frozenset
    radius: int | None  # min pairwise S-distance; None for a leaf
    children: list = dc_field(default_factory=list)
    label: int | None = None


@dataclass
class DiskTree:
    points: list
    root: Node

    def nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.children)

    def leaf_of(self, i: int) -> list[Node]:
        """Chain from the root to the leaf {i}."""
        chain = [self.root]
        while chain[-1].children:
            chain.append(next(c for c in chain[-1].children if i in c.members))
        return chain

    def max_children(self) -> int:
        return max((len(n.children) for n in self.nodes()), default=0)

    def to_json(self) -> dict:
        def enc(n: Node):
            return {
                "members": sorted(n.members),
                "radius": None if n.radius is None else str(Fraction(n.radius, self.points[0].field.e)),
                "label": n.label,
                "children": [enc(c) for c in n.children],
            }

        return {"schema": "v1", "points": [str(p) for p in self.points], "root": enc(self.root)}

    def dot_body(self, prefix: str = "n") -> list[str]:
        """Node and edge lines, with node ids ``prefix0``, ``prefix1``, ..."""
        lines = []
        ids = {}
        e = self.points[0].field.e
        for n in self.nodes():
            ids[id(n)] = f"{prefix}{len(ids)}"
            rad = "leaf" if n.radius is None else f"r={Fraction(n.radius, e)}"
            lab = "" if n.label is None else f" label={n.label}"
            pts = ",".join(str(self.points[i]) for i in sorted(n.members))
            lines.append(f'  {ids[id(n)]} [label="{{{pts}}} {rad}{lab}"];')
        for n in self.nodes():
            for c in n.children:
                lines.append(f"  {ids[id(n)]} -> {ids[id(c)]};")
        return lines

    def to_dot(self) -> str:
        return "\n".join(["digraph disktree {", *self.dot_body(), "}"])


def _dist(a: LaurentSeries, b: LaurentSeries) -> int:
    d = a - b
    if d.looks_zero():
        raise PrecisionError(f"points {a} and {b} are not distinguishable at their precision")
    return d.order


def build_tree(S: list[LaurentSeries]) -> DiskTree:
    """Children of a node are its points grouped by the digit at the node's radius."""
    if not S:
        raise ValueError("empty point set")
    pts = list(S)

    def make(idx: frozenset) -> Node:
        if len(idx) == 1:
            return Node(idx, None)
        ids = sorted(idx)
        g = min(_dist(pts[a], pts[b]) for k, a in enumerate(ids) for b in ids[k + 1:])
        groups: dict[int, set] = {}
        for i in ids:
            groups.setdefault(pts[i].coefficient(g), set()).add(i)
        node = Node(idx, g)
        node.children = [make(frozenset(v)) for _, v in sorted(groups.items())]
        return node

    return DiskTree(pts, make(frozenset(range(len(pts)))))


def tree_length(t: DiskTree) -> int:
    def depth(n: Node) -> int:
        return 0 if not n.children else 1 + max(depth(c) for c in n.children)

    return depth(t.root)


def hasse_tree_edges(S: list[LaurentSeries]) -> set:
    """Brute-force Hasse diagram of {S cap D}: edges (parent, child) of frozensets."""
    sets = {frozenset(range(len(S)))}
    for i, s in enumerate(S):
        radii = {_dist(s, t) for j, t in enumerate(S) if j != i}
        for r in radii:
            sets.add(frozenset(j for j, t in enumerate(S) if j == i or _dist(s, t) > r))
            sets.add(frozenset(j for j, t in enumerate(S) if j == i or _dist(s, t) >= r))
        sets.add(frozenset([i]))
    edges = set()
    for a in sets:
        for b in sets:
            if b < a and not any(b < c < a for c in sets):
                edges.add((a, b))
    return edges


def tree_edges(t: DiskTree) -> set:
    return {(n.members, c.members) for n in t.nodes() for c in n.children}


def phi_label(tree: DiskTree, g_u: int) -> DiskTree:
    """Label nodes with residue digits: beta_g = T^g, x_1 = truncation below g.

    The root gets the digit at g_u (the residue of r / T^{g_u}); every child
    gets the digit of its members at its parent's radius.
    """
    pts = tree.points
    if pts[0].field.e != 1:
        raise FieldError("labelling is defined for unramified fields only")
    first = next(iter(tree.root.members))
    tree.root.label = pts[first].coefficient(g_u)
    for n in tree.nodes():
        for c in n.children:
            c.label = pts[next(iter(c.members))].coefficient(n.radius)
    return tree


@dataclass(frozen=True)
class PhiImage:
    coeffs: tuple  # length k, codes in the labelling field

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def phi_map(roots: list[LaurentSeries], polygon, k: int) -> dict[int, PhiImage]:
    """Phi: root index -> coefficients of X^{u-1} sum label(T_i) X^i.

    ``polygon`` must be properly ordered.  Raises CheckFailed if a chain is
    too long to fit in F[X]_{<k}.
    """
    out: dict[int, PhiImage] = {}
    by_g = {s.g: s.order_pos for s in polygon.segments}
    for zi, z in enumerate(roots):
        if z.is_zero():
            out[zi] = PhiImage((0,) * k)
            continue
        if z.field.e != 1:
            raise FieldError("Phi is defined for unramified roots only")
        g = z.order
        u = by_g.get(Fraction(g))
        if u is None:
            raise CheckFailed(f"root {z} has valuation {g} matching no segment")
        members = [i for i, y in enumerate(roots) if not y.is_zero() and (y - z).lower_order() > g]
        sub = [roots[i] for i in members]
        tree = phi_label(build_tree(sub), g)
        chain = tree.leaf_of(members.index(zi))
        n = len(chain) - 1
        if u - 1 + n > k - 1:
            raise CheckFailed(f"Phi chain of length {n} at position u={u} exceeds k-u={k - u}")
        coeffs = [0] * k
        for i, node in enumerate(chain):
            coeffs[u - 1 + i] = node.label
        out[zi] = PhiImage(tuple(coeffs))
    return out
