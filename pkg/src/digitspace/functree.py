"""Read/write trees coding continuous maps between digit spaces.

A node either writes an output digit e and continues with ar(e) subtrees,
or reads the root digit d of input i, which replaces that input by its
ar(d) subtrees and selects branch d.  The children of a writing node split
the current inputs between them: by default into contiguous blocks in
order, or according to an explicit routing (``slots``) when the inputs have
to be reshuffled, as in pairing, unions and compact lifting.

Read indices are 0-based in this API and 1-based in the text format.
"""
from __future__ import annotations

import os
import threading

from .errors import ArityError, DomainError, ParseError, ProductivityError, UnsupportedError
from .labels import Hyper, Prod, format_label
from .sexpr import _plain, read_sexpr, split_letrec
from .tree import LazyTree

DEFAULT_FUEL = 64
FUEL_ENV = "DIGITSPACE_FUEL"

_lock = threading.Lock()


def default_fuel() -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw:
        try:
            val = int(raw)
        except ValueError:
            raise DomainError(f"{FUEL_ENV} must be an integer, got {raw!r}") from None
        if val < 1:
            raise DomainError(f"{FUEL_ENV} must be positive")
        return val
    return DEFAULT_FUEL


class FunTree:
    """A writing or reading node with ``arity`` inputs; payload forced lazily."""

    __slots__ = ("kind", "label", "index", "arity", "_thunk", "_payload")

    def __init__(self, kind, label, index, arity, payload):
        self.kind = kind
        self.label = label
        self.index = index
        self.arity = arity
        if kind == "W" and not callable(payload):
            value = payload
            payload = lambda: value
        if callable(payload):
            self._thunk, self._payload = payload, None
        else:
            self._thunk, self._payload = None, payload

    # constructors

    @classmethod
    def write(cls, label, children, arity=None, slots=None) -> "FunTree":
        """Write ``label``; ``children`` is a list or a thunk returning one."""
        if callable(children):
            if arity is None:
                raise ArityError("a lazily built writing node needs its arity")
            return cls("W", label, None, arity, lambda: (tuple(children()), slots))
        children = tuple(children)
        if arity is None:
            arity = sum(c.arity for c in children)
        return cls("W", label, None, arity, (children, slots))

    @classmethod
    def _lazy_write(cls, label, arity, thunk) -> "FunTree":
        """thunk() -> (children, slots)."""
        return cls("W", label, None, arity, thunk)

    @classmethod
    def read(cls, index, branches, arity) -> "FunTree":
        """Read input ``index`` (0-based); ``branches`` maps digits to subtrees."""
        if not 0 <= index < arity:
            raise ArityError(f"read index {index} outside input arity {arity}")
        if callable(branches):
            return cls("R", None, index, arity, lambda: dict(branches()))
        return cls("R", None, index, arity, dict(branches))

    # payload access

    def _force(self):
        p = self._payload
        if p is not None:
            return p
        thunk = self._thunk
        if thunk is None:
            return self._payload
        value = thunk()
        if self.kind == "W":
            value = self._check_write(*value)
        with _lock:
            if self._payload is None:
                self._payload = value
                self._thunk = None
            return self._payload

    def _check_write(self, children, slots):
        children = tuple(children)
        if slots is None:
            out, pos = [], 0
            for c in children:
                out.append(tuple(range(pos, pos + c.arity)))
                pos += c.arity
            if pos != self.arity:
                raise ArityError(f"children of writing node {format_label(self.label)} take {pos} "
                                 f"inputs, node has {self.arity}")
            slots = tuple(out)
        else:
            slots = tuple(tuple(s) for s in slots)
            if len(slots) != len(children):
                raise ArityError("one slot list per child is required")
            flat = sorted(x for s in slots for x in s)
            if flat != list(range(self.arity)):
                raise ArityError("slot lists must partition the inputs")
            for c, s in zip(children, slots):
                if c.arity != len(s):
                    raise ArityError("child arity does not match its slot list")
        return children, slots

    @property
    def children(self) -> tuple:
        if self.kind != "W":
            raise ArityError("reading node has no children")
        return self._force()[0]

    @property
    def slots(self) -> tuple:
        if self.kind != "W":
            raise ArityError("reading node has no slots")
        return self._force()[1]

    @property
    def branches(self) -> dict:
        if self.kind != "R":
            raise ArityError("writing node has no branches")
        return self._force()

    def branch(self, d) -> "FunTree":
        br = self.branches
        if d in br:
            return br[d]
        raise ArityError(f"no branch for input digit {format_label(d)}")

    def __repr__(self):
        if self.kind == "W":
            return f"FunTree(W {format_label(self.label)}, arity={self.arity})"
        return f"FunTree(R {self.index + 1}, arity={self.arity})"


def _contiguous(f: FunTree) -> bool:
    pos = 0
    for s in f.slots:
        if s != tuple(range(pos, pos + len(s))):
            return False
        pos += len(s)
    return True


# -- interpreter ------------------------------------------------------------

def apply(f: FunTree, inputs, fuel: int | None = None) -> LazyTree:
    """Run f on input trees; the output is produced lazily."""
    if fuel is None:
        fuel = default_fuel()
    inputs = list(inputs)
    if len(inputs) != f.arity:
        raise ArityError(f"function tree takes {f.arity} inputs, got {len(inputs)}")
    node, ins, reads = f, inputs, 0
    while node.kind == "R":
        reads += 1
        if reads > fuel:
            raise ProductivityError(f"more than {fuel} consecutive reads without a write")
        i = node.index
        t = ins[i]
        br = node.branch(t.root)
        ins = ins[:i] + list(t.children) + ins[i + 1:]
        if br.arity != len(ins):
            raise ArityError(f"branch for {format_label(t.root)} expects {br.arity} inputs, has {len(ins)}")
        node = br
    kids, slots = node.children, node.slots
    return LazyTree(node.label, lambda: [apply(c, [ins[s] for s in sl], fuel) for c, sl in zip(kids, slots)])


# -- composition ------------------------------------------------------------

def permute(F: FunTree, pi) -> FunTree:
    """G with G(x) = F(y), y_k = x_{pi[k]} (pi a permutation of the inputs)."""
    pi = tuple(pi)
    if len(pi) != F.arity:
        raise ArityError("permutation length must equal the arity")
    if pi == tuple(range(len(pi))):
        return F
    if F.kind == "W":
        return FunTree._lazy_write(
            F.label, F.arity,
            lambda: (F.children, tuple(tuple(pi[k] for k in s) for s in F.slots)))
    i, p = F.index, pi[F.index]

    def branches():
        out = {}
        for d, br in F.branches.items():
            out[d] = _permute_branch(br, pi, i, p)
        return out

    return FunTree.read(p, branches, F.arity)


def _permute_branch(br, pi, i, p):
    a = br.arity - len(pi) + 1

    def adj(x):
        return x if x < p else x + a - 1

    new = [adj(pi[k]) for k in range(i)] + [p + t for t in range(a)] + \
          [adj(pi[k]) for k in range(i + 1, len(pi))]
    return permute(br, new)


def compose(f: FunTree, gs, fuel: int | None = None) -> FunTree:
    """f o (g1 x ... x gm), built lazily."""
    if fuel is None:
        fuel = default_fuel()
    gs = list(gs)
    if len(gs) != f.arity:
        raise ArityError(f"outer function takes {f.arity} inputs, got {len(gs)} inner functions")
    steps = 0
    while True:
        total = sum(g.arity for g in gs)
        if f.kind == "W":
            return _compose_write(f, gs, total, fuel)
        i = f.index
        g = gs[i]
        if g.kind == "W":
            steps += 1
            if steps > fuel:
                raise ProductivityError(f"composition needed more than {fuel} reads in a row")
            br = f.branch(g.label)
            new_gs = gs[:i] + list(g.children) + gs[i + 1:]
            if not _contiguous(g):
                off = sum(x.arity for x in gs[:i])
                pi = list(range(off)) + [off + r for s in g.slots for r in s] + \
                    list(range(off + g.arity, total))
                return permute(compose(br, new_gs, fuel), pi)
            f, gs = br, new_gs
            continue
        off = sum(x.arity for x in gs[:i])

        def branches(f=f, gs=gs, i=i, g=g):
            return {d: compose(f, gs[:i] + [gb] + gs[i + 1:], fuel) for d, gb in g.branches.items()}

        return FunTree.read(off + g.index, branches, total)


def _compose_write(f, gs, total, fuel):
    offs = []
    pos = 0
    for g in gs:
        offs.append(pos)
        pos += g.arity

    def payload():
        kids, slots = [], []
        for c, R in zip(f.children, f.slots):
            kids.append(compose(c, [gs[j] for j in R], fuel))
            slots.append(tuple(offs[j] + t for j in R for t in range(gs[j].arity)))
        return kids, slots

    return FunTree._lazy_write(f.label, total, payload)


# -- constructors -----------------------------------------------------------

def id_tree(alphabet: dict) -> FunTree:
    """Identity on trees over ``alphabet`` (label -> arity)."""
    holder = []

    def branches():
        me = holder[0]
        return {d: FunTree.write(d, [me] * a, arity=a) for d, a in alphabet.items()}

    node = FunTree.read(0, branches, 1)
    holder.append(node)
    return node


def relabel_tree(alphabet: dict, mapping: dict) -> FunTree:
    """Read a digit, write its image under ``mapping`` (same arity), repeat."""
    holder = []

    def branches():
        me = holder[0]
        return {d: FunTree.write(mapping[d], [me] * a, arity=a) for d, a in alphabet.items()}

    node = FunTree.read(0, branches, 1)
    holder.append(node)
    return node


def sd_neg_tree() -> FunTree:
    """x -> -x on signed-digit trees."""
    return relabel_tree({"-1": 1, "0": 1, "1": 1}, {"-1": "1", "0": "0", "1": "-1"})


def prefix_write(label, f: FunTree) -> FunTree:
    """Write a unary digit, then continue with f."""
    return FunTree.write(label, [f])


def proj_tree(alphabet: dict, n: int, i: int) -> FunTree:
    """Projection onto input i (1-based) of n inputs."""
    if not 1 <= i <= n:
        raise ArityError(f"projection index {i} outside 1..{n}")
    memo = {}

    def node(n, i):
        key = (n, i)
        if key in memo:
            return memo[key]

        def branches():
            out = {}
            for d, a in alphabet.items():
                if a == 1:
                    kids = [node(n, i)]
                else:
                    kids = [node(i, i)] + [node(1, 1)] * (a - 2) + [node(n - i + 1, 1)]
                out[d] = FunTree.write(d, kids, arity=n + a - 1)
            return out

        memo[key] = FunTree.read(i - 1, branches, n)
        return memo[key]

    return node(n, i)


def _constant_tree(label, s: int) -> FunTree:
    """Arity-0 tree writing ``label`` everywhere (for padded product arguments)."""
    holder = []
    node = FunTree.write(label, lambda: [holder[0]] * s, arity=0)
    holder.append(node)
    return node


def diag_tree(alphabet: dict, n: int) -> FunTree:
    """x -> (x, ..., x) with output digits <d,...,d>."""
    s = max(alphabet.values())
    holder = []
    filler = {}

    def pad(d):
        if d not in filler:
            filler[d] = _constant_tree(Prod((d,) * n), s)
        return filler[d]

    def branches():
        me = holder[0]
        return {d: FunTree.write(Prod((d,) * n), [me] * a + [pad(d)] * (s - a), arity=a)
                for d, a in alphabet.items()}

    node = FunTree.read(0, branches, 1)
    holder.append(node)
    return node


def pair_tree(f: FunTree, g: FunTree, fuel: int | None = None) -> FunTree:
    """(x, y) -> (f x, g y) with output digits <e1,e2>; f's reads go first."""
    total = f.arity + g.arity
    if f.kind == "R":
        return FunTree.read(f.index, lambda: {d: pair_tree(b, g, fuel) for d, b in f.branches.items()}, total)
    if g.kind == "R":
        return FunTree.read(f.arity + g.index,
                            lambda: {d: pair_tree(f, b, fuel) for d, b in g.branches.items()}, total)

    def payload():
        fk, fs = list(f.children), list(f.slots)
        gk, gs = list(g.children), list(g.slots)
        s = max(len(fk), len(gk))
        while len(fk) < s:
            fk.append(_constant_tree(f.label, s))
            fs.append(())
        while len(gk) < s:
            gk.append(_constant_tree(g.label, s))
            gs.append(())
        kids = [pair_tree(a, b, fuel) for a, b in zip(fk, gk)]
        slots = [tuple(sa) + tuple(f.arity + t for t in sb) for sa, sb in zip(fs, gs)]
        return kids, slots

    return FunTree._lazy_write(Prod((f.label, g.label)), total, payload)


def eta_tree(alphabet: dict) -> FunTree:
    """x -> {x}: reads d, writes [d]."""
    if any(a != 1 for a in alphabet.values()):
        raise UnsupportedError("the singleton map needs unary digits")
    holder = []

    def branches():
        me = holder[0]
        return {d: FunTree.write(Hyper((d,)), [me]) for d in alphabet}

    node = FunTree.read(0, branches, 1)
    holder.append(node)
    return node


def union_fun(H, f: FunTree, g: FunTree) -> FunTree:
    """(x, y) -> f(x) u g(y) for compact-valued f and g over hyperspace H."""
    total = f.arity + g.arity
    if f.kind == "R":
        return FunTree.read(f.index, lambda: {d: union_fun(H, b, g) for d, b in f.branches.items()}, total)
    if g.kind == "R":
        return FunTree.read(f.arity + g.index,
                            lambda: {d: union_fun(H, f, b) for d, b in g.branches.items()}, total)
    la, lb = H.components(f.label), H.components(g.label)
    label = H.canonical(dict.fromkeys(la + lb))

    def payload():
        fa = dict(zip(la, zip(f.children, f.slots)))
        gb = dict(zip(lb, zip(g.children, g.slots)))
        kids, slots = [], []
        for c in label:
            if c in fa and c in gb:
                (x, sx), (y, sy) = fa[c], gb[c]
                kids.append(union_fun(H, x, y))
                slots.append(tuple(sx) + tuple(f.arity + t for t in sy))
            elif c in fa:
                kids.append(fa[c][0])
                slots.append(tuple(fa[c][1]))
            else:
                kids.append(gb[c][0])
                slots.append(tuple(f.arity + t for t in gb[c][1]))
        return kids, slots

    return FunTree._lazy_write(label, total, payload)


def lift_K(f: FunTree, H_in, H_out=None) -> FunTree:
    """K(f): compact set K -> f[K], for unary f between unary-digit spaces."""
    if f.arity != 1:
        raise UnsupportedError("compact lifting needs a unary function tree")
    H_out = H_out or H_in

    def state(elems):
        m = len(elems)
        for k, g in enumerate(elems):
            if g.kind == "R":
                def branches(k=k, g=g):
                    out = {}
                    for hd in H_in.hyper_digits:
                        out[hd] = state(elems[:k] + tuple(g.branch(d) for d in hd) + elems[k + 1:])
                    return out
                return FunTree.read(k, branches, m)
        for g in elems:
            if len(g.children) != 1:
                raise UnsupportedError(f"compact lifting needs unary output digits, "
                                       f"{format_label(g.label)} has arity {len(g.children)}")
        label = H_out.canonical(dict.fromkeys(g.label for g in elems))

        def payload():
            kids, slots = [], []
            for e in label:
                group = tuple(k for k, g in enumerate(elems) if g.label == e)
                kids.append(state(tuple(elems[k].children[0] for k in group)))
                slots.append(group)
            return kids, slots

        return FunTree._lazy_write(label, m, payload)

    return state((f,))


# -- text format ------------------------------------------------------------

def parse_funtree(text: str, alphabet: dict, arity: int | None = None) -> FunTree:
    """Parse the function-tree text format.

    ``(W e c1 ... ck)`` writes e; ``(R i (d -> t) ...)`` reads input i
    (1-based), with ``_`` as a catch-all digit.  ``(W _ ...)`` writes the
    digit read by the enclosing branch.  ``(@ (i j ...) t)`` routes
    the listed inputs to a child, ``(: k t)`` states a child's arity.
    Bindings are ``(name t)`` or ``(name arity t)``.
    """
    bindings, body = split_letrec(read_sexpr(text))
    env = {}
    for b in bindings:
        if not isinstance(b, list) or len(b) not in (2, 3) or isinstance(b[0], list):
            raise ParseError("function binding must be (name expr) or (name arity expr)")
        name = b[0]
        declared = _int(b[1]) if len(b) == 3 else None
        env[name] = (b[-1], declared)
    memo = {}

    def static_arity(sx):
        if isinstance(sx, list) and sx and sx[0] == ":":
            return _int(sx[1])
        if isinstance(sx, list) and sx and sx[0] == "@":
            return len(sx[1])
        if isinstance(sx, str) and sx in env:
            return env[sx][1]
        return None

    def build(sx, m, cur=None):
        if isinstance(sx, list) and sx and isinstance(sx[0], str):
            head = sx[0]
            if head == ":":
                if _int(sx[1]) != m:
                    raise ArityError(f"annotated arity {sx[1]} but context needs {m}")
                return build(sx[2], m, cur)
            if head == "@":
                return build(sx[2], m, cur)
            if head == "W":
                return build_write(sx, m, cur)
            if head == "R":
                return build_read(sx, m)
        if isinstance(sx, str) and not isinstance(sx, list):
            if sx not in env:
                raise ParseError(f"unbound name {sx!r}")
            expr, declared = env[sx]
            if declared is not None and declared != m:
                raise ArityError(f"{sx} declared with arity {declared}, used with {m}")
            key = (sx, m)
            if key not in memo:
                if isinstance(expr, str) and not isinstance(expr, list):
                    memo[key] = None
                    memo[key] = build(expr, m)
                else:
                    memo[key] = _Deferred(lambda: build(expr, m))
            node = memo[key]
            if node is None:
                raise ParseError(f"name {sx!r} is an alias of itself")
            return node.get() if isinstance(node, _Deferred) else node
        raise ParseError(f"bad function-tree expression {_show(sx)}")

    def build_write(sx, m, cur):
        if len(sx) < 2:
            raise ParseError("(W e children...) needs a digit")
        label = _plain(sx[1])
        if label == "_":
            if cur is None:
                raise ParseError("(W _ ...) is only allowed directly under a read branch")
            label = cur
        kids = sx[2:]
        routed = [isinstance(k, list) and k and k[0] == "@" for k in kids]
        if any(routed) and not all(routed):
            raise ParseError("either route every child with @ or none")
        if kids and all(routed):
            slots = []
            for k in kids:
                if not isinstance(k[1], list):
                    raise ParseError("(@ (i ...) t) needs a slot list")
                slots.append(tuple(_int(x) - 1 for x in k[1]))
            arities = [len(s) for s in slots]
        else:
            slots = None
            arities = [static_arity(k) for k in kids]
            unknown = [j for j, a in enumerate(arities) if a is None]
            known = sum(a for a in arities if a is not None)
            if len(unknown) == 1:
                arities[unknown[0]] = m - known
            elif len(unknown) > 1:
                raise ParseError(f"cannot infer child arities of (W {format_label(label)} ...); "
                                 "annotate children with (: k t)")
            if sum(arities) != m:
                raise ArityError(f"children of (W {format_label(label)} ...) take {sum(arities)} "
                                 f"inputs, context has {m}")
        if any(a < 0 for a in arities):
            raise ArityError("negative child arity")
        return FunTree.write(label, lambda: [build(k, a, cur) for k, a in zip(kids, arities)],
                             arity=m, slots=slots)

    def build_read(sx, m):
        if len(sx) < 2:
            raise ParseError("(R i branches...) needs an index")
        i = _int(sx[1]) - 1
        if not 0 <= i < m:
            raise ArityError(f"read index {i + 1} outside 1..{m}")
        table = {}
        for br in sx[2:]:
            if not (isinstance(br, list) and len(br) == 3 and br[1] == "->"):
                raise ParseError("read branch must be (d -> t)")
            table[_plain(br[0])] = br[2]

        def branches():
            out = {}
            for d, a in alphabet.items():
                expr = table.get(d, table.get("_"))
                if expr is not None:
                    out[d] = build(expr, m + a - 1, d)
            return out

        for d in table:
            if d != "_" and d not in alphabet:
                raise ParseError(f"branch for unknown digit {format_label(d)}")
        return FunTree.read(i, branches, m)

    if arity is None:
        arity = static_arity(body)
        if arity is None:
            arity = 1
    return build(body, arity)


class _Deferred:
    """Break cycles: a name's node is created on first use and reused."""

    def __init__(self, make):
        self._make = make
        self._node = None
        self._building = False

    def get(self):
        if self._node is None:
            if self._building:
                raise ParseError("recursive name used before any read or write")
            self._building = True
            self._node = self._make()
        return self._node


def _int(x) -> int:
    try:
        return int(str(x))
    except ValueError:
        raise ParseError(f"expected an integer, got {_show(x)}") from None


def _show(sx) -> str:
    if isinstance(sx, list):
        return "(" + " ".join(_show(x) for x in sx) + ")"
    return format_label(sx)


def show_funtree(f: FunTree, depth: int) -> str:
    """Depth-limited rendering in the text format (``...`` marks the cut)."""
    if depth < 0:
        return "..."
    if f.kind == "W":
        parts = [format_label(f.label)]
        for c, s in zip(f.children, f.slots):
            body = show_funtree(c, depth - 1)
            parts.append(f"(@ ({' '.join(str(x + 1) for x in s)}) {body})" if not _contiguous(f) else body)
        return "(W " + " ".join(parts) + ")"
    br = " ".join(f"({format_label(d)} -> {show_funtree(b, depth - 1)})" for d, b in f.branches.items())
    return f"(R {f.index + 1} {br})"
