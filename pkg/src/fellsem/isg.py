"""Finite inverse semigroups as verified Cayley tables."""

from __future__ import annotations

from itertools import combinations, permutations


class IsgError(ValueError):
    pass


class NonAssociative(IsgError):
    def __init__(self, a, b, c):
        self.triple = (a, b, c)
        super().__init__(f"associativity fails at triple ({a}, {b}, {c})")


class NoInverse(IsgError):
    def __init__(self, a):
        self.element = a
        super().__init__(f"element {a} has no generalized inverse")


class IdempotentsDontCommute(IsgError):
    def __init__(self, e, f):
        self.pair = (e, f)
        super().__init__(f"idempotents {e} and {f} do not commute")


class TooLarge(IsgError):
    pass


class InverseSemigroup:
    """A finite inverse semigroup on indices 0..n-1.

    Construct through verify_inverse_semigroup; the constructor trusts its
    arguments.
    """

    def __init__(self, table, inv, idem, labels=None):
        self.n = len(table)
        self.table = table
        self.inv = inv
        self.idem = idem
        self.labels = labels if labels is not None else [str(i) for i in range(self.n)]

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def star(self, a: int) -> int:
        return self.inv[a]

    def is_idempotent(self, a: int) -> bool:
        return self.table[a][a] == a

    def leq(self, a: int, b: int) -> bool:
        """Natural partial order: a <= b iff a = b a* a."""
        return a == self.table[self.table[b][self.inv[a]]][a]

    def elements(self):
        return range(self.n)

    def label(self, a: int) -> str:
        return self.labels[a]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def __repr__(self):
        return f"InverseSemigroup(n={self.n}, idem={list(self.idem)})"

    def to_json(self):
        return {"elements": list(self.labels), "table": [list(row) for row in self.table]}

    @classmethod
    def from_json(cls, data) -> "InverseSemigroup":
        labels = data.get("elements")
        return verify_inverse_semigroup(data["table"], labels=labels)


def verify_inverse_semigroup(table, labels=None, exhaustive_inverses=False) -> InverseSemigroup:
    """Validate a Cayley table and return the inverse semigroup.

    Raises NonAssociative, NoInverse or IdempotentsDontCommute naming the
    first violated law.  With exhaustive_inverses=True, uniqueness of
    inverses is rechecked by brute force instead of relying on idempotent
    commutativity.
    """
    n = len(table)
    for a, row in enumerate(table):
        if len(row) != n:
            raise IsgError(f"row {a} has length {len(row)}, expected {n}")
        for b, v in enumerate(row):
            if not (0 <= v < n):
                raise IsgError(f"entry table[{a}][{b}] = {v} out of range")

    for a in range(n):
        for b in range(n):
            ab = table[a][b]
            for c in range(n):
                if table[ab][c] != table[a][table[b][c]]:
                    raise NonAssociative(a, b, c)

    inv = [-1] * n
    for a in range(n):
        for b in range(n):
            if table[table[a][b]][a] == a and table[table[b][a]][b] == b:
                inv[a] = b
                break
        if inv[a] < 0:
            raise NoInverse(a)

    idem = [e for e in range(n) if table[e][e] == e]
    for e, f in combinations(idem, 2):
        if table[e][f] != table[f][e]:
            raise IdempotentsDontCommute(e, f)

    if exhaustive_inverses:
        for a in range(n):
            candidates = [b for b in range(n)
                          if table[table[a][b]][a] == a and table[table[b][a]][b] == b]
            if len(candidates) != 1:
                raise NoInverse(a)

    return InverseSemigroup(table, inv, idem, labels)


class IsgHomomorphism:
    """A semigroup homomorphism given by an element array."""

    def __init__(self, source: InverseSemigroup, target: InverseSemigroup, map_):
        self.source = source
        self.target = target
        self.map = list(map_)
        for a in source.elements():
            for b in source.elements():
                lhs = self.map[source.mul(a, b)]
                rhs = target.mul(self.map[a], self.map[b])
                if lhs != rhs:
                    raise IsgError(f"not a homomorphism at ({a}, {b})")

    def __call__(self, a: int) -> int:
        return self.map[a]

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.n


def is_essentially_injective(phi: IsgHomomorphism) -> bool:
    """True iff phi(t) idempotent implies t idempotent."""
    for t in phi.source.elements():
        if phi.target.is_idempotent(phi(t)) and not phi.source.is_idempotent(t):
            return False
    return True


def partial_injections(k: int):
    """All partial injective maps on {0..k-1}, as dicts."""
    maps = []
    points = range(k)
    for size in range(k + 1):
        for dom in combinations(points, size):
            for ran in permutations(points, size):
                maps.append(dict(zip(dom, ran)))
    return maps


def symmetric_inverse_monoid(k: int) -> InverseSemigroup:
    """The monoid I_k of all partial injections on k points."""
    if not 1 <= k <= 4:
        raise TooLarge(f"k={k} outside supported range 1..4")
    maps = partial_injections(k)
    key = {tuple(sorted(m.items())): i for i, m in enumerate(maps)}

    def compose(f, g):
        # f after g, maximal domain
        return {x: f[y] for x, y in g.items() if y in f}

    n = len(maps)
    table = [[key[tuple(sorted(compose(maps[a], maps[b]).items()))] for b in range(n)]
             for a in range(n)]
    labels = ["{" + ",".join(f"{x}>{y}" for x, y in sorted(m.items())) + "}" for m in maps]
    return verify_inverse_semigroup(table, labels=labels)


def sub_semigroup(S: InverseSemigroup, generators) -> tuple[InverseSemigroup, list[int]]:
    """Closure of generator indices under product and involution.

    Returns the closed subsemigroup (re-indexed) and the list of original
    indices in the new order.
    """
    closed = set(generators)
    frontier = list(closed)
    while frontier:
        nxt = []
        for a in frontier:
            b = S.inv[a]
            if b not in closed:
                closed.add(b)
                nxt.append(b)
        for a in list(closed):
            for b in list(closed):
                c = S.table[a][b]
                if c not in closed:
                    closed.add(c)
                    nxt.append(c)
        frontier = nxt
    order = sorted(closed)
    pos = {a: i for i, a in enumerate(order)}
    table = [[pos[S.table[a][b]] for b in order] for a in order]
    labels = [S.labels[a] for a in order]
    return verify_inverse_semigroup(table, labels=labels), order
