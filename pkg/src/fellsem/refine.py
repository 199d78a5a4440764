"""Morphisms and refinements of semi-abelian bundles.

The saturated refinement of a bundle A over S lives over the inverse
semigroup of pairs (s, V) where V is a carrier subset reachable from the
full carriers by products and involutions; the fiber over (s, V) is the
functions supported on V inside the fiber of A over s.  Products in the
refined bundle land exactly on their carriers, so the result is saturated
by construction.
"""

from __future__ import annotations

from fellsem.angles import as_complex, scalar_conj, scalar_mul
from fellsem.isg import InverseSemigroup, IsgHomomorphism, is_essentially_injective, verify_inverse_semigroup
from fellsem.partial_maps import CFunction
from fellsem.bundle import (NotSaturated, canonical_multipliers, classify_bundle,
                            extract_action)


class RefineError(ValueError):
    pass


def _pm(carrier, x):
    return CFunction.point_mass(carrier, x)


def _prod_carrier(A, s, t, V, W) -> frozenset:
    supp = set()
    for x in V:
        f = _pm(A.carrier(s), x)
        for y in W:
            supp |= A.mul(s, t, f, _pm(A.carrier(t), y)).support()
    return frozenset(supp)


def _star_carrier(A, s, V) -> frozenset:
    supp = set()
    for x in V:
        supp |= A.star(s, _pm(A.carrier(s), x)).support()
    return frozenset(supp)


class RefinedBundle:
    """The saturated refinement of a base bundle, over the pair semigroup."""

    realization = "refined"

    def __init__(self, base):
        self.base = base
        baseS = base.S
        pairs = {(s, base.carrier(s)) for s in baseS.elements()}
        frontier = list(pairs)
        while frontier:
            nxt = []
            for (s, V) in frontier:
                p = (baseS.inv[s], _star_carrier(base, s, V))
                if p not in pairs:
                    pairs.add(p)
                    nxt.append(p)
            for (s, V) in list(pairs):
                for (t, W) in list(pairs):
                    p = (baseS.mul(s, t), _prod_carrier(base, s, t, V, W))
                    if p not in pairs:
                        pairs.add(p)
                        nxt.append(p)
            frontier = nxt
        self.pairs = sorted(pairs, key=lambda p: (p[0], sorted(p[1], key=str)))
        pos = {p: i for i, p in enumerate(self.pairs)}
        table = []
        for (s, V) in self.pairs:
            row = []
            for (t, W) in self.pairs:
                row.append(pos[(baseS.mul(s, t), _prod_carrier(base, s, t, V, W))])
            table.append(row)
        labels = [f"({baseS.label(s)}|{','.join(sorted(map(str, V)))})" for (s, V) in self.pairs]
        self.S = verify_inverse_semigroup(table, labels=labels)
        self.phi = [s for (s, _) in self.pairs]

    def carrier(self, i: int) -> frozenset:
        return self.pairs[i][1]

    def _lift(self, i: int, f: CFunction) -> CFunction:
        s = self.phi[i]
        return f.extend(self.base.carrier(s))

    def mul(self, i: int, j: int, f: CFunction, g: CFunction) -> CFunction:
        k = self.S.mul(i, j)
        out = self.base.mul(self.phi[i], self.phi[j], self._lift(i, f), self._lift(j, g))
        return out.restrict(self.carrier(k))

    def star(self, i: int, f: CFunction) -> CFunction:
        out = self.base.star(self.phi[i], self._lift(i, f))
        return out.restrict(self.carrier(self.S.inv[i]))

    def include(self, j: int, i: int, f: CFunction) -> CFunction:
        out = self.base.include(self.phi[j], self.phi[i], self._lift(i, f))
        return out.restrict(self.carrier(i)).extend(self.carrier(j))


class BundleMorphism:
    """phi on the index semigroups plus fiberwise carrier injections,
    optionally twisted by unit-modulus weight functions."""

    def __init__(self, B, A, phi: IsgHomomorphism, weights=None):
        self.B = B
        self.A = A
        self.phi = phi
        self.weights = weights or {}

    def psi(self, i: int, f: CFunction) -> CFunction:
        s = self.phi(i)
        w = self.weights.get(i)
        if w is not None:
            vals = {x: scalar_mul(f(x), w(x)) for x in f.values}
            f = CFunction(f.carrier, vals)
        return f.extend(self.A.carrier(s))


def refinement_morphism(B: RefinedBundle) -> BundleMorphism:
    phi = IsgHomomorphism(B.S, B.base.S, B.phi)
    return BundleMorphism(B, B.base, phi)


def saturated_refinement(A):
    """Build the pair-semigroup refinement of a bundle and its morphism."""
    B = RefinedBundle(A)
    return B, refinement_morphism(B)


def verify_morphism(m: BundleMorphism, tol: float = 1e-9):
    """Multiplicativity, *-preservation and the inclusion square, on point
    masses of every fiber of B."""
    B, A = m.B, m.A
    T, S = B.S, A.S
    bad = []

    def close(f, g):
        if f.carrier != g.carrier:
            return False
        return all(abs(f.at(x) - g.at(x)) <= tol for x in f.carrier)

    for i in T.elements():
        for j in T.elements():
            k = T.mul(i, j)
            for x in B.carrier(i):
                f = _pm(B.carrier(i), x)
                for y in B.carrier(j):
                    g = _pm(B.carrier(j), y)
                    lhs = m.psi(k, B.mul(i, j, f, g))
                    rhs = A.mul(m.phi(i), m.phi(j), m.psi(i, f), m.psi(j, g))
                    if not close(lhs, rhs):
                        bad.append(("multiplicative", (T.label(i), T.label(j), x, y)))
    for i in T.elements():
        for x in B.carrier(i):
            f = _pm(B.carrier(i), x)
            lhs = m.psi(T.inv[i], B.star(i, f))
            rhs = A.star(m.phi(i), m.psi(i, f))
            if not close(lhs, rhs):
                bad.append(("star", (T.label(i), x)))
    for i in T.elements():
        for j in T.elements():
            if not T.leq(i, j):
                continue
            for x in B.carrier(i):
                f = _pm(B.carrier(i), x)
                lhs = m.psi(j, B.include(j, i, f))
                rhs = A.include(m.phi(j), m.phi(i), m.psi(i, f))
                if not close(lhs, rhs):
                    bad.append(("inclusion", (T.label(i), T.label(j), x)))
    return not bad, bad


def verify_refinement(m: BundleMorphism, tol: float = 1e-9):
    """Morphism axioms plus surjectivity, essential injectivity, fiberwise
    injectivity, the span condition, and the idempotent-ideal consistency
    check."""
    ok, bad = verify_morphism(m, tol)
    bad = list(bad)
    B, A = m.B, m.A
    T, S = B.S, A.S

    if not m.phi.is_surjective:
        bad.append(("not-surjective", None))
    if not is_essentially_injective(m.phi):
        bad.append(("not-essentially-injective", None))

    for i in T.elements():
        for x in B.carrier(i):
            if not m.psi(i, _pm(B.carrier(i), x)).support():
                bad.append(("fiber-not-injective", (T.label(i), x)))

    for s in S.elements():
        covered = set()
        for i in T.elements():
            if m.phi(i) == s:
                for x in B.carrier(i):
                    covered |= m.psi(i, _pm(B.carrier(i), x)).support()
        if covered != A.carrier(s):
            bad.append(("span-deficit", S.label(s)))

    # images of idempotent fibers are ideals of the target idempotent fiber
    for i in T.elements():
        if not T.is_idempotent(i):
            continue
        e = m.phi(i)
        image = set()
        for x in B.carrier(i):
            image |= m.psi(i, _pm(B.carrier(i), x)).support()
        for x in A.carrier(e):
            f = _pm(A.carrier(e), x)
            for y in image:
                prod = A.mul(e, e, f, _pm(A.carrier(e), y))
                if not prod.support() <= image:
                    bad.append(("not-an-ideal", (T.label(i), x, y)))
    return not bad, bad


# ---------------------------------------------------------------------------
# preservation of germ data and algebras

def _germ_data(bundle):
    from fellsem.action import germ_groupoid
    act = extract_action(bundle, canonical_multipliers(bundle))
    return act, germ_groupoid(act)


def germ_preservation_check(m: BundleMorphism):
    """The germ map [t, x] -> [phi(t), x] between the germ groupoids of the
    refined and base bundles: well-defined, bijective, structure-preserving.
    Both bundles must be saturated."""
    B, A = m.B, m.A
    for bundle, name in ((B, "refined"), (A, "base")):
        if not classify_bundle(bundle)["saturated"]:
            raise NotSaturated(f"{name} bundle is not saturated")
    actB, GB = _germ_data(B)
    actA, GA = _germ_data(A)

    mapping = {}
    for g in range(GB.arrow_count):
        images = {GA.germ(m.phi(t), x) for (t, x) in GB.germs[g]["members"]}
        if len(images) != 1:
            return False, ("not-well-defined", g), (GB, GA)
        mapping[g] = images.pop()

    if len(set(mapping.values())) != GB.arrow_count or GB.arrow_count != GA.arrow_count:
        return False, ("arrow-count", GB.arrow_count, GA.arrow_count), (GB, GA)
    for g in range(GB.arrow_count):
        if GB.src(g) != GA.src(mapping[g]) or GB.rng(g) != GA.rng(mapping[g]):
            return False, ("endpoints", g), (GB, GA)
        for h in range(GB.arrow_count):
            if GB.rng(h) != GB.src(g):
                continue
            if mapping[GB.compose(g, h)] != GA.compose(mapping[g], mapping[h]):
                return False, ("composition", (g, h)), (GB, GA)
    return True, mapping, (GB, GA)


def algebra_preservation_check(m: BundleMorphism, tol: float = 1e-9):
    """Dimension, block profile, and structure-constant transport between
    the germ algebras of the refined and base bundles."""
    from fellsem.algebra import block_decompose, germ_algebra

    ok, mapping, (GB, GA) = germ_preservation_check(m)
    if not ok:
        return {"ok": False, "reason": ("germ", mapping)}
    algB = germ_algebra(GB.A, GB)
    algA = germ_algebra(GA.A, GA)
    report = {"ok": True,
              "dim_refined": algB.n, "dim_base": algA.n,
              "blocks_refined": block_decompose(algB),
              "blocks_base": block_decompose(algA)}
    if algB.n != algA.n or report["blocks_refined"] != report["blocks_base"]:
        report["ok"] = False
        return report

    # transport: the refined basis element g corresponds to d_g times the
    # base basis element, d_g the base-side coordinate change at the germ
    d = {}
    for g in range(GB.arrow_count):
        tB0, x = GB.rep(g)
        tA0, _ = GA.rep(mapping[g])
        d[g] = as_complex(GA.transition(m.phi(tB0), tA0, x))

    mismatches = []
    for g in range(GB.arrow_count):
        for h in range(GB.arrow_count):
            termsB = algB.mul[(g, h)]
            termsA = algA.mul[(mapping[g], mapping[h])]
            if not termsB and not termsA:
                continue
            (k, cB), = termsB
            (K, cA), = termsA
            if K != mapping[k] or abs(d[g] * d[h] * cA - cB * d[k]) > tol:
                mismatches.append(("product", (g, h)))
    for g in range(GB.arrow_count):
        gs = algB.star_index[g]
        if mapping[gs] != algA.star_index[mapping[g]]:
            mismatches.append(("star-index", g))
            continue
        lhs = complex(d[g]).conjugate() * algA.star_coeff[mapping[g]]
        rhs = algB.star_coeff[g] * d[gs]
        if abs(lhs - rhs) > tol:
            mismatches.append(("star-coeff", g))
    if mismatches:
        report["ok"] = False
        report["mismatches"] = mismatches
    return report
