"""Semi-abelian Fell bundles over finite inverse semigroups.

Two realizations share one interface: ActionBundle (fibers are functions
on the carriers of a twisted action) and SectionBundle (fibers are
functions on bisections of a twisted groupoid).  Fiber elements are
CFunctions on the fiber's carrier set.
"""

from __future__ import annotations

from fellsem.angles import Angle, as_angle, as_complex, scalar_conj, scalar_mul
from fellsem.isg import InverseSemigroup
from fellsem.partial_maps import CFunction
from fellsem.action import TwistedAction


class BundleError(ValueError):
    pass


class NotSaturated(BundleError):
    pass


class NotSemiAbelian(BundleError):
    pass


class BadMultiplierFamily(BundleError):
    pass


def _smul(*factors):
    """Product of scalars, exact while every factor is an Angle; zero wins."""
    acc = Angle(0)
    for f in factors:
        if f == 0:
            return 0
        if isinstance(acc, Angle) and isinstance(f, Angle):
            acc = acc * f
        else:
            acc = as_complex(acc) * as_complex(f)
    return acc


class ActionBundle:
    """The bundle of a twisted action: fiber over s is functions on U(ss*).

    Product:    (f.g)(y) = f(y) g(theta_s^{-1} y) omega(s,t)(y)
    Involution: f*(x)    = conj(f(theta_s x)) conj(omega(s*,s)(x))
    Inclusion:  j(t,s)(f)(y) = f(y) conj(omega(t, s*s)(y)), zero-extended.
    """

    realization = "action"

    def __init__(self, A: TwistedAction):
        self.A = A
        self.S = A.S

    def carrier(self, s: int) -> frozenset:
        return self.A.carrier(s)

    def mul(self, s: int, t: int, f: CFunction, g: CFunction) -> CFunction:
        A = self.A
        st = self.S.mul(s, t)
        inv_s = A.theta[s].invert()
        vals = {}
        for y in self.carrier(st):
            v = _smul(f(y), g(inv_s(y)), A.omega[(s, t)](y))
            if v != 0:
                vals[y] = v
        return CFunction(self.carrier(st), vals)

    def star(self, s: int, f: CFunction) -> CFunction:
        A = self.A
        ss = self.S.inv[s]
        w = A.omega[(ss, s)]
        vals = {}
        for x in self.carrier(ss):
            v = _smul(scalar_conj(f(A.theta[s](x))), scalar_conj(w(x)))
            if v != 0:
                vals[x] = v
        return CFunction(self.carrier(ss), vals)

    def include(self, t: int, s: int, f: CFunction) -> CFunction:
        S = self.S
        if not S.leq(s, t):
            raise BundleError(f"{S.label(s)} is not below {S.label(t)}")
        w = self.A.omega[(t, S.mul(S.inv[s], s))]
        vals = {}
        for y in self.carrier(s):
            v = _smul(f(y), scalar_conj(w(y)))
            if v != 0:
                vals[y] = v
        return CFunction(self.carrier(t), vals)


class SectionBundle:
    """The bundle of compactly supported sections over a twisted groupoid.

    The fiber over a bisection s is functions on its arrow set (optionally
    shrunk by a carrier override, which models non-saturated bundles).
    Operations are twisted convolution; inclusions are zero-extensions.
    """

    realization = "section"

    def __init__(self, G, tau, S: InverseSemigroup, bisections, carriers=None):
        self.G = G
        self.tau = tau
        self.S = S
        self.bisections = list(bisections)
        self._carriers = {}
        for s in S.elements():
            full = frozenset(self.bisections[s])
            c = frozenset(carriers[s]) if carriers and s in carriers else full
            if not c <= full:
                raise BundleError("carrier override exceeds bisection")
            self._carriers[s] = c

    def carrier(self, s: int) -> frozenset:
        return self._carriers[s]

    def mul(self, s: int, t: int, f: CFunction, g: CFunction) -> CFunction:
        G = self.G
        st = self.S.mul(s, t)
        target = self.carrier(st)
        vals = {}
        for a in self.carrier(s):
            for b in self.carrier(t):
                if not G.composable(a, b):
                    continue
                c = G.mul(a, b)
                v = _smul(f(a), g(b), self.tau(a, b))
                if v == 0 or c not in target:
                    continue
                vals[c] = _sadd(vals.get(c, 0), v)
        return CFunction(target, {k: v for k, v in vals.items() if v != 0})

    def star(self, s: int, f: CFunction) -> CFunction:
        G = self.G
        ss = self.S.inv[s]
        vals = {}
        for c in self.carrier(ss):
            ci = G.inv[c]
            v = _smul(scalar_conj(f(ci)), scalar_conj(self.tau(ci, c)))
            if v != 0:
                vals[c] = v
        return CFunction(self.carrier(ss), vals)

    def include(self, t: int, s: int, f: CFunction) -> CFunction:
        if not self.S.leq(s, t):
            raise BundleError(f"{self.S.label(s)} is not below {self.S.label(t)}")
        return f.restrict(self.carrier(s)).extend(self.carrier(t))


def _sadd(a, b):
    if a == 0:
        return b
    if b == 0:
        return a
    if isinstance(a, Angle) and isinstance(b, Angle) and a.frac == b.frac:
        return as_complex(a) + as_complex(b)
    return as_complex(a) + as_complex(b)


# ---------------------------------------------------------------------------

def build_bundle(A: TwistedAction) -> ActionBundle:
    return ActionBundle(A)


def random_element(B, s: int, rng) -> CFunction:
    c = B.carrier(s)
    return CFunction(c, {x: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for x in c})


def verify_fell_bundle(B, tol: float = 1e-9, samples: int = 3, rng=None):
    """Check the bundle axioms on point masses plus random dense elements.

    All operations are bilinear or conjugate-linear, so point-mass
    equality extends to the whole fiber; random elements additionally
    exercise linearity itself.  Returns (ok, violations).
    """
    import random as _random
    rng = rng or _random.Random(0)
    S = B.S
    bad = []

    def pms(s):
        return [CFunction.point_mass(B.carrier(s), x) for x in B.carrier(s)]

    def close(f: CFunction, g: CFunction) -> bool:
        if f.carrier != g.carrier:
            return False
        return all(abs(f.at(x) - g.at(x)) <= tol for x in f.carrier)

    # product lands in the stated fiber with the right carrier
    for s in S.elements():
        for t in S.elements():
            st = S.mul(s, t)
            for f in pms(s):
                for g in pms(t):
                    h = B.mul(s, t, f, g)
                    if h.carrier != B.carrier(st):
                        bad.append(("product-fiber", (S.label(s), S.label(t))))

    # bilinearity on random elements
    for s in S.elements():
        for t in S.elements():
            for _ in range(samples):
                f1, f2 = random_element(B, s, rng), random_element(B, s, rng)
                g = random_element(B, t, rng)
                lam = complex(rng.gauss(0, 1), rng.gauss(0, 1))
                lhs = B.mul(s, t, f1.scale(lam).add(f2), g)
                rhs = B.mul(s, t, f1, g).scale(lam).add(B.mul(s, t, f2, g))
                if not close(lhs, rhs):
                    bad.append(("left-linearity", (S.label(s), S.label(t))))
                h1, h2 = random_element(B, t, rng), random_element(B, t, rng)
                e = random_element(B, s, rng)
                lhs = B.mul(s, t, e, h1.scale(lam).add(h2))
                rhs = B.mul(s, t, e, h1).scale(lam).add(B.mul(s, t, e, h2))
                if not close(lhs, rhs):
                    bad.append(("right-linearity", (S.label(s), S.label(t))))

    # associativity on point masses
    for r in S.elements():
        for s in S.elements():
            rs = S.mul(r, s)
            for t in S.elements():
                st = S.mul(s, t)
                for f in pms(r):
                    for g in pms(s):
                        for h in pms(t):
                            lhs = B.mul(rs, t, B.mul(r, s, f, g), h)
                            rhs = B.mul(r, st, f, B.mul(s, t, g, h))
                            if not close(lhs, rhs):
                                bad.append(("associativity",
                                            (S.label(r), S.label(s), S.label(t))))

    # norm submultiplicativity on random elements
    for s in S.elements():
        for t in S.elements():
            for _ in range(samples):
                f, g = random_element(B, s, rng), random_element(B, t, rng)
                if B.mul(s, t, f, g).sup_norm() > f.sup_norm() * g.sup_norm() + tol:
                    bad.append(("submultiplicative", (S.label(s), S.label(t))))

    # involution: involutive, isometric, conjugate-linear, anti-multiplicative
    for s in S.elements():
        ss = S.inv[s]
        for _ in range(samples):
            f = random_element(B, s, rng)
            if not close(B.star(ss, B.star(s, f)), f):
                bad.append(("involutive", S.label(s)))
            if abs(B.star(s, f).sup_norm() - f.sup_norm()) > tol:
                bad.append(("star-isometric", S.label(s)))
            g = random_element(B, s, rng)
            lam = complex(rng.gauss(0, 1), rng.gauss(0, 1))
            lhs = B.star(s, f.scale(lam).add(g))
            rhs = B.star(s, f).scale(lam.conjugate()).add(B.star(s, g))
            if not close(lhs, rhs):
                bad.append(("conjugate-linear", S.label(s)))
    for s in S.elements():
        for t in S.elements():
            st = S.mul(s, t)
            for f in pms(s):
                for g in pms(t):
                    lhs = B.star(st, B.mul(s, t, f, g))
                    rhs = B.mul(S.inv[t], S.inv[s], B.star(t, g), B.star(s, f))
                    if not close(lhs, rhs):
                        bad.append(("anti-multiplicative", (S.label(s), S.label(t))))

    # C*-identity and positivity of f* f
    for s in S.elements():
        ss = S.inv[s]
        for _ in range(samples):
            f = random_element(B, s, rng)
            p = B.mul(ss, s, B.star(s, f), f)
            if abs(p.sup_norm() - f.sup_norm() ** 2) > tol * max(1.0, f.sup_norm() ** 2):
                bad.append(("cstar-identity", S.label(s)))
            for x in p.carrier:
                v = p.at(x)
                if abs(v.imag) > tol or v.real < -tol:
                    bad.append(("positivity", (S.label(s), x)))

    # inclusions: identity at s=s, isometric, injective, functorial
    for s in S.elements():
        for t in S.elements():
            if not S.leq(s, t):
                continue
            for f in pms(s):
                jf = B.include(t, s, f)
                if abs(jf.sup_norm() - f.sup_norm()) > tol:
                    bad.append(("inclusion-isometric", (S.label(s), S.label(t))))
            if s == t:
                g = random_element(B, s, rng)
                if not close(B.include(s, s, g), g):
                    bad.append(("inclusion-identity", S.label(s)))
            for r in S.elements():
                if not S.leq(r, s):
                    continue
                for f in pms(r):
                    lhs = B.include(t, s, B.include(s, r, f))
                    rhs = B.include(t, r, f)
                    if not close(lhs, rhs):
                        bad.append(("inclusion-functorial",
                                    (S.label(r), S.label(s), S.label(t))))

    # inclusions against involution and product (both reduced forms)
    for s in S.elements():
        for t in S.elements():
            if not S.leq(s, t):
                continue
            for f in pms(s):
                lhs = B.star(t, B.include(t, s, f))
                rhs = B.include(S.inv[t], S.inv[s], B.star(s, f))
                if not close(lhs, rhs):
                    bad.append(("inclusion-star", (S.label(s), S.label(t))))
            for u in S.elements():
                su, tu = S.mul(s, u), S.mul(t, u)
                us, ut = S.mul(u, s), S.mul(u, t)
                for f in pms(s):
                    for g in pms(u):
                        lhs = B.mul(t, u, B.include(t, s, f), g)
                        rhs = B.include(tu, su, B.mul(s, u, f, g))
                        if not close(lhs, rhs):
                            bad.append(("inclusion-product-left",
                                        (S.label(s), S.label(t), S.label(u))))
                        lhs = B.mul(u, t, g, B.include(t, s, f))
                        rhs = B.include(ut, us, B.mul(u, s, g, f))
                        if not close(lhs, rhs):
                            bad.append(("inclusion-product-right",
                                        (S.label(s), S.label(t), S.label(u))))

    return not bad, bad


def classify_bundle(B, tol: float = 1e-9):
    """Report saturation, semi-abelianness, and fiberwise regularity.

    Regularity of a commutative-model fiber means the constant-one
    function is a two-sided generating multiplier; the witness family is
    returned when every fiber is regular.
    """
    S = B.S
    saturated = True
    unsat = []
    for s in S.elements():
        for t in S.elements():
            st = S.mul(s, t)
            covered = set()
            for x in B.carrier(s):
                f = CFunction.point_mass(B.carrier(s), x)
                for y in B.carrier(t):
                    covered |= B.mul(s, t, f, CFunction.point_mass(B.carrier(t), y)).support()
            if covered != B.carrier(st):
                saturated = False
                unsat.append((S.label(s), S.label(t)))

    semi_abelian = True
    for e in S.idem:
        for x in B.carrier(e):
            for y in B.carrier(e):
                f = CFunction.point_mass(B.carrier(e), x)
                g = CFunction.point_mass(B.carrier(e), y)
                fg, gf = B.mul(e, e, f, g), B.mul(e, e, g, f)
                if any(abs(fg.at(z) - gf.at(z)) > tol for z in fg.carrier):
                    semi_abelian = False

    witness = canonical_multipliers(B)
    regular = {}
    for s in S.elements():
        ss_, s_s = S.mul(s, S.inv[s]), S.mul(S.inv[s], s)
        u = witness[s]
        left = set()
        for x in B.carrier(s_s):
            left |= B.mul(s, s_s, u, CFunction.point_mass(B.carrier(s_s), x)).support()
        right = set()
        for x in B.carrier(ss_):
            right |= B.mul(ss_, s, CFunction.point_mass(B.carrier(ss_), x), u).support()
        regular[S.label(s)] = (left == B.carrier(s) and right == B.carrier(s))

    return {
        "saturated": saturated,
        "unsaturated_pairs": unsat,
        "semi_abelian": semi_abelian,
        "regular": regular,
        "witness": witness if all(regular.values()) else None,
    }


def canonical_multipliers(B) -> dict:
    """The constant-one unitary multiplier family."""
    return {s: CFunction.one(B.carrier(s)) for s in B.S.elements()}


def check_multiplier_family(B, u) -> None:
    S = B.S
    for s in S.elements():
        f = u[s]
        if f.carrier != B.carrier(s) or not f.is_unit_modulus():
            raise BadMultiplierFamily(f"u[{S.label(s)}] is not unit modulus")
    for e in S.idem:
        for x in u[e].carrier:
            if u[e](x) != 1:
                raise BadMultiplierFamily(f"u at idempotent {S.label(e)} is not one")


def extract_action(B, u) -> TwistedAction:
    """Read the twisted action back off a saturated semi-abelian bundle.

    theta_s comes from the support bijection of conjugation by u_s;
    omega(s, t) is the coordinate function of u_s u_t u_{st}*.
    """
    from fellsem.partial_maps import PartialBijection

    S = B.S
    info = classify_bundle(B)
    if not info["saturated"]:
        raise NotSaturated(str(info["unsaturated_pairs"]))
    if not info["semi_abelian"]:
        raise NotSemiAbelian("an idempotent fiber is noncommutative")
    check_multiplier_family(B, u)

    X = sorted(set().union(*(B.carrier(e) for e in S.idem)), key=str)
    U = {s: B.carrier(S.mul(s, S.inv[s])) for s in S.elements()}

    theta = {}
    for s in S.elements():
        ss = S.inv[s]
        dom = B.carrier(S.mul(ss, s))
        mapping = {}
        for x in dom:
            a = B.mul(s, S.mul(ss, s), u[s], CFunction.point_mass(dom, x))
            b = B.mul(s, ss, a, B.star(s, u[s]))
            supp = b.support()
            if len(supp) != 1:
                raise BundleError("conjugation by the multiplier is not point-to-point")
            mapping[x] = next(iter(supp))
        theta[s] = PartialBijection(mapping)

    omega = {}
    for s in S.elements():
        for t in S.elements():
            st = S.mul(s, t)
            m = B.mul(s, t, u[s], u[t])
            w = B.mul(st, S.inv[st], m, B.star(st, u[st]))
            vals = {}
            for y in w.carrier:
                v = w(y)
                if v == 0:
                    raise BundleError("multiplier coordinate vanishes")
                vals[y] = as_angle(v) if isinstance(v, Angle) else v
            omega[(s, t)] = CFunction(w.carrier, vals)
    return TwistedAction(S, X, U, theta, omega)


def roundtrip_check(A: TwistedAction):
    """Build the bundle, extract with the canonical family, compare exactly."""
    B = build_bundle(A)
    A2 = extract_action(B, canonical_multipliers(B))
    ok = A.equals(A2)
    diff = None
    if not ok:
        diff = []
        for s in A.S.elements():
            if A.theta[s] != A2.theta[s]:
                diff.append(("theta", A.S.label(s)))
        for key, w in A.omega.items():
            if not w.equals(A2.omega[key]):
                diff.append(("omega", (A.S.label(key[0]), A.S.label(key[1]))))
    return ok, diff
