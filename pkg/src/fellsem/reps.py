"""Covariant representations and bundle representations on matrices.

The regular covariant representation of a cocycle action lives on the
arrow space of the groupoid: functions on the unit space act diagonally
through the range map, and each bisection acts by twisted left translation.
"""

from __future__ import annotations

import numpy as np

from fellsem.angles import as_complex
from fellsem.action import TwistedAction
from fellsem.partial_maps import CFunction


class RepError(ValueError):
    pass


class CovariantRep:
    """(rho, v): rho maps point masses on X to d-by-d matrices, v maps
    semigroup elements to partial isometries."""

    def __init__(self, d: int, rho: dict, v: dict):
        self.d = d
        self.rho = {x: np.asarray(m, dtype=complex) for x, m in rho.items()}
        self.v = {s: np.asarray(m, dtype=complex) for s, m in v.items()}

    def rho_of(self, f: CFunction):
        out = np.zeros((self.d, self.d), dtype=complex)
        for x in f.carrier:
            val = f.at(x)
            if val != 0:
                out += val * self.rho[x]
        return out


class BundleRep:
    """pi maps fiber point masses to matrices, extended linearly."""

    def __init__(self, d: int, mats: dict):
        self.d = d
        self.mats = {key: np.asarray(m, dtype=complex) for key, m in mats.items()}

    def pi(self, s: int, f: CFunction):
        out = np.zeros((self.d, self.d), dtype=complex)
        for x in f.carrier:
            val = f.at(x)
            if val != 0:
                out += val * self.mats[(s, x)]
        return out


def regular_covariant_rep(G, tau, S, bisections) -> CovariantRep:
    """Left translation on the arrow space, twisted by the cocycle.

    rho(point mass at object x) is the diagonal projection onto arrows
    with range x; v_s has entry tau(a, c) in position (ac, c) for each
    a in the bisection of s composable with c.
    """
    d = G.m
    rho = {}
    for x in G.objects:
        m = np.zeros((d, d), dtype=complex)
        for c in G.arrows():
            if G.rng[c] == x:
                m[c, c] = 1
        rho[x] = m
    v = {}
    for s in S.elements():
        m = np.zeros((d, d), dtype=complex)
        for a in bisections[s]:
            for c in G.arrows():
                if G.composable(a, c):
                    m[G.mul(a, c), c] = as_complex(tau(a, c))
        v[s] = m
    return CovariantRep(d, rho, v)


def verify_covariant(R: CovariantRep, A: TwistedAction, tol: float = 1e-9):
    """The three covariance axioms, on point masses.

    (i) conjugation by v_s implements the action, (ii) v_s v_t v_{st}*
    represents omega(s, t), (iii) v_s* v_s and v_s v_s* are the images of
    the domain and range indicator functions.
    """
    S = A.S
    bad = []

    def close(a, b):
        return np.linalg.norm(a - b) <= tol * max(1.0, np.linalg.norm(b))

    for s in S.elements():
        vs = R.v[s]
        dom = A.U[S.mul(S.inv[s], s)]
        for x in dom:
            lhs = R.rho[A.theta[s](x)]
            rhs = vs @ R.rho[x] @ vs.conj().T
            if not close(rhs, lhs):
                bad.append(("conjugation", (S.label(s), x)))
    for s in S.elements():
        for t in S.elements():
            st = S.mul(s, t)
            lhs = R.rho_of(A.omega[(s, t)])
            rhs = R.v[s] @ R.v[t] @ R.v[st].conj().T
            if not close(rhs, lhs):
                bad.append(("cocycle", (S.label(s), S.label(t))))
    for s in S.elements():
        vs = R.v[s]
        dom = R.rho_of(CFunction.one(A.U[S.mul(S.inv[s], s)]))
        ran = R.rho_of(CFunction.one(A.carrier(s)))
        if not close(vs.conj().T @ vs, dom):
            bad.append(("domain-projection", S.label(s)))
        if not close(vs @ vs.conj().T, ran):
            bad.append(("range-projection", S.label(s)))
    return not bad, bad


def _to_object(B, x):
    # section-bundle fiber points are arrows; the action point is the range
    return B.G.rng[x] if B.realization == "section" else x


def to_bundle_rep(R: CovariantRep, B) -> BundleRep:
    """pi_s(f delta_s) = rho(f) v_s on point masses."""
    mats = {}
    for s in B.S.elements():
        for x in B.carrier(s):
            mats[(s, x)] = R.rho[_to_object(B, x)] @ R.v[s]
    return BundleRep(R.d, mats)


def to_covariant(pi: BundleRep, B, A: TwistedAction) -> CovariantRep:
    """rho from the idempotent fibers, v_s = pi of the constant one over s."""
    S = A.S
    rho = {}
    for x in A.X:
        for e in S.idem:
            hits = [p for p in B.carrier(e) if _to_object(B, p) == x]
            if hits:
                rho[x] = pi.mats[(e, hits[0])]
                break
        else:
            raise RepError(f"point {x} is not in any idempotent carrier")
    v = {s: pi.pi(s, CFunction.one(B.carrier(s))) for s in S.elements()}
    return CovariantRep(pi.d, rho, v)


def verify_representation(pi: BundleRep, B, tol: float = 1e-9):
    """Multiplicativity, *-compatibility and inclusion-compatibility on
    point masses."""
    S = B.S
    bad = []

    def close(a, b):
        return np.linalg.norm(a - b) <= tol * max(1.0, np.linalg.norm(b))

    for s in S.elements():
        for t in S.elements():
            st = S.mul(s, t)
            for x in B.carrier(s):
                f = CFunction.point_mass(B.carrier(s), x)
                for y in B.carrier(t):
                    g = CFunction.point_mass(B.carrier(t), y)
                    lhs = pi.pi(s, f) @ pi.pi(t, g)
                    rhs = pi.pi(st, B.mul(s, t, f, g))
                    if not close(lhs, rhs):
                        bad.append(("multiplicative", (S.label(s), S.label(t), x, y)))
    for s in S.elements():
        for x in B.carrier(s):
            f = CFunction.point_mass(B.carrier(s), x)
            lhs = pi.pi(s, f).conj().T
            rhs = pi.pi(S.inv[s], B.star(s, f))
            if not close(lhs, rhs):
                bad.append(("star", (S.label(s), x)))
    for s in S.elements():
        for t in S.elements():
            if not S.leq(s, t):
                continue
            for x in B.carrier(s):
                f = CFunction.point_mass(B.carrier(s), x)
                lhs = pi.pi(t, B.include(t, s, f))
                rhs = pi.pi(s, f)
                if not close(lhs, rhs):
                    bad.append(("inclusion", (S.label(s), S.label(t), x)))
    return not bad, bad


def reps_equal(R1: CovariantRep, R2: CovariantRep, tol: float = 1e-9) -> bool:
    if R1.d != R2.d or set(R1.rho) != set(R2.rho) or set(R1.v) != set(R2.v):
        return False
    for x in R1.rho:
        if np.linalg.norm(R1.rho[x] - R2.rho[x]) > tol:
            return False
    for s in R1.v:
        if np.linalg.norm(R1.v[s] - R2.v[s]) > tol:
            return False
    return True
