#!/usr/bin/env python3
"""Independent symbolic-Lagrangian oracle for the planar 2R arm.

Derives M(q), C(q,qd) (Christoffel form), g(q) from the Lagrangian with
sympy and prints reference values that are frozen into the C++ unit
tests. Run from anywhere:

    python3 tests/oracles/planar2r_lagrangian.py

Conventions: joint angles measured from the +x axis (relative angles),
gravity acts along -y with magnitude G. Each link: mass m_i, length l_i,
COM at distance c_i from its joint along the link, rotational inertia
I_i about the z axis through the COM.
"""

import sympy as sp


def derive():
    t = sp.Symbol("t")
    m1, m2, l1, l2, c1, c2, I1, I2, G = sp.symbols(
        "m1 m2 l1 l2 c1 c2 I1 I2 G", positive=True
    )
    q1, q2 = sp.Function("q1")(t), sp.Function("q2")(t)
    q = sp.Matrix([q1, q2])
    qd = q.diff(t)

    # COM positions
    x1 = c1 * sp.cos(q1)
    y1 = c1 * sp.sin(q1)
    x2 = l1 * sp.cos(q1) + c2 * sp.cos(q1 + q2)
    y2 = l1 * sp.sin(q1) + c2 * sp.sin(q1 + q2)

    v1sq = sp.simplify(x1.diff(t) ** 2 + y1.diff(t) ** 2)
    v2sq = sp.simplify(x2.diff(t) ** 2 + y2.diff(t) ** 2)
    w1 = qd[0]
    w2 = qd[0] + qd[1]

    T = sp.Rational(1, 2) * (m1 * v1sq + m2 * v2sq + I1 * w1**2 + I2 * w2**2)
    V = G * (m1 * y1 + m2 * y2)

    # Mass matrix from the kinetic-energy quadratic form
    M = sp.Matrix(2, 2, lambda i, j: sp.simplify(sp.expand(T).diff(qd[i]).diff(qd[j])))

    # Christoffel symbols of the first kind
    qs = sp.symbols("qs1 qs2")
    qds = sp.symbols("qds1 qds2")
    subs_static = list(zip([q1, q2], qs)) + list(zip(qd, qds))
    Ms = M.subs(subs_static)
    C = sp.zeros(2, 2)
    for i in range(2):
        for j in range(2):
            cij = 0
            for k in range(2):
                cij += (
                    sp.Rational(1, 2)
                    * (
                        Ms[i, j].diff(qs[k])
                        + Ms[i, k].diff(qs[j])
                        - Ms[j, k].diff(qs[i])
                    )
                    * qds[k]
                )
            C[i, j] = sp.simplify(cij)

    g = sp.Matrix([sp.simplify(V.diff(q1)), sp.simplify(V.diff(q2))]).subs(subs_static)

    return Ms, C, g, (m1, m2, l1, l2, c1, c2, I1, I2, G), qs, qds


def main():
    Ms, C, g, params, qs, qds = derive()
    m1, m2, l1, l2, c1, c2, I1, I2, G = params

    print("== symbolic ==")
    print("M =", sp.simplify(Ms))
    print("C =", sp.simplify(C))
    print("g =", sp.simplify(g))

    unit = {m1: 1, m2: 1, l1: 1, l2: 1, c1: sp.Rational(1, 2),
            c2: sp.Rational(1, 2), I1: 1, I2: 1, G: sp.Rational(981, 100)}

    def at(qv, qdv):
        s = dict(unit)
        s.update({qs[0]: qv[0], qs[1]: qv[1], qds[0]: qdv[0], qds[1]: qdv[1]})
        return s

    # Case A: q = [0,0], qd = [0,0]  (unit parameters, COM at midpoint)
    sA = at([0, 0], [0, 0])
    print("\n== case A: q=[0,0] ==")
    print("M =", [[sp.nsimplify(Ms[i, j].subs(sA)) for j in range(2)] for i in range(2)])
    print("g =", [sp.N(g[i].subs(sA), 20) for i in range(2)])

    # Free fall from horizontal: qdd = -M^{-1} g
    Mn = sp.Matrix(2, 2, lambda i, j: Ms[i, j].subs(sA))
    gn = sp.Matrix([g[0].subs(sA), g[1].subs(sA)])
    qdd = -(Mn.inv() * gn)
    print("free-fall qdd =", [sp.N(qdd[i], 20) for i in range(2)])

    # Case B: generic state q = [0.3, -0.4], qd = [0.7, 0.2]
    sB = at([sp.Rational(3, 10), -sp.Rational(4, 10)],
            [sp.Rational(7, 10), sp.Rational(2, 10)])
    MB = sp.Matrix(2, 2, lambda i, j: Ms[i, j].subs(sB))
    CB = sp.Matrix(2, 2, lambda i, j: C[i, j].subs(sB))
    gB = sp.Matrix([g[0].subs(sB), g[1].subs(sB)])
    qdv = sp.Matrix([sp.Rational(7, 10), sp.Rational(2, 10)])
    print("\n== case B: q=[0.3,-0.4], qd=[0.7,0.2] ==")
    print("M =", [[sp.N(MB[i, j], 20) for j in range(2)] for i in range(2)])
    print("C =", [[sp.N(CB[i, j], 20) for j in range(2)] for i in range(2)])
    print("g =", [sp.N(gB[i], 20) for i in range(2)])
    P = MB * qdv
    H = -CB.T * qdv + gB
    print("P = M qd =", [sp.N(P[i], 20) for i in range(2)])
    print("H = -C^T qd + g =", [sp.N(H[i], 20) for i in range(2)])

    # Skew symmetry sanity: Mdot - 2C with Mdot = dM/dq * qd
    dM = sp.zeros(2, 2)
    for k in range(2):
        dM += sp.Matrix(2, 2, lambda i, j: Ms[i, j].diff(qs[k])) * qds[k]
    skew = sp.simplify((dM - 2 * C) + (dM - 2 * C).T)
    print("\n(Mdot-2C) + (Mdot-2C)^T =", skew, " (must be zero)")


if __name__ == "__main__":
    main()
