#!/usr/bin/env python3
"""Regenerates the regression instances under regression/."""
import os

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "regression")
BN254 = 21888242871839275222246405745257275088548364400416034343698204186575808495617


class Script:
    def __init__(self, p):
        self.p = p
        self.lines = ["(set-logic QF_FF)"]
        self.sort = f"(_ FiniteField {p})"

    def decl(self, *names):
        for n in names:
            self.lines.append(f"(declare-fun {n} () {self.sort})")

    def c(self, k):
        return f"(as ff{k % self.p} {self.sort})"

    def assert_(self, t):
        self.lines.append(f"(assert {t})")

    def write(self, name, model=False):
        self.lines.append("(check-sat)")
        if model:
            self.lines.append("(get-model)")
        with open(os.path.join(HERE, name + ".smt2"), "w") as f:
            f.write("\n".join(self.lines) + "\n")


def add(*ts):
    return ts[0] if len(ts) == 1 else "(ff.add " + " ".join(ts) + ")"


def mul(*ts):
    return "(ff.mul " + " ".join(ts) + ")"


def eq(a, b):
    return f"(= {a} {b})"


def neq(a, b):
    return f"(not (= {a} {b}))"


def ex1(p=7, retracted=False):
    s = Script(p)
    s.decl("x")
    if not retracted:
        s.assert_(eq(mul("x", add("x", s.c(-1))), s.c(0)))
    s.assert_(neq("x", s.c(0)))
    s.assert_(neq("x", s.c(1)))
    return s


def ex2(p=17):
    s = Script(p)
    s.decl("x", "u", "w")
    s.assert_(neq(add("x", mul(s.c(-1), "u")), s.c(0)))
    s.assert_(eq(add("u", mul(s.c(-1), "w")), s.c(0)))
    s.assert_(eq(add("w", mul(s.c(-1), "x")), s.c(0)))
    return s


def ex2_nonlinear(p=17):
    s = Script(p)
    s.decl("x", "y", "z")
    s.assert_(neq(add("x", mul(s.c(-1), "y", "y")), s.c(0)))
    s.assert_(eq(add(mul("y", "y"), mul(s.c(-1), "y", "z")), s.c(0)))
    s.assert_(eq(add(mul("y", "z"), mul(s.c(-1), "x")), s.c(0)))
    return s


def circuit(p):
    s = Script(p)
    s.decl("i1", "i2", "t1", "t2", "o1", "o2", "j1", "j2", "u1", "u2", "q1", "q2")
    m = s.c(-1)
    for i1, i2, t1, t2, o1, o2 in (("i1", "i2", "t1", "t2", "o1", "o2"),
                                   ("j1", "j2", "u1", "u2", "q1", "q2")):
        s.assert_(eq(t1, mul(i1, i1)))
        s.assert_(eq(t2, mul(i2, i2)))
        s.assert_(eq(o1, add(t1, t2)))
        s.assert_(eq(o2, add(t1, mul(m, t2))))
    s.assert_(eq("i1", "j1"))
    s.assert_(eq("i2", "j2"))
    s.assert_(f"(or {neq('o1', 'q1')} {neq('o2', 'q2')})")
    return s


def bits(s, prefix, n):
    names = [f"{prefix}{i}" for i in range(n)]
    s.decl(*names)
    for v in names:
        s.assert_(eq(mul(v, add(v, s.c(-1))), s.c(0)))
    return names


def weighted(s, names):
    return add(*[v if i == 0 else mul(s.c(1 << i), v) for i, v in enumerate(names)])


def bitsum(n, p, k):
    s = Script(p)
    s.decl("in")
    xs = bits(s, "x", n)
    ys = bits(s, "y", n)
    s.assert_(eq("in", weighted(s, xs)))
    s.assert_(eq("in", weighted(s, ys)))
    s.assert_(neq(xs[k], ys[k]))
    return s


def shared_w(n, p, k):
    s = Script(p)
    s.decl("in1", "in2")
    xs = bits(s, "x", n)
    ys = bits(s, "y", n)
    s.assert_(eq(add("in1", "in2"), weighted(s, xs)))
    s.assert_(eq(add("in1", "in2"), weighted(s, ys)))
    s.assert_(neq(xs[k], ys[k]))
    return s


def factoring(p=7):
    s = Script(p)
    s.decl("x", "y")
    s.assert_(eq(add(mul("x", "y"), "x"), s.c(0)))
    s.assert_(neq("x", s.c(0)))
    s.assert_(neq(add("y", s.c(1)), s.c(0)))
    return s


def nonresidue(p=7):
    s = Script(p)
    s.decl("x")
    s.assert_(eq(mul("x", "x"), s.c(3)))
    return s


def main():
    os.makedirs(HERE, exist_ok=True)
    ex1().write("ex1_unsat")
    ex1(retracted=True).write("ex1_retracted_sat", model=True)
    ex2().write("ex2_linearized_unsat")
    ex2_nonlinear().write("ex2_nonlinear_unsat")
    circuit(BN254).write("circuit_weak_safety_unsat")
    for n in (4, 8):
        for p in (17, 257):
            for k in range(n):
                # Unique binary decomposition needs p > 2^n - 1.
                tag = "unsat" if p > (1 << n) - 1 else "sat"
                bitsum(n, p, k).write(f"bitsum_n{n}_p{p}_i{k}_{tag}")
    for k in range(4):
        shared_w(4, 17, k).write(f"shared_w_n4_p17_i{k}_unsat")
    factoring().write("factoring_unsat")
    nonresidue().write("nonresidue_unknown")


if __name__ == "__main__":
    main()
