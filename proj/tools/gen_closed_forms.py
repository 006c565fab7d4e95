"""Expand the Carleman coefficient expressions into monomials of the weight
derivatives and emit them as C++ (include/kdvb/detail/closed_forms.hpp).

Each term is accumulated separately so the caller also gets the sum of
absolute term values, the natural scale for relative comparisons.
"""
import sympy as sp

x, t, s = sp.symbols("x t s")
f = sp.Function("phi")(x, t)

names = {}
for k in range(1, 7):
    names[sp.Derivative(f, (x, k))] = f"d.x[{k}]"
names[sp.Derivative(f, t)] = "d.t"
names[sp.Derivative(f, (t, 2))] = "d.tt"
for k in range(1, 4):
    names[sp.Derivative(f, (x, k), t)] = f"d.xt[{k}]"
    names[sp.Derivative(f, t, (x, k))] = f"d.xt[{k}]"
names[f] = "d.x[0]"

A = s * (f.diff(t) - f.diff(x, 2) + f.diff(x, 3)) + 3 * s**2 * f.diff(x) * f.diff(x, 2) + s**3 * f.diff(x) ** 3 - s**2 * f.diff(x) ** 2
B = 3 * s * f.diff(x, 2) + 3 * s**2 * f.diff(x) ** 2 - 2 * s * f.diff(x)
C = 3 * s * f.diff(x) - 1
Cx = C.diff(x)

exprs = {
    "A": A,
    "B": B,
    "C": C,
    "A_t": A.diff(t),
    "A_xxx": A.diff(x, 3),
    "AB_x": (A * B).diff(x),
    "ACx_x": (A * Cx).diff(x),
    "D": -(A.diff(t) + A.diff(x, 3) + (A * B).diff(x) + (Cx * A).diff(x)),
    "E": 3 * A.diff(x) + B * Cx - B.diff(x) * C - (C * Cx).diff(x) + C.diff(x, 3) + C.diff(t),
    "F": -3 * Cx,
    "G": A - B * C - C * Cx + C.diff(x, 2) - Cx**2,
    "H": -C - 1,
}
lead = -15 * s**5 * f.diff(x) ** 4 * f.diff(x, 2)
exprs["D1"] = exprs["D"] - lead


def render(expr):
    expr = sp.expand(expr.doit())
    out = []
    for term in sp.Add.make_args(expr):
        coeff, rest = term.as_coeff_Mul()
        factors = []
        for base, power in rest.as_powers_dict().items():
            if base == 1:
                continue
            if base == s:
                name = "s"
            else:
                name = names[base]
            factors += [name] * int(power)
        body = " * ".join(factors) if factors else "1.0"
        out.append(f"  a.add({float(coeff)!r} * {body});")
    return out


lines = [
    "#pragma once",
    "",
    "// Generated by tools/gen_closed_forms.py. Do not edit by hand.",
    "",
    "#include \"kdvb/detail/term_sum.hpp\"",
    "",
    "namespace kdvb::closed_form {",
    "",
]
for name, e in exprs.items():
    lines.append(f"template <class Derivs>\ninline TermSum {name}(const Derivs& d, double s) {{")
    lines.append("  TermSum a;")
    lines += render(e)
    lines.append("  (void)d;\n  (void)s;\n  return a;\n}\n")
lines.append("}  // namespace kdvb::closed_form")
open("include/kdvb/detail/closed_forms.hpp", "w").write("\n".join(lines) + "\n")
