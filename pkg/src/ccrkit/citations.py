"""Citation identifiers attached to every reported check.

Each identifier names the mathematical statement a check exercises.  The
same table is rendered in ``docs/citations.md``.
"""

CITATIONS: dict[str, str] = {
    "wick.norm-identity":
        "Wick monomials are orthogonal with <:x_a:, :x_a:> = a!/2^|a| under the "
        "product Gaussian measure of variance 1/2.",
    "wick.product":
        "Pointwise products of Wick polynomials re-expand by Hermite linearization.",
    "qspace.ccr":
        "q_k = x_k and p_k = -i d/dx_k + i x_k satisfy [Phi(f), Phi(g)] = i sigma(f,g).",
    "qspace.ladder":
        "a(f) and a*(f) act on Wick polynomials by differentiation and raising; "
        "a(f) kills the constant function.",
    "qspace.fock-map":
        "The unitary from symmetric Fock space sends P_+(e_a) to sqrt(2^r/r!) :x_a:.",
    "lambda.ccr-characterization":
        "Phi(f) + Lambda f satisfies the CCR iff Lambda is real, constant on V, "
        "and <Lambda J e_k, :x_j x_a:> is symmetric in k and j.",
    "lambda.ladder-symmetry":
        "Equivalent form: a(Pf) P_n Lambda g = a(Pg) P_n Lambda f for every degree n.",
    "lambda.standard-form":
        "A CCR map of finite degree is p_k -> p_k + sum lambda_{k k1..km} :q_k1..q_km: "
        "with a totally symmetric real tensor.",
    "lambda.maximal-extension":
        "The maximal extension is defined on f + Jg whenever the defining series "
        "sum 2^m/m! |<Lambda J e_k1, :x(g) x_k2..x_km:>|^2 converges.",
    "lambda.band-structure":
        "For Lambda of degree n, P_m Phi_Lambda(f) P_k = 0 when k > n + m + 1.",
    "generator.gradient":
        "There is a real G with dG/dx_k = Lambda J e_k; the single-mode primitive "
        "obeys ||G|| <= ||F||.",
    "generator.conjugation":
        "e^{-iG} Phi(f) e^{iG} = Phi(f) + Lambda f on the relevant domain.",
    "weyl.vacuum":
        "The Fock state has characteristic function e^{-||f||^2/4}.",
    "weyl.relation":
        "W(f) W(g) = e^{-i sigma(f,g)/2} W(f+g).",
    "symplectic.invariance":
        "T is symplectic iff sigma(Tf, Tg) = sigma(f, g).",
    "symplectic.adjoint-criterion":
        "T is symplectic iff -J T^{-1} J = T^T; for self-adjoint T iff -J T^{-1} J = T.",
    "symplectic.metric-root":
        "For a compatible complex structure K, T = (-JK)^{1/2} is symplectic and "
        "s'(f,g) = s(Tf,Tg).",
    "symplectic.quasifree-state":
        "Quasifree states have characteristic function e^{i l(f) - s(Tf,Tf)/4}.",
    "symplectic.linear-map":
        "Linear CCR maps are Lambda f = x(SJPf) + l(f) with S symmetric.",
    "symplectic.shale":
        "A symplectic T is implementable on Fock space iff 1 - |T| is Hilbert-Schmidt.",
    "equivalence.fock-hilbert-schmidt":
        "A finite-degree Lambda gives a representation quasi-equivalent to Fock iff "
        "Lambda is Hilbert-Schmidt.",
    "equivalence.coherent-boundedness":
        "A coherent shift by l is quasi-equivalent to the base representation iff l "
        "is bounded for the base metric.",
    "equivalence.quasifree-hilbert-schmidt":
        "Against a quasifree representation: the degree <= 1 part must match it and "
        "(1 - P_0 - P_1) Lambda must be Hilbert-Schmidt.",
    "equivalence.higher-order-hilbert-schmidt":
        "For Lambda with no degree 0 or 1 part, quasi-equivalence with the quasifree "
        "representation reduces to Lambda being Hilbert-Schmidt.",
    "equivalence.fock-pair":
        "Fock states of J and J' are quasi-equivalent iff J - J' is Hilbert-Schmidt.",
    "reporting.determinism":
        "Identical model, seed and flags give byte-identical reports.",
}


def resolve(citation: str) -> str:
    try:
        return CITATIONS[citation]
    except KeyError:
        raise KeyError(f"unknown citation {citation!r}") from None


def render_markdown() -> str:
    lines = ["# Citation map", "",
             "Every report record carries one of these identifiers.", "",
             "| id | statement |", "|---|---|"]
    lines += [f"| `{k}` | {v} |" for k, v in CITATIONS.items()]
    return "\n".join(lines) + "\n"
