"""Named verification suites and their machine-readable reports."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, citations
from .equivalence import classify_vs_fock, classify_vs_quasifree
from .fock import HVector, sigma
from .generator import (build_generator_for, build_generator_single_mode,
                        conjugation_evidence, strictly_decreasing, verify_gradient)
from .lambda_map import (LambdaMap, band_blocks, band_profile, curl_check, decompose_parts,
                         in_lq, reconstruct_images, assemble_tensor, standard_form,
                         standard_form_field, transformed_field, validate_ccr)
from .model import SUITES, ModelFile
from .sampling import (DEFAULT_SEED, random_compatible_metric, random_invertible,
                       random_symplectic, random_wick_polynomial, rng_for)
from .scalars import EXACT, FLOAT, I
from .symplectic import (S_from_linear_lambda, build_T_from_metric, complex_structure_of,
                         is_symplectic, adjoint_symplectic_check, linear_lambda_from_S)
from .tails import InconclusiveTail, MissingTail
from .truncation import (TruncationTooSmall, commutator_interior, truncate_field,
                         vacuum_expectation, verify_weyl_relation, weyl_field)
from .wick import _num_out

PASS, FAIL, INFO = "pass", "fail", "info"
_STATUS_ORDER = {FAIL: 0, PASS: 1, INFO: 2}

CONJUGATION_TOL = 1e-3
VACUUM_TOL = 1e-8
WEYL_TOL = 1e-6
INTERIOR_TOL = 1e-10
SYMPLECTIC_TOL = 1e-9


class UnknownSuite(ValueError):
    pass


def _round(x: float) -> float:
    # 12 significant digits keep reports byte-stable across BLAS thread schedules
    if not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def jsonable(x):
    """Numbers and containers as stable JSON values."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return _num_out(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return _round(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return str(x)


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    citation: str
    status: str
    value: object = None
    evidence: object = None
    backend: str = EXACT
    runtime_ms: float | None = None

    def __post_init__(self):
        citations.resolve(self.citation)
        if self.status not in _STATUS_ORDER:
            raise ValueError(f"unknown status {self.status!r}")

    def to_json(self, timings: bool = False) -> dict:
        out = {"check_id": self.check_id, "citation": self.citation, "status": self.status,
               "value": jsonable(self.value), "evidence": jsonable(self.evidence),
               "backend": self.backend}
        if timings and self.runtime_ms is not None:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


@dataclass
class Report:
    suite: str
    seed: int = DEFAULT_SEED
    records: list[CheckRecord] = field(default_factory=list)
    timings: bool = False

    def ordered(self) -> list[CheckRecord]:
        # failures first; otherwise execution order
        idx = {id(r): i for i, r in enumerate(self.records)}
        return sorted(self.records, key=lambda r: (_STATUS_ORDER[r.status], idx[id(r)]))

    @property
    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, INFO: 0}
        for r in self.records:
            counts[r.status] += 1
        return {"total": len(self.records), "passed": counts[PASS], "failed": counts[FAIL],
                "info": counts[INFO]}

    @property
    def failed(self) -> bool:
        return any(r.status == FAIL for r in self.records)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_json(self) -> dict:
        return {"meta": {"tool": "ccrkit", "version": __version__, "suite": self.suite,
                         "seed": self.seed},
                "summary": self.summary,
                "records": [r.to_json(self.timings) for r in self.ordered()]}


def emit_report(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    s = report.summary
    lines = [f"ccrkit {__version__}  suite={report.suite}  seed={report.seed}",
             f"{s['total']} checks: {s['passed']} passed, {s['failed']} failed, "
             f"{s['info']} info", ""]
    for r in report.ordered():
        d = r.to_json(report.timings)
        value = json.dumps(d["value"], ensure_ascii=False)
        if len(value) > 100:
            value = value[:97] + "..."
        line = f"[{r.status.upper():4}] {r.check_id}  ({r.citation}, {r.backend})  {value}"
        if "runtime_ms" in d:
            line += f"  {d['runtime_ms']} ms"
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# suite plumbing

@dataclass
class _Ctx:
    model: ModelFile
    rng: np.random.Generator
    cutoff: int | None
    records: list[CheckRecord]
    clock: float = field(default_factory=time.perf_counter)

    def record(self, check_id, citation, status, value=None, evidence=None, backend=EXACT):
        # runtime is the time since the previous record of this suite
        now = time.perf_counter()
        self.records.append(CheckRecord(check_id, citation, status, value, evidence, backend,
                                        (now - self.clock) * 1e3))
        self.clock = now


INPUT_DEGREE = 3


def _cap_for(lam) -> int:
    # two transformed-field applications raise the degree by at most 2 * max(n, 1)
    return INPUT_DEGREE + 2 * max(lam.degree, 1) + 2


def _ok(flag) -> str:
    return PASS if flag else FAIL


def _basis(modes) -> list[tuple[str, HVector]]:
    out = []
    for k in modes:
        out.append((f"e{k}", HVector.e(k)))
        out.append((f"Je{k}", HVector.je(k)))
    return out


def _suite_ccr(ctx: _Ctx):
    lam = ctx.model.lam
    v = validate_ccr(lam)
    ctx.record("ccr.validate", "lambda.ccr-characterization", _ok(v),
               v.ok, v.witness, lam.backend)
    c = curl_check(lam)
    ctx.record("ccr.curl-agreement", "lambda.ladder-symmetry", _ok(bool(c) == bool(v)),
               {"validate_ccr": v.ok, "curl_check": c.ok}, c.witness, lam.backend)
    if not v:
        return
    if not lam.v_images:
        degrees = sorted({a.degree for P in lam.jv_images.values() for a, _ in P.items()})
        rebuilt = reconstruct_images([assemble_tensor(lam, m) for m in degrees], lam.backend)
        same = all(rebuilt.get(k, lam.jv(k).scale(0)) == lam.jv(k) for k in lam.support)
        ctx.record("ccr.tensor-roundtrip", "lambda.standard-form", _ok(same), same,
                   {"degrees": degrees}, lam.backend)

    modes = list(lam.support) or [1]
    cap = _cap_for(lam)
    inputs = [random_wick_polynomial(ctx.rng, len(modes), INPUT_DEGREE, 4)
              for _ in range(3)]
    inputs = [_relabel(F, modes) for F in inputs]
    bad = []
    basis = _basis(modes)
    for i, (nf, f) in enumerate(basis):
        for ng, g in basis[i + 1:]:
            for F in inputs:
                lhs = (transformed_field(lam, f, transformed_field(lam, g, F, cap), cap)
                       - transformed_field(lam, g, transformed_field(lam, f, F, cap), cap))
                rhs = F.scale(I * sigma(f, g))
                if lhs != rhs:
                    bad.append([nf, ng])
                    break
    ctx.record("ccr.transformed-commutator", "qspace.ccr", _ok(not bad),
               {"pairs": len(basis) * (len(basis) - 1) // 2, "inputs": len(inputs)},
               {"failing_pairs": bad}, lam.backend)

    band_cap = 4
    rows, ok = [], True
    for nf, f in basis:
        blocks = band_blocks(lam, f, band_cap)
        for m in range(4):
            bv = band_profile(lam, f, m, band_cap, blocks)
            ok &= bv.ok
            rows.append({"f": nf, "m": m, "bound": bv.bound,
                         "nonzero_blocks": list(bv.nonzero_blocks),
                         "violations": list(bv.violations)})
    ctx.record("ccr.band-profile", "lambda.band-structure", _ok(ok),
               {"input_degree_cap": band_cap}, rows, lam.backend)


def _relabel(F, modes):
    from .wick import MultiIndex, WickPolynomial
    return WickPolynomial({MultiIndex.of([modes[k - 1] for k in a.expanded()]): c
                           for a, c in F.items()}, F.backend)


def _suite_standard_form(ctx: _Ctx):
    lam = ctx.model.lam
    v = validate_ccr(lam)
    if not v:
        ctx.record("standard_form.tensors", "lambda.standard-form", FAIL, None,
                   {"reason": "map fails the CCR condition", "witness": v.witness})
        return
    coherent = {}
    target = lam
    if lam.v_images:
        parts = decompose_parts(lam)
        coherent = {k: list(p) for k, p in parts.coherent.items()}
        target = LambdaMap({}, lam.jv_images, support=lam.support)
    sf = standard_form(target)
    ctx.record("standard_form.tensors", "lambda.standard-form", PASS, sf.to_json(),
               {"coherent_split": coherent} if coherent else None, lam.backend)
    modes = list(lam.support) or [1]
    cap = _cap_for(lam)
    F = _relabel(random_wick_polynomial(ctx.rng, len(modes), INPUT_DEGREE, 4), modes)
    bad = [k for k in modes
           if standard_form_field(sf, k, F, cap) != transformed_field(target, HVector.je(k), F, cap)]
    ctx.record("standard_form.field-agreement", "lambda.standard-form", _ok(not bad),
               not bad, {"failing_modes": bad}, lam.backend)


def _suite_generator(ctx: _Ctx):
    model = ctx.model
    lam = model.lam
    v = validate_ccr(lam)
    has_constants = bool(lam.v_images) or any(P.constant_term() for P in lam.jv_images.values())
    G = None
    if v and not has_constants:
        G = build_generator_for(lam).G
        gv = verify_gradient(G, lam)
        ctx.record("generator.gradient", "generator.gradient", _ok(gv), G.to_json(),
                   gv.witness, lam.backend)
    else:
        reason = "map fails the CCR condition" if not v else "map has constant parts"
        ctx.record("generator.gradient", "generator.gradient", FAIL if not v else INFO,
                   None, {"reason": reason})
    rows = []
    ok = True
    for k, P in lam.jv_images.items():
        res = build_generator_single_mode(P, k)
        ok &= bool(res.norm_bound_ok)
        rows.append({"mode": k, "norm_G_sq": res.norm_G, "norm_F_sq": res.norm_F})
    ctx.record("generator.single-mode-norm", "generator.gradient", _ok(ok), ok, rows,
               lam.backend)
    if G is None or G.max_degree == 0:
        return
    tr = model.truncation
    cutoffs = list(tr.cutoffs) or [ctx.cutoff or tr.cutoff]
    f = HVector.je(lam.support[0])
    try:
        rows = conjugation_evidence(lam, f, cutoffs, tr.probe_level, G)
    except (TruncationTooSmall, ValueError) as e:
        ctx.record("generator.conjugation", "generator.conjugation", INFO, "skipped",
                   {"reason": str(e)}, FLOAT)
        return
    table = [r.to_json() for r in rows]
    final = rows[-1].residual
    # a single cutoff is evidence only; the trend across cutoffs is the check
    ctx.record("generator.conjugation-final", "generator.conjugation", INFO, final,
               {"within_1e-3": final <= CONJUGATION_TOL, "table": table}, FLOAT)
    if len(rows) >= 2:
        ctx.record("generator.conjugation-decreasing", "generator.conjugation",
                   _ok(strictly_decreasing(rows)), [r.residual for r in rows],
                   {"cutoffs": cutoffs}, FLOAT)


def _suite_weyl(ctx: _Ctx):
    tr = ctx.model.truncation
    N = ctx.cutoff or tr.cutoff
    scheme = tr.scheme(N)
    k = scheme.modes[0]
    e, je = HVector.e(k), HVector.je(k)
    rows, worst = [], 0.0
    for t in (0.25, 0.5, 1.0, 1.5):
        got = vacuum_expectation(weyl_field(e, scheme, t))
        err = abs(got - math.exp(-t * t / 4))
        worst = max(worst, err)
        rows.append({"t": t, "residual": err})
    ctx.record("weyl.vacuum", "weyl.vacuum", _ok(worst <= VACUUM_TOL), worst,
               {"cutoff": N, "tolerance": VACUUM_TOL, "rows": rows}, FLOAT)
    grid = (0.3, 0.7, 1.0)
    rows, worst = [], 0.0
    for t in grid:
        for s in grid:
            r = verify_weyl_relation(e, je, t, s, scheme)
            worst = max(worst, r)
            rows.append({"t": t, "s": s, "residual": r})
    ctx.record("weyl.relation", "weyl.relation", _ok(worst <= WEYL_TOL), worst,
               {"cutoff": N, "probe_level": scheme.probe_level, "tolerance": WEYL_TOL,
                "rows": rows}, FLOAT)
    r = commutator_interior(truncate_field(e, scheme), truncate_field(je, scheme),
                            1j * float(sigma(e, je)))
    ctx.record("weyl.interior-ccr", "qspace.ccr", _ok(r <= INTERIOR_TOL), r,
               {"cutoff": N, "tolerance": INTERIOR_TOL}, FLOAT)
    if len(tr.cutoffs) >= 2:
        res = [verify_weyl_relation(e, je, 1.0, 1.0, tr.scheme(c), dps=tr.dps)
               for c in tr.cutoffs]
        halves = all(b <= a / 2 for a, b in zip(res, res[1:]))
        ctx.record("weyl.convergence", "weyl.relation", _ok(halves), res,
                   {"cutoffs": list(tr.cutoffs), "dps": tr.dps, "t": 1.0, "s": 1.0},
                   "mpmath")


def _suite_symplectic(ctx: _Ctx):
    model = ctx.model
    spec = model.quasifree_spec
    if spec is not None:
        a, b = is_symplectic(spec.T), adjoint_symplectic_check(spec.T)
        ctx.record("symplectic.spec-T", "symplectic.invariance", _ok(a), a.ok, a.witness,
                   EXACT if spec.T.dtype == object else FLOAT)
        ctx.record("symplectic.spec-T-adjoint", "symplectic.adjoint-criterion",
                   _ok(a.ok == b.ok), {"is_symplectic": a.ok, "adjoint_criterion": b.ok},
                   b.witness, EXACT if spec.T.dtype == object else FLOAT)
        M = spec.T.T @ spec.T
        Tb = build_T_from_metric(M, complex_structure_of(M))
        resid = np.asarray(Tb.T @ Tb - M, dtype=float)
        r = float(np.max(np.abs(resid)))
        ctx.record("symplectic.spec-metric-root", "symplectic.metric-root",
                   _ok(r <= SYMPLECTIC_TOL * max(1.0, float(np.max(np.abs(np.asarray(M, float)))))),
                   r, {"T_root": Tb}, EXACT if Tb.dtype == object else FLOAT)
    disagree = 0
    total = 0
    for n in (1, 2, 3):
        for i in range(10):
            T = random_symplectic(ctx.rng, n) if i % 2 == 0 else random_invertible(ctx.rng, n)
            total += 1
            if bool(is_symplectic(T, SYMPLECTIC_TOL)) != bool(adjoint_symplectic_check(T, SYMPLECTIC_TOL)):
                disagree += 1
    ctx.record("symplectic.adjoint-agreement", "symplectic.adjoint-criterion",
               _ok(disagree == 0), {"matrices": total, "disagreements": disagree}, None, FLOAT)
    worst = 0.0
    for n in (1, 2):
        for _ in range(5):
            M = random_compatible_metric(ctx.rng, n)
            T = build_T_from_metric(M, complex_structure_of(M))
            worst = max(worst, float(np.max(np.abs(T.T @ T - M))) / max(1.0, np.abs(M).max()))
    ctx.record("symplectic.metric-root-random", "symplectic.metric-root",
               _ok(worst <= SYMPLECTIC_TOL), worst, {"pairs": 10}, FLOAT)
    lam = model.lam
    if lam.degree <= 1 and validate_ccr(lam) and lam.support:
        S, l = S_from_linear_lambda(lam)
        back = linear_lambda_from_S(S, list(l))
        ctx.record("symplectic.linear-roundtrip", "symplectic.linear-map",
                   _ok(back == lam), back == lam, {"S": S, "l": list(l)}, lam.backend)


def _suite_equivalence(ctx: _Ctx):
    model = ctx.model
    lam = model.lam
    tail = model.tail if model.tail is not None else lam.tail

    def verdict(check_id, fn):
        try:
            v = fn()
        except (MissingTail, InconclusiveTail) as e:
            ctx.record(check_id, _citation_for(check_id, lam), INFO, "undetermined",
                       {"reason": str(e)})
            return None
        ctx.record(check_id, v.criterion, INFO, v.verdict, v.to_json(), lam.backend)
        return v

    fock = verdict("equivalence.vs-fock", lambda: classify_vs_fock(lam, tail))
    spec = model.quasifree_spec
    if spec is not None:
        qf = verdict("equivalence.vs-quasifree",
                     lambda: classify_vs_quasifree(lam, tail if tail is not None else None, spec))
        trivial = (all(x == (1 if i == j else 0) for (i, j), x in np.ndenumerate(spec.T))
                   and all(x == 0 for x in spec.l))
        if trivial and in_lq(lam) and fock is not None and qf is not None:
            ctx.record("equivalence.fock-consistency", "equivalence.higher-order-hilbert-schmidt",
                       _ok(fock.verdict == qf.verdict),
                       {"vs_fock": fock.verdict, "vs_quasifree": qf.verdict})


def _citation_for(check_id: str, lam) -> str:
    if check_id == "equivalence.vs-fock":
        return "equivalence.fock-hilbert-schmidt"
    return ("equivalence.higher-order-hilbert-schmidt" if in_lq(lam)
            else "equivalence.quasifree-hilbert-schmidt")


_SUITES = {
    "ccr": _suite_ccr,
    "standard_form": _suite_standard_form,
    "generator": _suite_generator,
    "weyl": _suite_weyl,
    "symplectic": _suite_symplectic,
    "equivalence": _suite_equivalence,
}
assert tuple(_SUITES) == SUITES


def run_suite(model: ModelFile, suite: str = "all", seed: int | None = None,
              cutoff: int | None = None, timings: bool = False) -> Report:
    """Run ``suite`` (or every suite for ``"all"``) on ``model``."""
    if suite != "all" and suite not in _SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {[*SUITES, 'all']}")
    seed = DEFAULT_SEED if seed is None else int(seed)
    names = list(SUITES) if suite == "all" else [suite]
    if suite == "all" and "all" not in model.suites:
        names = [s for s in SUITES if s in model.suites]
    records: list[CheckRecord] = []
    for name in names:
        # each suite draws from its own stream so suites are independent of each other
        ctx = _Ctx(model, rng_for(seed + SUITES.index(name)), cutoff, [])
        try:
            _SUITES[name](ctx)
        except TruncationTooSmall as e:
            ctx.record(f"{name}.truncation", "weyl.relation", FAIL, None, {"reason": str(e)},
                       FLOAT)
        records.extend(ctx.records)
    return Report(suite, seed, records, timings)
