"""Execute a scene and collect check records into a report."""
from __future__ import annotations

import math
import time

import numpy as np

from .cartan import (
    SignatureForm,
    assemble_borel,
    block_closed_form,
    cartan_embed,
    coset_invariance_test,
    random_borel,
    random_SL,
    sigma_map,
    sl2_inverse_adjoint_formula,
)
from .homogeneous import (
    TwistorModel,
    acs_residuals,
    build_model,
    nearly_kahler_analysis,
    nijenhuis_tensor,
    nk_parameter_scan,
    special_torsion_analysis,
)
from .maurer_cartan import (
    FDConfig,
    convergence_study,
    curvature_condition_check,
    mc_residual,
    pluriharmonic_residual,
    sample_points,
)
from .report import CheckRecord, Report, info_check, threshold_check
from .scene import SceneConfig, SceneError
from .tensors import (
    ACSSpace,
    antilinear_part,
    complex_linear_part,
    make_j_linear,
    nc_membership,
    planted_nonmember,
    random_tensor,
)
from .twistor import build_J1_J2, obstruction_witness


def _fd(cfg: SceneConfig) -> FDConfig:
    return FDConfig(step=float(cfg.fd["step"]), levels=int(cfg.fd["levels"]), seed=cfg.seed)


def _slope_ok(study, band: float) -> bool:
    return study.at_floor or (math.isfinite(study.slope) and abs(study.slope - 2.0) <= band)


def _study_details(study) -> dict:
    return {"steps": study.steps, "norms": study.norms, "slopes": study.slopes,
            "at_floor": study.at_floor, "monotone": study.monotone}


# commands ---------------------------------------------------------------------------

def _mc_check(cfg: SceneConfig) -> list[CheckRecord]:
    F = cfg.build_framing()
    pair = build_model(cfg.model) if cfg.model else None
    pts = sample_points(F, cfg.grid, cfg.seed)
    delta = float(cfg.params.get("planted_defect", 0))
    G = np.zeros((F.dim, F.dim), dtype=complex)
    G[0, -1] = 1.0
    # adds delta * x_1 * G to alpha(d/dy_1), so d(alpha) picks up delta * G
    pert = (lambda w, mu: delta * w[0].real * G if mu == 1 else 0 * G) if delta else None

    def ev(h, which):
        out = []
        for z in pts:
            r = mc_residual(F, z, FDConfig(step=h), pair=pair, perturbation=pert)
            out.append(r.values if which == "full" else r.mc1_values)
        return np.concatenate(out)

    study_step = float(cfg.fd["study_step"])
    levels = int(cfg.fd["levels"])
    tol, band, floor = cfg.tol("residual"), cfg.tol("slope_band"), cfg.tol("floor")
    out = []
    st = convergence_study(lambda h: ev(h, "full"), study_step, levels, floor)
    out.append(threshold_check("maurer-cartan residual", "structure equation of the pulled-back form",
                               st.extrapolated, tol, _slope_ok(st, band), slope=st.slope,
                               details=_study_details(st)))
    if pair is not None:
        st1 = convergence_study(lambda h: ev(h, "mc1"), study_step, levels, floor)
        out.append(threshold_check("maurer-cartan m-component residual",
                                   "m-part of the structure equation", st1.extrapolated, tol,
                                   _slope_ok(st1, band), slope=st1.slope, details=_study_details(st1)))
    return out


def _pluriharmonic_check(cfg: SceneConfig) -> list[CheckRecord]:
    F = cfg.build_framing()
    pair = build_model(cfg.model)
    if not hasattr(pair, "split_unchecked") or not getattr(pair, "symmetric", False):
        raise SceneError("pluriharmonic-check needs a symmetric pair", "model")
    if F.dim != pair.g.ambient_dim:
        raise SceneError("framing dimension does not match the model", "framing")
    pts = sample_points(F, cfg.grid, cfg.seed)
    last = {}

    def ev(h):
        rs = [pluriharmonic_residual(F, pair, z, FDConfig(step=h)) for z in pts]
        last["reports"] = rs
        return np.concatenate([r.vector() for r in rs])

    st = convergence_study(ev, float(cfg.fd["study_step"]), int(cfg.fd["levels"]), cfg.tol("floor"))
    rs = last["reports"]
    k = int(np.argmax([r.max_norm for r in rs]))
    i, j = rs[k].witness
    R = rs[k].tensor[i][j]
    wit = {"point": pts[k], "i": i, "j": j, "value_re": R.re, "value_eps": R.im}
    tol = cfg.tol("residual")
    out = [threshold_check("pluriharmonic residual", "pluriharmonic equation for framings",
                           st.extrapolated, tol, _slope_ok(st, cfg.tol("slope_band")), slope=st.slope,
                           witness=None if st.extrapolated <= tol else wit, details=_study_details(st))]
    sym = max(r.symmetry_residual for r in rs)
    out.append(threshold_check("mixed second derivative symmetry", "symmetry of the second fundamental form",
                               sym, tol))
    return out


def _associated_family_check(cfg: SceneConfig) -> list[CheckRecord]:
    if cfg.model is None:
        raise SceneError("associated-family-check needs a model", "model")
    model = build_model(cfg.model)
    if cfg.framing is None:
        if not isinstance(model, TwistorModel):
            raise SceneError("associated-family-check needs a framing or a twistor model", "framing")
        pair = build_J1_J2(model)
        w = obstruction_witness(pair, cfg.tol("identity"))
        return [info_check("torsion condition for the fiber-reversed structure",
                           "associated family torsion condition on twistor spaces",
                           "violated", "violated" if w.violated else "not violated",
                           w.max_norm, w.tol, witness=w.pair,
                           details={"vertical_leak": w.vertical_leak, "verdict": w.verdict})]
    F = cfg.build_framing()
    pts = sample_points(F, cfg.grid, cfg.seed)
    cr = curvature_condition_check(F, model, pts, _fd(cfg), tol=cfg.tol("nonzero"))
    out = []
    wit = None
    if cr.witness is not None:
        p, i, j = cr.witness
        idx = [(a, b) for a in range(F.chart_dim) for b in range(a + 1, F.chart_dim)].index((i, j))
        C = cr.values[p][idx]
        wit = {"point": pts[p], "i": i, "j": j, "value_re": C.re, "value_eps": C.im}
    violated = cr.nonzero_fraction >= 0.9
    out.append(info_check("curvature condition", "associated family curvature condition",
                          "violated", "violated" if violated else "satisfied",
                          cr.max_norm, cfg.tol("nonzero"), witness=wit,
                          details={"nonzero_fraction": cr.nonzero_fraction,
                                   "min_point_norm": min(cr.point_norms, default=0.0)}))
    if cr.borel:
        out.append(threshold_check("curvature values in complexified n", "derived algebra of the Borel",
                                   cr.n_distance, cfg.tol("residual"),
                                   details={"image_distance": cr.n_distance_image}))
        iso_res = 0.0 if cr.n_isotropic else abs(complex(cr.isotropy_witness[2]))
        out.append(threshold_check("n isotropic for the trace form", "isotropy of the nilradical",
                                   iso_res, cfg.tol("identity")))
    # the source is an open set of C^k with its constant complex structure
    out.append(threshold_check("torsion condition on the source", "associated family torsion condition",
                               0.0, cfg.tol("identity"), details={"source": "integrable"}))
    return out


def _twistor_report(cfg: SceneConfig) -> list[CheckRecord]:
    model = build_model(cfg.model)
    if not isinstance(model, TwistorModel):
        raise SceneError("twistor-report needs a twistor model", "model")
    pair = build_J1_J2(model)
    tol, inc = cfg.tol("identity"), cfg.tol("inclusion")
    out = []
    for label, J in (("J1", pair.J1), ("J2", pair.J2)):
        r = acs_residuals(model, J)
        out.append(threshold_check(f"{label} invariant almost complex structure", "twistor structures",
                                   max(r.values()), tol, details=r))
    out.append(threshold_check("[p, fiber] in p", "bracket of base and fiber", model.inclusions["[p,v] in p"], inc))
    n1 = float(np.max(np.abs(nijenhuis_tensor(model, pair.J1))))
    n2 = float(np.max(np.abs(nijenhuis_tensor(model, pair.J2))))
    out.append(threshold_check("J1 integrable at the origin", "fiber-holomorphic structure", n1, tol))
    out.append(info_check("J2 integrability", "fiber-antiholomorphic structure", "nonintegrable",
                          "nonintegrable" if n2 > tol else "integrable", n2, tol))
    w = obstruction_witness(pair, tol)
    out.append(info_check("horizontal defect", "obstruction for the fiber-reversed structure", "violated",
                          "violated" if w.violated else "not violated", w.max_norm, tol, witness=w.pair,
                          details={"n2_horizontal_norm": w.n2_horizontal_norm, "n1_norm": w.n1_norm,
                                   "verdict": w.verdict}))
    out.append(threshold_check("vertical leak of [J1 V, J1 X]", "bracket of base and fiber", w.vertical_leak, inc))
    return out


def _nk_analyze(cfg: SceneConfig) -> list[CheckRecord]:
    model = build_model(cfg.model)
    if not isinstance(model, TwistorModel):
        raise SceneError("nk-analyze needs a twistor model", "model")
    pair = build_J1_J2(model)
    which = cfg.params.get("structure", "J2")
    if which not in ("J1", "J2"):
        raise SceneError("structure must be J1 or J2", "params.structure")
    J = pair.J1 if which == "J1" else pair.J2
    lo, hi = (float(x) for x in cfg.params.get("t_range", ["0.05", "2.0"]))
    steps = int(cfg.params.get("steps", 81))
    tol = cfg.tol("identity")
    scan = nk_parameter_scan(model, J, (lo, hi), steps, tol)
    out = [threshold_check(f"nearly Kaehler scale for {which}", "twistor metric scale",
                           scan.residual, tol, scan.found and scan.unique and not scan.degenerate,
                           details={"t_star": scan.t_star, "unique": scan.unique, "degenerate": scan.degenerate})]
    if scan.t_star is None:
        return out
    r = nearly_kahler_analysis(model, J, scan.t_star)
    out.append(threshold_check("characteristic torsion totally skew", "characteristic connection",
                               r.skew_residual, tol))
    out.append(threshold_check("N = 4 T", "Nijenhuis tensor and torsion", r.nijenhuis_residual, tol,
                               details={"from_nabla_J": r.nijenhuis_lc_residual}))
    tp = special_torsion_analysis(model, r.torsion, tol)
    out.append(threshold_check("T(v, v) = 0", "special algebraic torsion", tp.vv_residual, tol))
    out.append(threshold_check("T(p, p) in v", "special algebraic torsion", tp.pp_residual, tol))
    out.append(threshold_check("T(p, v) in p", "special algebraic torsion", tp.pv_residual, tol))
    out.append(info_check("T(p, v) nonzero", "special algebraic torsion", "nonzero",
                          "nonzero" if tp.pv_nonzero else "zero", tp.pv_norm, tol, witness=tp.pv_witness))
    return out


def _cartan_embed(cfg: SceneConfig) -> list[CheckRecord]:
    p, q = int(cfg.params.get("p", 1)), int(cfg.params.get("q", 1))
    sig = SignatureForm(p, q)
    n = int(cfg.params.get("n_samples", 100))
    tol = cfg.tol("identity")
    out = []
    rc = coset_invariance_test(sig, "adjoint", n, cfg.seed, tol)
    out.append(threshold_check("coset invariance (adjoint)", "Cartan embedding", rc.max_deviation, tol))
    rp = coset_invariance_test(sig, "inverse-adjoint", n, cfg.seed, tol)
    wit = None if rp.witness is None else {"h": rp.witness["h"], "g": rp.witness["g"]}
    out.append(info_check("coset invariance (inverse-adjoint)", "Cartan embedding, inverse-adjoint form", "violated",
                          "satisfied" if rp.passed else "violated", rp.max_deviation, tol, witness=wit))
    rng = np.random.default_rng(cfg.seed)
    block = {"inverse-adjoint": 0.0, "adjoint": 0.0}
    display = 0.0
    for _ in range(50):
        A1, C, A2 = random_borel(sig, rng)
        b = assemble_borel(sig, A1, C, A2)
        for v in block:
            block[v] = max(block[v], float(np.max(np.abs(block_closed_form(sig, A1, C, A2, v)
                                                          - cartan_embed(sig, b, v)))))
        if (p, q) == (1, 1):
            display = max(display, float(np.max(np.abs(block_closed_form(sig, A1, C, A2, "inverse-adjoint")
                                                        - sl2_inverse_adjoint_formula(A1[0, 0], C[0, 0], A2[0, 0])))))
    for v, res in block.items():
        out.append(threshold_check(f"block closed form ({v})", "block form of the embedding", res, tol))
    if (p, q) == (1, 1):
        out.append(threshold_check("SL(2) closed form (inverse-adjoint)", "hyperboloid example", display, tol))
    sym = 0.0
    for _ in range(n):
        g = random_SL(sig, rng)
        P = cartan_embed(sig, g, "adjoint")
        sym = max(sym, float(np.max(np.abs(sigma_map(sig, P) - P))), abs(np.linalg.det(P) - 1))
    out.append(threshold_check("image symmetric with unit determinant (adjoint)", "Cartan embedding", sym, tol))
    return out


def _nc_space(cfg: SceneConfig) -> list[CheckRecord]:
    dims = [int(d) for d in cfg.params.get("dims", [4, 6])]
    count = int(cfg.params.get("count", 1000))
    n_mem = int(cfg.params.get("members", 100))
    n_non = int(cfg.params.get("nonmembers", 100))
    tol = float(cfg.params.get("tol", "1e-9"))
    rng = np.random.default_rng(cfg.seed)
    disagree, missed_mem, missed_non = 0, 0, 0
    wit = None
    kinds = {"member": 0, "nonmember": 0, "generic": 0}
    for s in range(count):
        dim = dims[s % len(dims)]
        space = ACSSpace.random(dim, rng)
        S = make_j_linear(space, random_tensor(dim, rng))
        if s < n_mem:
            kind, S = "member", complex_linear_part(space, S)
        elif s < n_mem + n_non:
            kind = "nonmember"
            S = planted_nonmember(space, int(rng.integers(dim))) if s % 2 else antilinear_part(space, S)
        else:
            kind = "generic"
        kinds[kind] += 1
        r = nc_membership(space, S, tol)
        if not r.agree:
            disagree += 1
            wit = wit or {"sample": s, "dim": dim, "alt": r.alt_one_one_residual, "mixed": r.mixed_residual}
        if kind == "member" and not r.mixed_zero:
            missed_mem += 1
        if kind == "nonmember" and r.mixed_zero:
            missed_non += 1
    return [
        threshold_check("predicates agree", "connection space characterization", float(disagree), 0.0,
                        witness=wit, details={"samples": count, **kinds}),
        threshold_check("constructed members accepted", "connection space characterization", float(missed_mem), 0.0),
        threshold_check("constructed non-members rejected", "connection space characterization", float(missed_non), 0.0),
    ]


DISPATCH = {
    "mc-check": _mc_check,
    "pluriharmonic-check": _pluriharmonic_check,
    "associated-family-check": _associated_family_check,
    "twistor-report": _twistor_report,
    "nk-analyze": _nk_analyze,
    "cartan-embed": _cartan_embed,
    "nc-space": _nc_space,
}


def run_scene(cfg: SceneConfig) -> Report:
    """Run every check of the scene; a crashing check is recorded as failed."""
    report = Report(cfg.command, cfg.hash(), cfg.seed)
    t0 = time.perf_counter()
    try:
        report.checks.extend(DISPATCH[cfg.command](cfg))
    except SceneError:
        raise
    except Exception as exc:  # noqa: BLE001 - recorded in the report
        report.checks.append(CheckRecord(cfg.command, "", "fail", None, None,
                                         details={"error": f"{type(exc).__name__}: {exc}"}))
    report.timings["total"] = time.perf_counter() - t0
    return report
