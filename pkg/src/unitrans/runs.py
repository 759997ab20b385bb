"""Pipelines behind the command-line subcommands.

Each run writes its artifacts into ``out`` and returns a :class:`Report`
whose ``ok`` flag is False iff a requested verification missed its tolerance.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import plotting
from .artifacts import Report, write_columns, write_field, write_json
from .completeness import completeness_reconstruct, completeness_sine_analogue
from .config import (build_function, build_laplace, build_potential, build_schrodinger,
                     check_algebraic_preconditions, grid)
from .fields import rel_l2
from .jost import JostSolver
from .laplace import (LaplaceSpectralFns, algebraic_candidate, discarded_terms,
                      exponential_transform, global_relation_residual_laplace, rh_jump_residual,
                      solve_algebraic)
from .oracles import (LaplaceOracleConfig, OracleConfig, crank_nicolson_halfline,
                      laplace_fd_quarterplane)
from .schrodinger import SchrodingerSolver, classical_dirichlet

GR_K_SCHRODINGER = (0.5, 1.0, 2.0, 3.0, 0.5 + 0.5j, 2j)
GR_K_PHI = (-0.5, -1.0, -2.0)
GR_K_PSI = (-0.5 + 0.5j, -1 + 1j, 1j)
DROPPED_FROM = 0.25


def _order(coarse, fine, factor=2.0):
    if fine <= 0 or coarse <= 0:
        return math.inf if fine <= 0 < coarse else float("nan")
    return math.log(coarse / fine) / math.log(factor)


# -- Schrodinger pieces -------------------------------------------------------------

def _oracle_config(doc, t_max, level=0):
    o = doc["oracle"]
    cfg = OracleConfig(o["dx"], o["dt"], o["x_max"], max(float(t_max), o["dt"]))
    for _ in range(level):
        cfg = OracleConfig(cfg.dx * 2, cfg.dt * 2, cfg.x_max, cfg.t_max)
    return cfg


def _cn(setup, cfg, times):
    times = [t for t in np.atleast_1d(times)]
    return crank_nicolson_halfline(setup.potential, setup.data.q0, setup.data.boundary,
                                   setup.data.bc_kind, cfg, save_times=times)


def _usable_times(t, dt):
    """Times of the output grid that are stored time levels of a step-dt scheme."""
    return [float(s) for s in t if abs(round(s / dt) * dt - s) < 1e-9]


def schrodinger_oracle_checks(doc, setup, sample, report, tag="schrodinger"):
    tol = doc["tolerances"]
    t = sample.t_grid
    fine_cfg = _oracle_config(doc, t.max(initial=0.0))
    coarse_cfg = _oracle_config(doc, t.max(initial=0.0), level=1)
    times = _usable_times(t, coarse_cfg.dt)
    keep = np.isin(t, times)
    errs = []
    fine = None
    for cfg in (coarse_cfg, fine_cfg):
        o = _cn(setup, cfg, times)
        ref = o.sample(sample.x_grid, times).values
        errs.append(rel_l2(sample.values[:, keep], ref))
        fine = (o, ref)
    report.check(f"{tag}: rel L2 vs Crank-Nicolson (dx={fine_cfg.dx:g})", errs[1],
                 tol["oracle_schrodinger"], f"coarser grid {errs[0]:.3e}")
    report.check(f"{tag}: improves under oracle refinement", errs[0] / max(errs[1], 1e-300),
                 1.0, "error ratio coarse/fine", at_least=True)
    report.check(f"{tag}: oracle boundary leakage", fine[0].leakage, tol["leakage"])
    return {"oracle_rel_l2": errs, "oracle_dx": [coarse_cfg.dx, fine_cfg.dx]}, fine


def schrodinger_representation_checks(doc, solver, sample, report, tag="schrodinger"):
    tol = doc["tolerances"]["representations"]
    x, t = sample.x_grid, sample.t_grid
    out = {}
    d = solver.solve(x, t, "deformed").values
    out["deformed"] = float(np.max(np.abs(d - sample.values)))
    report.check(f"{tag}: deformed vs direct", out["deformed"], tol)
    late = t[t >= 1.0]
    if len(late):
        lt = solver.solve(x, late, "longtime").values
        cols = np.isin(t, late)
        out["longtime"] = float(np.max(np.abs(lt - sample.values[:, cols])))
        out["longtime_vs_deformed"] = float(np.max(np.abs(lt - d[:, cols])))
        report.check(f"{tag}: long-time vs direct (t >= 1)", out["longtime"], tol)
        report.check(f"{tag}: long-time vs deformed (t >= 1)", out["longtime_vs_deformed"], tol)
    else:
        report.note(f"{tag}: no output time t >= 1, long-time form not compared")
    if solver.bc == "dirichlet":
        s = solver.solve(x, t, "sine").values
        out["sine"] = float(np.max(np.abs(s - sample.values)))
        report.check(f"{tag}: sine-kernel form vs direct", out["sine"], tol)
    return out


def schrodinger_classical_check(doc, setup, solver, sample, report):
    if not (setup.potential.is_zero and setup.data.bc_kind == "dirichlet"):
        report.note("classical comparison needs u = 0 and Dirichlet data; skipped")
        return None
    x, t = sample.x_grid, sample.t_grid
    c = classical_dirichlet(setup.data.q0, setup.data.g0, x, t, cutoff=solver.K,
                            time_step=solver.time_step)
    deformed = sample if sample.diagnostics.get("representation") == "deformed" \
        else solver.solve(x, t, "deformed")
    err = float(np.max(np.abs(deformed.values - c)))
    report.check("u = 0: deformed variable-coefficient form vs classical formula", err,
                 doc["tolerances"]["classical"])
    return err


def schrodinger_dropped_check(doc, solver, oracle, x, t, report):
    """Field of the eliminated term from oracle data equals the zero residues (often none)."""
    t = np.asarray([s for s in t if s >= DROPPED_FROM])
    if not len(t):
        return None
    dt = solver.dropped_term_field(oracle, x, t)
    expected = solver.residue_terms(x, t)
    err = float(np.max(np.abs(dt - expected)))
    report.check(f"{solver.bc}: eliminated-term contribution from oracle data", err,
                 doc["tolerances"]["vanishing_terms"])
    return err


def _solver(doc, setup):
    sec = doc["schrodinger"]
    return SchrodingerSolver(setup.potential, setup.data, sec["variant"], cutoff=sec["cutoff"],
                             time_step=sec["time_step"])


def run_solve_schrodinger(doc, out, compare=None):
    setup = build_schrodinger(doc)
    sec = doc["schrodinger"]
    compare = sec["compare"] if compare is None else compare
    report = Report(f"Schrodinger {sec['bc_kind']} solve ({sec['representation']})")
    solver = _solver(doc, setup)
    sample = solver.solve(setup.x, setup.t, sec["representation"])
    report.note(f"potential: {setup.potential.name}, cutoff K = {solver.K:g}, "
                f"bound states {solver.p_j}, boundary zeros {solver.zeros}")
    diag = {"solution": sample.diagnostics}
    reference = None
    if "oracle" in compare:
        extra, (oracle, ref) = schrodinger_oracle_checks(doc, setup, sample, report)
        diag.update(extra)
        if ref.shape == sample.values.shape:
            reference = ref
    if "classical" in compare:
        diag["classical_error"] = schrodinger_classical_check(doc, setup, solver, sample, report)
    if "representations" in compare:
        diag["representations"] = schrodinger_representation_checks(doc, solver, sample, report)
    write_field(os.path.join(out, "field.csv"), sample, complex_valued=True)
    _finish(doc, out, report, diag)
    if doc["figures"]:
        plotting.field_figure(os.path.join(out, "field.png"), sample, report.title, reference)
    return report


# -- Laplace pieces -----------------------------------------------------------------

def _laplace_cfg(doc, level=0):
    o = doc["oracle"]
    return LaplaceOracleConfig(o["h"] * 2**level, o["uniform_extent"], o["far_extent"])


def _fd(setup, cfg):
    d = setup.data
    return laplace_fd_quarterplane(setup.potential, d.f, d.g, d.beta, d.gamma1, d.gamma2, cfg)


def laplace_oracle_checks(doc, setup, sample, report, tag="laplace"):
    errs = []
    oracle = None
    for level in (1, 0):
        oracle = _fd(setup, _laplace_cfg(doc, level))
        errs.append(rel_l2(sample.values, oracle.sample(setup.x, setup.y).values))
    report.check(f"{tag}: rel L2 vs finite differences (h={doc['oracle']['h']:g})", errs[1],
                 doc["tolerances"]["oracle_laplace"], f"coarser grid {errs[0]:.3e}")
    report.check(f"{tag}: improves under oracle refinement", errs[0] / max(errs[1], 1e-300),
                 1.0, "error ratio coarse/fine", at_least=True)
    return {"oracle_rel_l2": errs}, oracle


BC_STRIP = 0.01


def _boundary_checks(doc, setup, sample, report, tag, sf):
    """Imaginary part on the output grid; boundary conditions on thin strips of width
    2 * BC_STRIP so the one-sided differences do not depend on the output spacing."""
    tol = doc["tolerances"]["oracle_laplace"]
    report.check(f"{tag}: max |Im q|", sample.diagnostics["max_imag"],
                 doc["tolerances"]["imaginary_part"])
    strip = BC_STRIP * np.arange(3.0)
    cutoff = doc["laplace"]["cutoff"]
    bottom = solve_algebraic(setup.potential, setup.data, setup.x, strip, cutoff=cutoff,
                             spectral_fns=sf).diagnostics
    left = solve_algebraic(setup.potential, setup.data, strip, setup.y, cutoff=cutoff,
                           spectral_fns=sf).diagnostics
    out = {}
    for side, d, norm in (("bc_bottom_error", bottom, "f_norm"), ("bc_left_error", left, "g_norm")):
        scale = max(d.get(norm) or 0.0, 1.0)
        out[side] = d[side]
        report.check(f"{tag}: {side.replace('_', ' ')} (spacing {BC_STRIP:g})",
                     d[side] / scale, tol, "relative to data size")
    return out


def run_solve_laplace(doc, out, compare=None):
    check_algebraic_preconditions(doc)
    setup = build_laplace(doc)
    sec = doc["laplace"]
    compare = sec["compare"] if compare is None else compare
    report = Report("Laplace quarter-plane solve (algebraic case)")
    sf = LaplaceSpectralFns(setup.potential, setup.data)
    sample = solve_algebraic(setup.potential, setup.data, setup.x, setup.y, cutoff=sec["cutoff"],
                             spectral_fns=sf)
    report.note(f"potential: {setup.potential.name}, gamma1 = {sec['gamma1']}, "
                f"gamma2 = {sec['gamma2']}")
    diag = {"solution": sample.diagnostics,
            "boundary": _boundary_checks(doc, setup, sample, report, "laplace", sf)}
    reference = None
    if "oracle" in compare:
        extra, oracle = laplace_oracle_checks(doc, setup, sample, report)
        diag.update(extra)
        reference = oracle.sample(setup.x, setup.y).values
    write_field(os.path.join(out, "field.csv"), sample, complex_valued=False)
    _finish(doc, out, report, diag)
    if doc["figures"]:
        plotting.field_figure(os.path.join(out, "field.png"), sample, report.title, reference)
    return report


def run_rh_jump(doc, out):
    setup = build_laplace(doc)
    sec = doc["laplace"]
    kappa = np.asarray(sec["kappa"], dtype=float)
    sf = LaplaceSpectralFns(setup.potential, setup.data)
    report = Report("Scalar jump relation on the imaginary axis")
    if setup.data.beta == 0:
        check_algebraic_preconditions(doc)
        cand = algebraic_candidate(setup.potential, setup.data, kappa, cutoff=sec["cutoff"],
                                   spectral_fns=sf)
        q00, tol, source = 0.0, doc["tolerances"]["rh_algebraic"], "algebraic"
    else:
        oracle = _fd(setup, _laplace_cfg(doc))
        cand = lambda k: exponential_transform(oracle.y, oracle.q_left, k)
        q00, tol, source = float(oracle.values[0, 0]), doc["tolerances"]["rh_oracle"], "oracle"
    per = np.array([rh_jump_residual(cand, sf, q00, [1j * kv]) for kv in kappa])
    g0 = np.asarray(cand(1j * kappa))
    write_columns(os.path.join(out, "rh_jump.csv"), ["kappa", "g0_re", "g0_im", "residual"],
                  [kappa, g0.real, g0.imag, per])
    report.note(f"candidate boundary transform from the {source} path")
    report.check(f"jump residual ({source} candidate)", float(np.max(per)), tol)
    _finish(doc, out, report, {"source": source, "q00": q00, "residuals": per})
    return report


# -- oracles --------------------------------------------------------------------------

def run_oracle_schrodinger(doc, out):
    setup = build_schrodinger(doc)
    cfg = _oracle_config(doc, setup.t.max(initial=0.0))
    times = _usable_times(setup.t, cfg.dt)
    o = _cn(setup, cfg, times)
    sample = o.sample(setup.x, times)
    write_field(os.path.join(out, "field.csv"), sample, complex_valued=True)
    write_columns(os.path.join(out, "traces.csv"), ["t", "q_re", "q_im", "qx_re", "qx_im"],
                  [o.t, o.q_boundary.real, o.q_boundary.imag, o.qx_boundary.real,
                   o.qx_boundary.imag])
    report = Report("Crank-Nicolson reference field")
    report.note(f"dx = {cfg.dx:g}, dt = {cfg.dt:g}, x_max = {cfg.x_max:g}")
    report.check("boundary leakage", o.leakage, doc["tolerances"]["leakage"])
    _finish(doc, out, report, o.diagnostics)
    return report


def run_oracle_laplace(doc, out):
    setup = build_laplace(doc)
    cfg = _laplace_cfg(doc)
    o = _fd(setup, cfg)
    sample = o.sample(setup.x, setup.y)
    write_field(os.path.join(out, "field.csv"), sample, complex_valued=False)
    write_columns(os.path.join(out, "traces_bottom.csv"), ["x", "q", "q_y"],
                  [o.x, o.q_bottom, o.qy_bottom])
    write_columns(os.path.join(out, "traces_left.csv"), ["y", "q", "q_x"],
                  [o.y, o.q_left, o.qx_left])
    report = Report("Finite-difference reference field")
    report.note(f"h = {cfg.h:g}, uniform to {cfg.uniform_extent:g}, far edge {cfg.far_extent:g}")
    _finish(doc, out, report, o.diagnostics)
    return report


# -- scattering and verification suites ------------------------------------------------

def scattering_checks(doc, report, out=None):
    pot = build_potential(doc["potential"])
    sec = doc["scattering"]
    k = grid(sec["k"])
    J = JostSolver(pot)
    a, b = J.a(k), J.b(k)
    w = J.a_wronskian(k, np.asarray(sec["wronskian_x"], dtype=float))
    unit = float(np.max(np.abs(np.abs(a) ** 2 - np.abs(b) ** 2 - 1)))
    wron = float(np.max(np.abs(w - a[:, None])))
    tol = doc["tolerances"]
    report.check("half-line |a|^2 - |b|^2 = 1", unit, tol["unitarity"])
    report.check("Wronskian a(k) independent of x", wron, tol["unitarity"])
    cols = {"k": k, "a_re": a.real, "a_im": a.imag, "b_re": b.real, "b_im": b.imag}
    diag = {"potential": pot.name, "unitarity": unit, "wronskian": wron}
    bound = {"half_line": J.find_bound_states("half_line")}
    if pot.domain_kind == "full_line":
        A, B = J.A(k), J.B(k)
        report.check("full-line |A|^2 - |B|^2 = 1",
                     float(np.max(np.abs(np.abs(A) ** 2 - np.abs(B) ** 2 - 1))), tol["unitarity"])
        cols.update({"A_re": A.real, "A_im": A.imag, "B_re": B.real, "B_im": B.imag})
        bound["full_line"] = J.find_bound_states("full_line")
        spec = doc["potential"]
        if spec["kind"] == "sech2" and spec["scale"] == 1.0:
            p, x0 = spec["p"], spec["x0"]
            x = grid(sec["x"])
            psi, _ = J.psi(x, k)
            kk, xx = k[:, None], x[None, :]
            exact = (kk + 1j * p * np.tanh(p * (xx - x0))) / (kk + 1j * p) * np.exp(1j * kk * xx)
            report.check("reflectionless psi closed form", float(np.max(np.abs(psi - exact))),
                         tol["closed_form"])
            report.check("reflectionless A closed form",
                         float(np.max(np.abs(A - (k - 1j * p) / (k + 1j * p)))), tol["closed_form"])
            report.check("reflectionless B = 0", float(np.max(np.abs(B))), tol["closed_form"])
    diag["bound_states"] = {v: {"p": bs.p, "a_dot": bs.a_dot} for v, bs in bound.items()}
    if out is not None:
        write_columns(os.path.join(out, "scattering.csv"), list(cols), list(cols.values()))
        rows = [(v, p, ad) for v, bs in bound.items() for p, ad in zip(bs.p, bs.a_dot)]
        write_columns(os.path.join(out, "bound_states.csv"),
                      ["full_line", "p", "a_dot_re", "a_dot_im"],
                      [[float(r[0] == "full_line") for r in rows], [r[1] for r in rows],
                       [r[2].real for r in rows], [r[2].imag for r in rows]])
        if doc["figures"]:
            plotting.scattering_figure(os.path.join(out, "scattering.png"), k, a, b)
    return diag


def run_scattering(doc, out):
    report = Report("Scattering data")
    diag = scattering_checks(doc, report, out)
    _finish(doc, out, report, diag)
    return report


def completeness_checks(doc, report, out=None):
    pot = build_potential(doc["potential"])
    sec = doc["completeness"]
    fn = build_function(sec["test_fn"])
    x = grid(sec["x"])
    tol = doc["tolerances"]["completeness_free" if pot.is_zero else "completeness"]
    r = completeness_reconstruct(fn, pot, x, variant=sec["variant"])
    report.check(f"expansion reconstructs test function ({r.diagnostics['variant']})",
                 r.sup_error, tol)
    diag = {"expansion": r.diagnostics | {"sup_error": r.sup_error}}
    cols = {"x": x, "f": np.real(fn(x)), "expansion_re": r.values.real,
            "expansion_im": r.values.imag}
    if r.diagnostics["variant"] == "half_line":
        s = completeness_sine_analogue(fn, pot, x)
        report.check("sine-kernel expansion reconstructs test function", s.sup_error, tol)
        diag["sine_expansion"] = s.diagnostics | {"sup_error": s.sup_error}
        cols.update({"sine_re": s.values.real, "sine_im": s.values.imag})
    if out is not None:
        write_columns(os.path.join(out, "reconstruction.csv"), list(cols), list(cols.values()))
    return diag


def global_relation_checks(doc, report, out=None):
    tol_order = doc["tolerances"]["convergence_order"]
    n = doc["oracle"]["refinements"]
    diag = {}
    setup = build_schrodinger(doc)
    solver = _solver(doc, setup)
    times = [0.5, 1.0]
    res, spacings = [], []
    for level in reversed(range(n)):
        cfg = _oracle_config(doc, max(times), level)
        o = crank_nicolson_halfline(setup.potential, setup.data.q0, setup.data.boundary,
                                    setup.data.bc_kind, cfg)
        res.append(solver.global_relation_residual(o, list(GR_K_SCHRODINGER), times))
        spacings.append(cfg.dx)
    order = _order(res[-2], res[-1])
    report.check(f"Schrodinger global relation: observed order (residual {res[-1]:.2e})",
                 order, tol_order, at_least=True)
    diag["schrodinger"] = {"dx": spacings, "residual": res, "order": order}
    if out is not None and doc["figures"]:
        plotting.convergence_figure(os.path.join(out, "global_relation_schrodinger.png"),
                                    spacings, {"residual": res}, "Schrodinger global relation")
    lsetup = build_laplace(doc)
    jost = JostSolver(lsetup.potential)
    bound = jost.find_bound_states("half_line").p
    if bound:
        # modes psi_b(x) cos(p y) do not decay in y, so the y transforms diverge
        report.note(f"laplace: potential has bound states {bound}; global relations skipped")
        return diag
    r5, r6, hs = [], [], []
    for level in reversed(range(n)):
        o = _fd(lsetup, _laplace_cfg(doc, level))
        a, b = global_relation_residual_laplace(o, jost, list(GR_K_PHI), list(GR_K_PSI))
        r5.append(a)
        r6.append(b)
        hs.append(o.config.h)
    for name, r in (("negative real axis", r5), ("second quadrant", r6)):
        order = _order(r[-2], r[-1])
        report.check(f"Laplace global relation, {name}: observed order (residual {r[-1]:.2e})",
                     order, tol_order, at_least=True)
    diag["laplace"] = {"h": hs, "negative_real": r5, "second_quadrant": r6}
    if out is not None and doc["figures"]:
        plotting.convergence_figure(os.path.join(out, "global_relation_laplace.png"), hs,
                                    {"negative real axis": r5, "second quadrant": r6},
                                    "Laplace global relations")
    return diag


def run_verify(doc, out, which):
    titles = {"unitarity": "Scattering invariants", "completeness": "Eigenfunction expansions",
              "global-relation": "Global relations on oracle traces",
              "all": "Full verification suite"}
    report = Report(titles[which])
    diag = {}
    if which in ("unitarity", "all"):
        diag["unitarity"] = scattering_checks(doc, report, out if which == "unitarity" else None)
    if which in ("completeness", "all"):
        diag["completeness"] = completeness_checks(doc, report, out)
    if which in ("global-relation", "all"):
        diag["global_relation"] = global_relation_checks(doc, report, out)
    if which == "all":
        diag["solve"] = _verify_solvers(doc, report, out)
    _finish(doc, out, report, diag)
    return report


def _verify_solvers(doc, report, out):
    diag = {}
    setup = build_schrodinger(doc)
    solver = _solver(doc, setup)
    sample = solver.solve(setup.x, setup.t, "direct")
    extra, (oracle, ref) = schrodinger_oracle_checks(doc, setup, sample, report)
    diag["schrodinger"] = extra
    diag["schrodinger"]["representations"] = schrodinger_representation_checks(
        doc, solver, sample, report)
    if setup.potential.is_zero and setup.data.bc_kind == "dirichlet":
        diag["schrodinger"]["classical"] = schrodinger_classical_check(doc, setup, solver,
                                                                       sample, report)
    full = crank_nicolson_halfline(setup.potential, setup.data.q0, setup.data.boundary,
                                   setup.data.bc_kind, _oracle_config(doc, setup.t.max()))
    diag["schrodinger"]["dropped"] = schrodinger_dropped_check(doc, solver, full, setup.x,
                                                               setup.t, report)
    lap = doc["laplace"]
    lsetup = build_laplace(doc)
    bound = JostSolver(lsetup.potential).find_bound_states("half_line").p
    if bound:
        report.note(f"laplace: potential has bound states {bound}; the transform representation "
                    "does not apply and its checks are skipped")
    elif lap["beta"] == 0 and lap["gamma1"] < 0:
        lsf = LaplaceSpectralFns(lsetup.potential, lsetup.data)
        lsample = solve_algebraic(lsetup.potential, lsetup.data, lsetup.x, lsetup.y,
                                  cutoff=lap["cutoff"], spectral_fns=lsf)
        bc = _boundary_checks(doc, lsetup, lsample, report, "laplace", lsf)
        extra, lor = laplace_oracle_checks(doc, lsetup, lsample, report)
        diag["laplace"] = extra | {"boundary": bc}
        inner = np.arange(0.5, float(lsetup.x.max()) + 1e-9, 0.5)
        dt = discarded_terms(lsetup.potential, lsetup.data, lor.y, lor.q_left, inner, inner,
                             cutoff=lap["cutoff"])
        report.check("laplace: discarded contour terms from oracle trace",
                     float(np.max(np.abs(dt))), doc["tolerances"]["vanishing_terms"])
        jump = run_rh_jump(doc, out)
        report.checks.extend(jump.checks)
        if doc["figures"]:
            plotting.field_figure(os.path.join(out, "laplace_field.png"), lsample,
                                  "Laplace algebraic case", lor.sample(lsetup.x, lsetup.y).values)
    else:
        report.note("laplace section is not in the algebraic case; only the oracle jump test runs")
        jump = run_rh_jump(doc, out)
        report.checks.extend(jump.checks)
    if doc["figures"]:
        plotting.field_figure(os.path.join(out, "schrodinger_field.png"), sample,
                              "Schrodinger solve", ref if ref.shape == sample.values.shape
                              else None)
    return diag


def _finish(doc, out, report, diagnostics):
    write_json(os.path.join(out, "diagnostics.json"),
               {"report": report.as_dict(), "diagnostics": diagnostics})
    write_json(os.path.join(out, "config.json"), doc)
    report.write(out)
    if doc["figures"] and report.checks:
        plotting.checks_figure(os.path.join(out, "checks.png"), report)
