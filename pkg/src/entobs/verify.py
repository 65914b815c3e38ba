"""Verification suites grouping the individual claim checks."""

import numpy as np

from .entanglement import Variant, family_negativity, negativity_batch, observable_arrays, observable_formula
from .evolution import (DEFAULT_SEED, FIGURES, VerificationReport, breaking_demo, calibrate_time_scale,
                        compute_surface, default_grids, evolve_batch, figure_hamiltonian, fit_caption,
                        verify_conservation, verify_relation_over_time)
from .spin import Form, named_hamiltonian
from .states import MixedInitialState, family_matrix, mixed_initial, random_family_params

SUITES = ("closed_forms", "observable_relations", "invariance", "conservation", "figures", "all")
INVARIANCE_PAIRINGS = ((1, Form.H1), (1, Form.H2), (2, Form.H1), (2, Form.H2),
                       (3, Form.H1), (4, Form.H1), (5, Form.H2), (6, Form.H2))


def _family_sample(family: int, trials: int, seed: int):
    rng = np.random.default_rng([seed, family])
    params = [random_family_params(family, rng) for _ in range(trials)]
    mats = np.stack([family_matrix(p) for p in params])
    return params, mats, negativity_batch(mats)


def _report(claim, trials, errors, tol, params, seed):
    errors = np.asarray(errors)
    failures = [(params[k], float(errors[k])) for k in np.flatnonzero(errors > tol)]
    return VerificationReport(claim, trials, float(errors.max(initial=0.0)), tol, failures, seed)


def closed_forms(trials: int = 1000, seed: int = DEFAULT_SEED, tol: float = 1e-12) -> list:
    reports = []
    for family in range(1, 7):
        params, _, oracle = _family_sample(family, trials, seed)
        corrected = np.array([family_negativity(p, Variant.CORRECTED) for p in params])
        reports.append(_report(f"closed form (corrected), family {family}", trials,
                               np.abs(corrected - oracle), tol, params, seed))
        if family in (1, 2):
            printed = np.array([family_negativity(p, Variant.AS_PRINTED) for p in params])
            reports.append(_report(f"closed form (as printed), family {family}", trials,
                                   np.abs(printed - oracle), tol, params, seed))
    return reports


def observable_relations(trials: int = 1000, seed: int = DEFAULT_SEED, tol: float = 1e-12) -> list:
    reports = []
    for family in range(1, 7):
        params, mats, oracle = _family_sample(family, trials, seed)
        s11, s12, sz, s2 = observable_arrays(mats)
        n = observable_formula(family, s11, s12, sz, s2, Variant.CORRECTED)
        reports.append(_report(f"observable relation (corrected), family {family}", trials,
                               np.abs(n - oracle), tol, params, seed))
    return reports


def invariance(trials: int = 100, seed: int = DEFAULT_SEED, tol: float = 1e-10, t_grid=None) -> list:
    return [verify_relation_over_time(f, form, trials, t_grid, tol, seed) for f, form in INVARIANCE_PAIRINGS]


def breaking_witness(theta: float = 0.0, f2: float = 0.5) -> VerificationReport:
    """N_psi under H[2,2] must swing from <= 0.01 up to >= 0.49."""
    trace = breaking_demo(theta, "H22", {"f2": f2})
    n = np.array([v for _, v in trace])
    shortfall = max(0.0, 0.49 - n.max(), n.min() - 0.01)
    return VerificationReport("conservation broken: Psi under H22 (theta=0, f2=0.5)", len(trace), shortfall,
                              0.0, notes=f"max N = {n.max():.6f}, min N = {n.min():.3e}")


def conservation(trials: int = 100, seed: int = DEFAULT_SEED, tol: float = 1e-10, t_grid=None) -> list:
    return [verify_conservation("PsiUnderH1", trials, t_grid, tol, seed),
            verify_conservation("PhiUnderH2Symmetric", trials, t_grid, tol, seed),
            breaking_witness()]


# mixed state -> the figure pairings it appears in
GENERATION_PAIRINGS = {3: (5, 7), 4: (5, 7), 5: (6, 8), 6: (6, 8)}


def entanglement_generation(theta: float = np.pi / 4, steps: int = 401, threshold: float = 0.05) -> list:
    reports = []
    for k, figs in GENERATION_PAIRINGS.items():
        rho0 = mixed_initial(MixedInitialState(k, theta))
        for fid in figs:
            h = named_hamiltonian(figure_hamiltonian(fid))
            kappa = calibrate_time_scale(fid, member=k)
            times = np.linspace(0.0, np.pi, steps) / kappa
            n = negativity_batch(evolve_batch(rho0, h, times))
            err = max(n[0] - 1e-12, threshold - n.max(), 0.0)
            reports.append(VerificationReport(
                f"entanglement generation: rho^M_{k} under {FIGURES[fid].form.value} (fig. {fid})",
                steps, err, 0.0, notes=f"N(0) = {n[0]:.1e}, max N = {n.max():.6f}"))
    return reports


def figures(theta_steps: int = 101, time_steps: int = 101, params: dict | None = None,
            caption_tol: float = 1e-6, pointwise_tol: float = 1e-10) -> list:
    reports = []
    for fid, fig in FIGURES.items():
        members = (None,) if len(fig.members) == 1 else {5: (3, 4), 6: (5, 6), 7: (3, 4), 8: (5, 6)}[fid]
        for member in members:
            kappa = calibrate_time_scale(fid, params, member)
            thetas, times = default_grids(fid, kappa, theta_steps, time_steps)
            surf = compute_surface(fid, thetas, times, params, member, kappa)
            fit = fit_caption(surf)
            tag = f"fig. {fid}" + ("" if member is None else f" (rho^M_{member})")
            obs_notes = ", ".join(f"{k} caption residual {v:.2e}" for k, v in fit.observable_residuals.items())
            cap_err = fit.residual if fit.gamma == fig.expected_gamma else float("inf")
            reports.append(VerificationReport(
                f"{tag} caption N, kappa={kappa:.12g}, gamma={fit.gamma:g}", surf.n_oracle.size, cap_err,
                caption_tol, notes=f"expected gamma {fig.expected_gamma:g}; caption {fig.caption_symbol}; "
                                   + obs_notes))
            point_err = np.abs(surf.n_corrected - surf.n_oracle)
            worst = float(np.nanmax(point_err)) if np.all(np.isfinite(point_err)) else float("inf")
            unclassified = int(np.count_nonzero(~surf.in_family))
            failures = [({"theta": float(surf.thetas[i]), "t": float(surf.times[j])}, "not in family")
                        for i, j in zip(*np.nonzero(~surf.in_family))]
            reports.append(VerificationReport(
                f"{tag} corrected formula vs oracle", surf.n_oracle.size,
                worst if unclassified == 0 else float("inf"), pointwise_tol, failures,
                notes=f"{unclassified} samples outside family {fig.families[0 if member is None else members.index(member)]}"))
    reports.extend(entanglement_generation())
    return reports


def run_suite(name: str, trials: int | None = None, seed: int = DEFAULT_SEED, tol: float | None = None,
              theta_steps: int = 101, time_steps: int = 101) -> list:
    """Run a named suite; ``trials``/``tol`` override each suite's own defaults."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    kw = lambda default_trials, default_tol: dict(trials=trials or default_trials, seed=seed,
                                                  tol=default_tol if tol is None else tol)
    out = []
    if name in ("closed_forms", "all"):
        out += closed_forms(**kw(1000, 1e-12))
    if name in ("observable_relations", "all"):
        out += observable_relations(**kw(1000, 1e-12))
    if name in ("invariance", "all"):
        out += invariance(**kw(100, 1e-10))
    if name in ("conservation", "all"):
        out += conservation(**kw(100, 1e-10))
    if name in ("figures", "all"):
        out += figures(theta_steps, time_steps)
    return out


def format_table(reports: list) -> str:
    width = max(len(r.claim) for r in reports) if reports else 10
    lines = [f"{'claim':<{width}}  {'trials':>7}  {'max error':>10}  {'tol':>8}  result"]
    for r in reports:
        lines.append(f"{r.claim:<{width}}  {r.trials:>7d}  {r.max_abs_error:>10.3e}  {r.tol:>8.1e}  "
                     f"{'PASS' if r.passed else 'FAIL'}" + (f"  [{r.notes}]" if r.notes else ""))
    return "\n".join(lines)
