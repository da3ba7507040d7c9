"""Acceptance criteria, each checked at its stated tolerance.

Every test prints one ``ACCEPTANCE <n> PASS|FAIL`` line and the full list is
repeated in the terminal summary.  Monte Carlo criteria go through the CLI so
that the determinism criterion can compare the CSV bytes of a second run.
"""

import csv
import io
import math

import numpy as np
import pytest

from percshare import REFERENCE_PARAMS as P
from percshare import analytic as an
from percshare.cli import run
from percshare.montecarlo import HexLattice, run_gdm_sweep, run_hex_site, trial_seed
from percshare.spatial import Window, coverage_grid, Deployment, sample_ppp, sca_union_equals_ca_union

MC_WINDOW = ["--width", "4000", "--pixel", "10", "--guard", "1800", "--trials", "200",
             "--seed", "0"]

MC_RUNS = {
    "bracket": ["sweep", "--strategy", "none",
                "--lambda-a-grid", "1.5e-7,2.0e-7,2.5e-7,3.0e-7,4.0e-7"] + MC_WINDOW,
    "ordering": ["sweep", "--strategy", "none,passive,active", "--lambda-a-grid", "5e-7",
                 "--lambda-b", "5e-7"] + MC_WINDOW,
    "active": ["sweep", "--strategy", "active", "--lambda-a-grid", "2.5e-7",
               "--lambda-b", "5e-7"] + MC_WINDOW,
}


def _csv_rows(text):
    body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def _run_csv(argv):
    code, text, _ = run(argv)
    assert code == 0, text
    return text


@pytest.fixture(scope="session")
def mc_csv():
    return {name: _run_csv(argv) for name, argv in MC_RUNS.items()}


@pytest.fixture(scope="session")
def reference_deployments():
    window = Window(4000, 4000, 1800, 10)
    return window, [sample_ppp(5e-7, window, trial_seed(0, 0, t)) for t in range(50)]


def _level_crossing(lam, freq, level):
    """First linearly interpolated density where ``freq`` reaches ``level``."""
    for i in range(1, len(freq)):
        if freq[i - 1] < level <= freq[i]:
            t = (level - freq[i - 1]) / (freq[i] - freq[i - 1])
            return lam[i - 1] + t * (lam[i] - lam[i - 1])
    return None


def _fmt_level(x):
    return "none" if x is None else f"{x:.3e}"


def half_width(row):
    return 0.5 * (float(row["ci_high"]) - float(row["ci_low"]))


def test_criterion_01_lambda_c1(acceptance_report):
    val = an.lambda_c1()
    ok = abs(val - 4 * math.log(2) / math.pi) <= 1e-12 and abs(val - 0.8825424006) <= 1e-10
    assert acceptance_report(1, ok, f"lambda_c(1) = {val:.13f}")


def test_criterion_02_critical_density(acceptance_report):
    val = an.critical_density_no_sharing(P)
    ok = abs(val - 2.73e-7) / 2.73e-7 <= 5e-3
    assert acceptance_report(2, ok, f"critical density {val:.6e} vs 2.73e-7 (rel {abs(val/2.73e-7-1):.2e})")


def test_criterion_03_radius_solvers(acceptance_report):
    worst_rel, inside = 0.0, True
    for lam in np.geomspace(1e-9, 1e-5, 50):
        closed = an.avg_coverage_radius(lam, P, method="closed")
        bis = an.avg_coverage_radius(lam, P, method="bisect")
        lo, hi = an.radius_bounds(lam, P)
        worst_rel = max(worst_rel, abs(closed - bis) / closed)
        inside &= lo < closed < hi and lo < bis < hi
    ok = worst_rel <= 1e-9 and inside
    assert acceptance_report(3, ok, f"max rel diff {worst_rel:.2e}; all inside bounds: {inside}")


def test_criterion_04_coverage_at_critical(acceptance_report):
    lam = an.critical_density_no_sharing(P)
    r = an.avg_coverage_radius(lam, P)
    p = an.coverage_probability_gdm(lam, r)
    ok = abs(p - 0.5) <= 1e-6 and abs(lam * math.pi * r * r - math.log(2)) <= 1e-9
    assert acceptance_report(4, ok, f"p_cov = {p:.12f}, lambda*pi*r^2 = {lam*math.pi*r*r:.12f}")


def test_criterion_05_transition_bracket(mc_csv, acceptance_report):
    rows = _csv_rows(mc_csv["bracket"])
    lam = np.array([float(r["lambda_a"]) for r in rows])
    freq = np.array([float(r["perc_prob"]) for r in rows])
    low_ok = freq[0] <= 0.15
    high_ok = freq[-1] >= 0.5
    rise = _level_crossing(lam, freq, 0.1)
    half = _level_crossing(lam, freq, 0.5)
    rise_ok = rise is not None and 1.5e-7 <= rise <= 4.0e-7
    ok = low_ok and high_ok and rise_ok
    pairs = ", ".join(f"{l:.1e}:{f:.3f}" for l, f in zip(lam, freq))
    detail = (f"freq {pairs}; <=0.15 at 1.5e-7: {low_ok}; >=0.5 at 4e-7: {high_ok}; "
              f"0.1-level rise at {_fmt_level(rise)}; 0.5-level at {_fmt_level(half)}")
    assert acceptance_report(5, ok, detail)


def test_criterion_06_strategy_ordering(mc_csv, acceptance_report):
    rows = {r["strategy"]: r for r in _csv_rows(mc_csv["ordering"])}
    f = {k: float(v["perc_prob"]) for k, v in rows.items()}
    hw = {k: half_width(v) for k, v in rows.items()}
    gap_ap = f["active"] - f["passive"]
    gap_pn = f["passive"] - f["none"]
    ok = (gap_ap > hw["active"] + hw["passive"] and gap_pn > hw["passive"] + hw["none"]
          and f["active"] >= 0.9)
    detail = (f"active {f['active']:.3f}, passive {f['passive']:.3f}, none {f['none']:.3f}; "
              f"gaps {gap_ap:.3f} vs {hw['active'] + hw['passive']:.3f} and "
              f"{gap_pn:.3f} vs {hw['passive'] + hw['none']:.3f}")
    assert acceptance_report(6, ok, detail)


def test_criterion_07_active_threshold(mc_csv, acceptance_report):
    row = _csv_rows(mc_csv["active"])[0]
    f = float(row["perc_prob"])
    assert acceptance_report(7, f > 0.8, f"active crossing frequency {f:.3f} at (2.5e-7, 5e-7)")


def test_criterion_08_sca_union(reference_deployments, acceptance_report):
    window, deps = reference_deployments
    total = sum(sca_union_equals_ca_union(pts, window, P).mismatches for pts in deps)
    assert acceptance_report(8, total == 0, f"{total} mismatched pixels over {len(deps)} deployments")


def test_criterion_09_cover_count(reference_deployments, acceptance_report):
    window, deps = reference_deployments
    empty = np.empty((0, 2))
    worst = max(int(coverage_grid("none", Deployment(pts, empty, 5e-7, 0.0, window), P)
                    .cover_count.max()) for pts in deps)
    bound = 1 + an.max_potential_serving(P)
    ok = worst == 2 and bound == 2
    assert acceptance_report(9, ok, f"max cover_count {worst}, bound 1 + N = {bound}")


def test_criterion_10_gdm(acceptance_report):
    r = 50.0
    crit = an.gdm_critical_density(r)
    window = Window(2000, 2000, 2 * r, 5)
    res = run_gdm_sweep([0.5 * crit, crit, 2.0 * crit], r, 200, window, master_seed=0)
    lo, mid, hi = res.perc_prob
    ok = lo < 0.1 and 0.1 < mid < 0.9 and hi > 0.9
    detail = f"freq at 0.5x/1x/2x: {lo:.3f}/{mid:.3f}/{hi:.3f} (need <0.1, in (0.1,0.9), >0.9)"
    assert acceptance_report(10, ok, detail)


def test_criterion_11_hexagon(acceptance_report):
    env_ok = True
    for r in np.geomspace(10.0, 2000.0, 10):
        for frac in np.linspace(0.001, 0.45, 10):
            e = an.hex_envelopes(frac * r, r)
            env_ok &= e.s_in < math.pi * r * r < e.s_out
    r = 900.0
    e = an.hex_envelopes(1e-6 * r, r)
    conv = max(abs(e.s_in / (math.pi * r * r) - 1), abs(e.s_out / (math.pi * r * r) - 1))
    freq = {p: run_hex_site(HexLattice(100, 100, p, seed=0), 500) for p in (0.3, 0.4, 0.5, 0.6, 0.7)}
    hex_ok = (freq[0.3] < 0.1 and freq[0.4] < 0.1 and freq[0.6] > 0.9 and freq[0.7] > 0.9
              and 0.1 < freq[0.5] < 0.9)
    ok = env_ok and conv <= 1e-4 and hex_ok
    fs = ", ".join(f"{p}:{f:.3f}" for p, f in freq.items())
    detail = f"envelopes ordered on 100 points: {env_ok}; rel gap at a=1e-6 r: {conv:.1e}; hex {fs}"
    assert acceptance_report(11, ok, detail)


def test_criterion_12_determinism(mc_csv, acceptance_report):
    same = {name: _run_csv(argv) == mc_csv[name] for name, argv in MC_RUNS.items()}
    ok = all(same.values())
    assert acceptance_report(12, ok, f"byte-identical CSV on rerun: {same}")
