"""Acceptance criteria, one test each.

Every test prints a single ``[acceptance N] PASS|FAIL: ...`` line with the
measured quantities, then asserts. Run ``pytest tests/test_acceptance.py -v -s``
or ``python tests/test_acceptance.py`` to see the summary lines.
"""

import math
import time

import numpy as np
import pytest

from eitmem.analysis import fit_decay, similarity, visibility
from eitmem.config import default_config
from eitmem.detection import SPCMModel, spcm_estimate
from eitmem.field import ComplexFieldGrid, OpticalLayout, TransverseGrid, energy, propagate_angular_spectrum, relay_4f
from eitmem.medium import (AtomicCloud, PulseEnvelope, SpinWave, StorageChannel, evolve_spinwave, read_spinwave,
                           write_spinwave)
from eitmem.report import read_manifest
from eitmem.scenarios import (SCENARIOS, decay_model, decay_series, run_scenario_decay, run_scenario_dual_image,
                              run_scenario_temporal)
from eitmem.sequencer import build_schedule

LAM = 795e-9


def report(capsys, n, checks: dict):
    ok = all(v[0] for v in checks.values())
    detail = "; ".join(f"{k}: {v[1]} [{'ok' if v[0] else 'FAIL'}]" for k, v in checks.items())
    line = f"[acceptance {n}] {'PASS' if ok else 'FAIL'}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


@pytest.fixture(scope="module")
def cfg():
    return default_config()


@pytest.fixture(scope="module")
def sweep_run(cfg, tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    t0 = time.perf_counter()
    rep = SCENARIOS["photon-sweep"](cfg, out)
    return rep, out, time.perf_counter() - t0


def test_criterion_1_efficiency_pinning(cfg, tmp_path, capsys):
    t0 = time.perf_counter()
    rep = run_scenario_temporal(cfg, tmp_path)
    dt = time.perf_counter() - t0
    eff = rep.extras["efficiency"]
    checks = {
        "channel 1": (abs(eff["1"] - 0.35) <= 1e-6, f"{eff['1']:.9f} vs 0.35 +- 1e-6"),
        "channel 2": (abs(eff["2"] - 0.23) <= 1e-6, f"{eff['2']:.9f} vs 0.23 +- 1e-6"),
        "runtime": (dt < 5.0, f"{dt:.2f} s < 5 s"),
    }
    assert report(capsys, 1, checks)


def test_criterion_2_schedule(cfg, capsys):
    s = build_schedule(cfg.timing())
    checks = {
        "slots/window": (s.slots_per_window == 50, f"{s.slots_per_window} == 50"),
        "pulses/s": (s.pulses_per_second == 50_000, f"{s.pulses_per_second:g} == 50000"),
    }
    assert report(capsys, 2, checks)


def test_criterion_3_crosstalk(cfg, tmp_path, capsys):
    t0 = time.perf_counter()
    rep = run_scenario_dual_image(cfg, tmp_path / "both", enable=("1", "2"))
    single = run_scenario_dual_image(cfg, tmp_path / "one", enable=("1",))
    dt = time.perf_counter() - t0
    m = rep.extras["matrix"]
    ratios = (m[("1", "2")] / m[("1", "1")], m[("2", "1")] / m[("2", "2")])
    (_, region, frames, _, _, p, _), = single.extras["background_tests"]
    checks = {
        "off/diag": (max(ratios) < 1e-3, f"{max(ratios):.3g} < 1e-3"),
        "probe-2 region background": (region == "2" and p > 0.01 and frames >= 100,
                                      f"Welch p = {p:.3f} > 0.01 over {frames} frames"),
        "runtime": (dt < 60.0, f"{dt:.1f} s < 60 s"),
    }
    assert report(capsys, 3, checks)


def test_criterion_4_metric_formulas(capsys):
    rng = np.random.default_rng(4)
    A = rng.uniform(size=(6, 6))
    a, b = np.zeros((4, 4)), np.zeros((4, 4))
    a[:2], b[2:] = 1.0, 1.0
    self_err = max(abs(similarity(X, X) - 1.0) for X in (rng.uniform(0, 1e3, (32, 32)) for _ in range(100)))
    checks = {
        "V min 0": (visibility(np.array([0.0, 5.0, 2.0])) == 1.0, "1.0"),
        "V constant": (visibility(np.full(4, 3.0)) == 0.0, "0.0"),
        "V [2,4,6,4,2]": (visibility(np.array([2.0, 4, 6, 4, 2])) == 0.5, "0.5"),
        "V scale": (visibility(7.5 * np.array([2.0, 4, 6])) == visibility(np.array([2.0, 4, 6])), "invariant"),
        "R scale": (abs(similarity(A, 3 * A) - 1.0) <= 1e-15, "R(A, 3A) = 1"),
        "R orthogonal": (similarity(a, b) == 0.0, "0.0"),
        "R hand case": (abs(similarity(np.array([[1.0, 1], [0, 0]]), np.array([[1.0, 0], [1, 0]])) - 0.5) <= 1e-15,
                        "0.5"),
        "R(A,A)": (self_err <= 1e-12, f"max |R-1| = {self_err:.1e} over 100 images"),
    }
    assert report(capsys, 4, checks)


def _trend_ok(rows, channel, key):
    pts = sorted((r for r in rows if r["channel"] == channel), key=lambda r: r["photons_per_pulse"])
    drops = []
    for lo, hi in zip(pts, pts[1:]):
        if hi[key] < lo[key]:
            sigma = max(lo[key + "_std"], hi[key + "_std"])
            drops.append((hi["photons_per_pulse"], lo[key] - hi[key], sigma))
    ok = len(drops) == 0 or (len(drops) == 1 and drops[0][1] <= drops[0][2])
    text = ", ".join(f"drop {d:.2g} at {p:g} (sigma {s:.2g})" for p, d, s in drops) or "monotone"
    return ok, text


def test_criterion_5_photon_sweep(sweep_run, capsys):
    rep, _, dt = sweep_run
    rows = rep.extras["sweep"]
    checks = {}
    for ch in ("1", "2"):
        for key in ("V", "R"):
            checks[f"{key} trend ch{ch}"] = _trend_ok(rows, ch, key)
    for ch in ("1", "2"):
        low = next(r for r in rows if r["channel"] == ch and r["photons_per_pulse"] == 1.2)
        checks[f"1.2 photons ch{ch}"] = (low["V"] >= 0.4 and low["R"] >= 0.7,
                                         f"V = {low['V']:.3f} >= 0.4, R = {low['R']:.3f} >= 0.7, "
                                         f"{low['frames']} frames")
    checks["runtime"] = (dt < 600.0, f"{dt:.0f} s < 600 s")
    assert report(capsys, 5, checks)


def test_criterion_6_spcm(capsys):
    n = 1_000_000
    two = spcm_estimate(2.0, 500e-9, SPCMModel(dead_time=50e-9), n, 6, poisson=False)
    free = spcm_estimate(2.0, 500e-9, SPCMModel(dead_time=0.0), n, 6)
    sigma = math.sqrt(2.0 / n)
    checks = {
        "2 photons, 50 ns dead time": (abs(two - 1.90) <= 0.02, f"{two:.4f} vs 1.90 +- 0.02"),
        "dead time 0": (abs(free - 2.0) <= 3 * sigma, f"{free:.4f} vs 2 +- {3 * sigma:.4f}"),
    }
    assert report(capsys, 6, checks)


def test_criterion_7_decay(cfg, tmp_path, capsys):
    t0 = time.perf_counter()
    quiet = cfg.with_overrides({"scenario.decay_noise": False})
    rep = run_scenario_decay(quiet, tmp_path)
    tau = quiet["medium.tau_coherence"]
    noiseless = rep.extras["fit"].tau
    model = decay_model(cfg)
    fits = np.array([fit_decay(model.t, decay_series(cfg, seed, model)).tau for seed in range(1000)])
    coverage = np.mean(np.abs(fits / tau - 1) <= 0.10)
    dt = time.perf_counter() - t0
    checks = {
        "noiseless": (abs(noiseless / tau - 1) <= 0.02, f"tau = {noiseless * 1e6:.4f} us vs 10 us +- 2%"),
        "noisy coverage": (coverage >= 0.95, f"{coverage:.3f} of 1000 seeds within 10%"),
        "runtime": (dt < 120.0, f"{dt:.1f} s < 120 s"),
    }
    assert report(capsys, 7, checks)


def test_criterion_8_fourier_optics(capsys):
    g = TransverseGrid.square(256, 20e-6)
    X, Y = g.mesh()
    spot = lambda x0: ComplexFieldGrid(g, np.exp(-((X - x0) ** 2 + Y ** 2) / (60e-6) ** 2), LAM)
    outs = [relay_4f(spot(x0), OpticalLayout(0.3, 0.5)) for x0 in (-600e-6, 600e-6)]
    cx = [(o.intensity * o.grid.mesh()[0]).sum() / o.intensity.sum() for o in outs]
    mag = abs(cx[1] - cx[0]) / 1200e-6

    w0 = 100e-6
    wide = TransverseGrid.square(512, 5e-6)
    Xw, Yw = wide.mesh()
    beam = ComplexFieldGrid(wide, np.exp(-(Xw ** 2 + Yw ** 2) / w0 ** 2), LAM)
    zR = math.pi * w0 ** 2 / LAM
    out = propagate_angular_spectrum(beam, zR)
    w = 2 * math.sqrt((out.intensity * Xw ** 2).sum() / out.intensity.sum())
    w_err = abs(w / (w0 * math.sqrt(2)) - 1)
    e_err = max(abs(energy(propagate_angular_spectrum(beam, z)) / energy(beam) - 1) for z in (1e-3, zR, 0.5))
    checks = {
        "magnification": (abs(mag / (5 / 3) - 1) <= 0.005, f"{mag:.5f} vs 5/3 +- 0.5%"),
        "energy": (e_err <= 1e-10, f"rel err {e_err:.1e} <= 1e-10"),
        "Gaussian waist": (w_err <= 0.01, f"rel err {w_err:.2e} <= 1%"),
    }
    assert report(capsys, 8, checks)


def test_criterion_9_determinism(cfg, sweep_run, tmp_path, capsys):
    _, first_sweep, _ = sweep_run
    checks = {}
    for name, runner in SCENARIOS.items():
        if name == "photon-sweep":
            a = first_sweep
        else:
            a = tmp_path / name / "a"
            runner(cfg, a)
        b = tmp_path / name / "b"
        runner(cfg, b)
        ma, mb = read_manifest(a), read_manifest(b)
        same = ma == mb and all((a / e["path"]).read_bytes() == (b / e["path"]).read_bytes() for e in ma)
        checks[name] = (same, f"{len(ma)} files identical" if same else "outputs differ")
    assert report(capsys, 9, checks)


def test_criterion_10_physics_invariants(capsys):
    rng = np.random.default_rng(10)
    g = TransverseGrid.square(4, 30e-6)
    worst_acct, gain_violations = 0.0, 0
    for _ in range(10_000):
        img = ComplexFieldGrid(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape), LAM)
        pulse = PulseEnvelope(np.linspace(0, 500e-9, 9), rng.uniform(0, 5, 8))
        ch = StorageChannel("1", rng.uniform(0, 0.1), rng.uniform(0.01, 1), rng.uniform(0, 1))
        cloud = AtomicCloud(v_rms=rng.uniform(0, 5))
        leak, wave = write_spinwave(pulse, img, ch, rng.uniform(1e4, 2e5), cloud, rng.uniform(-2e-7, 2e-6),
                                    tau_coherence=rng.uniform(1e-6, 1e-4), transmission=rng.uniform(0, 1))
        total = leak.energy + wave.excitations / ch.write_efficiency + leak.absorbed_energy
        worst_acct = max(worst_acct, abs(total - leak.input_energy) / leak.input_energy)
        held = evolve_spinwave(wave, rng.uniform(0, 2e-5), cloud)
        out = energy(read_spinwave(held, ch))
        tol = 1 + 1e-12
        gain_violations += not (out <= held.excitations * tol and held.excitations <= wave.excitations * tol
                                and wave.excitations <= leak.input_energy * tol)

    grid = TransverseGrid.square(64, 2e-6)
    w = SpinWave(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape), (1e5, 0.0), 0.0, 10e-6, "1",
                 LAM)
    cloud = AtomicCloud(v_rms=1.0)
    a = evolve_spinwave(evolve_spinwave(w, 1.1e-6, cloud), 2.4e-6, cloud)
    b = evolve_spinwave(w, 3.5e-6, cloud)
    semi = np.linalg.norm(a.amplitude - b.amplitude) / np.linalg.norm(b.amplitude)
    checks = {
        "write accounting": (worst_acct <= 1e-9, f"max rel err {worst_acct:.1e} <= 1e-9"),
        "no gain": (gain_violations == 0, f"{gain_violations} violations in 10^4 configs"),
        "semigroup": (semi <= 1e-9, f"rel err {semi:.1e} <= 1e-9"),
    }
    assert report(capsys, 10, checks)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
