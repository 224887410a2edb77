"""Named experiment runs that regenerate the measurement figures.

Every scenario takes an :class:`~eitmem.config.ExperimentConfig` and an
output directory, writes CSV/PGM/PNG files plus a manifest, and returns a
:class:`~eitmem.report.ScenarioReport`.

Camera frames tile one region per probe direction side by side: columns
``[0, n)`` see probe 1's emission direction, ``[n, 2n)`` probe 2's.

Seeds: stream ``(scenario, point, stream)`` gets a base seed from
``numpy.random.SeedSequence([seed, scenario, point, stream])``; frame ``i``
of that stream uses ``base + i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import plotting
from .analysis import FitError, extract_profile, fit_decay, similarity, visibility
from .config import ConfigError, ExperimentConfig
from .detection import accumulate_exposures, gate_overlap
from .field import energy, to_camera_plane, to_cloud_plane
from .medium import PulseEnvelope, evolve_spinwave, read_spinwave, retrieve_into, write_spinwave
from .report import ReportWriter, ScenarioReport
from .sequencer import build_schedule, run_trial, storage_efficiency

LABELS = ("1", "2")
SCENARIO_IDS = {"temporal": 1, "dual-image": 2, "photon-sweep": 3, "decay": 4}
STREAM_RETRIEVED, STREAM_LEAKAGE, STREAM_BACKGROUND = 0, 1, 2


def stream_seed(master: int, *key: int) -> int:
    return int(np.random.SeedSequence([master, *key]).generate_state(1, dtype=np.uint32)[0])


def region(label: str, n: int) -> slice:
    i = LABELS.index(label)
    return slice(i * n, (i + 1) * n)


def tile(maps: dict, n: int) -> np.ndarray:
    out = np.zeros((n, len(LABELS) * n))
    for label, m in maps.items():
        out[:, region(label, n)] += m
    return out


def background_tile(cfg: ExperimentConfig, exposure_time: float, timing=None) -> np.ndarray:
    n = cfg["grid.n"]
    return tile({lb: np.full((n, n), cfg.ccd(exposure_time, lb, timing).background_per_pixel)
                 for lb in LABELS}, n)


def _fmt_photons(p: float) -> str:
    return f"{p:g}".replace(".", "p")


@dataclass
class _Stored:
    leak: object
    wave: object
    transit: float


def _store(cfg: ExperimentConfig, timing, fields: dict, photons: float) -> dict:
    """Write and hold each channel's mask-plane field; returns leakage and held spin waves."""
    slot = build_schedule(timing).slots[0]
    med = cfg.medium()
    layout = cfg.layout()
    v_g = med.group_velocity
    out = {}
    for label, f in fields.items():
        pulse = PulseEnvelope.square(slot.probe_on, timing.probe_width, photons)
        leak, wave = write_spinwave(pulse, to_cloud_plane(f, layout), med.channels[label], v_g, med.cloud,
                                    slot.coupling_off, med.tau_coherence, med.transmission)
        held = evolve_spinwave(wave, timing.storage_time, med.cloud)
        out[label] = _Stored(leak, held, med.cloud.length / v_g)
    return out


def _camera_intensity(field, cfg) -> np.ndarray:
    return to_camera_plane(field, cfg.layout()).intensity


def _arrival_windows(stored: _Stored, timing) -> tuple[tuple, tuple]:
    leak = stored.leak.trace.window()
    entry = stored.wave.entry_profile
    shift = timing.storage_time + stored.transit
    r0, r1 = entry.shifted(shift).window()
    return leak, (r0, r1)


def _mean_counts(intensity_tile, window, cfg, exposure_time, bg_tile, timing=None) -> np.ndarray:
    ccd = cfg.ccd(exposure_time, None, timing)
    # gate opened on the arrival window, as done by adjusting the trigger delay
    overlap = gate_overlap(window, (window[0], window[0] + ccd.gate_width))
    return ccd.quantum_efficiency * ccd.gates_per_exposure * overlap * intensity_tile + bg_tile


def _accumulate(mean, n_frames, seed, n, groups=1):
    """Grouped sums plus per-frame region totals, one Poisson draw per frame."""
    sums = np.zeros((groups,) + mean.shape, dtype=np.int64)
    totals = np.empty((n_frames, len(LABELS)), dtype=np.int64)
    for i in range(n_frames):
        counts = np.random.default_rng(seed + i).poisson(mean)
        sums[i % groups] += counts
        for j, lb in enumerate(LABELS):
            totals[i, j] = counts[:, region(lb, n)].sum()
    return sums, totals


def image_metrics(raw_retrieved, retrieved, leakage, axis="vertical", anchor="centroid"):
    """Visibility and similarity of one camera region.

    Visibility uses the raw accumulated counts along a profile through the
    digit (anchored on the background-subtracted leakage image), so the
    noise floor enters ``I_min`` as it does in a measured count profile.
    Similarity compares background-subtracted retrieved and leakage images.
    """
    anchor_img = np.clip(leakage, 0, None)
    if anchor == "centroid":
        prof = extract_profile(raw_retrieved, axis, "centroid", anchor_image=anchor_img)
    else:
        prof = extract_profile(raw_retrieved, axis, int(anchor))
    try:
        V = visibility(prof)
    except ValueError:
        V = float("nan")
    try:
        R = similarity(retrieved, leakage)
    except ValueError:
        R = float("nan")
    return V, R


# temporal


def run_scenario_temporal(cfg: ExperimentConfig, out_dir) -> ScenarioReport:
    w = ReportWriter(out_dir, "temporal", cfg)
    timing = cfg.timing()
    schedule = build_schedule(timing)
    slot = schedule.slots[0]
    med = cfg.medium()
    photons = cfg["scenario.photons_per_pulse"]
    fields = {"1": cfg.mask_field(cfg["scenario.mask1"]), "2": cfg.mask_field(cfg["scenario.mask2"])}
    recs = run_trial(slot, timing, med, fields, photons, cfg.layout())

    dt = timing.probe_width / 500
    t_stop = max(max(r.retrieved_trace.window()[1], r.leakage_trace.window()[1]) for r in recs.values())
    nbins = int(math.ceil((t_stop - slot.probe_on) / dt)) + 100
    edges = (np.arange(nbins + 1) - 50) * dt
    centers = 0.5 * (edges[1:] + edges[:-1])
    traces, eff_rows, metric_rows = {}, [], []
    for label, rec in recs.items():
        leak, _ = np.histogram(rec.leakage_trace.t - slot.probe_on, edges, weights=rec.leakage_trace.photons)
        ret, _ = np.histogram(rec.retrieved_trace.t - slot.probe_on, edges, weights=rec.retrieved_trace.photons)
        traces[label] = (centers, leak, ret)
        w.csv(f"temporal_trace_ch{label}.csv", ("time_s", "leakage_photons", "retrieved_photons"),
              zip(centers, leak, ret), role="trace")
        eff = storage_efficiency(rec) if rec.leakage_energy > 0 else float("nan")
        eff_rows.append((label, photons, rec.input_energy, rec.leakage_energy, rec.retrieved_energy, eff,
                         rec.input_referenced_efficiency, rec.storage_time))
        metric_rows.append({"photons_per_pulse": photons, "channel": label, "efficiency": eff,
                            "storage_time": rec.storage_time})
    w.csv("temporal_efficiency.csv", ("channel", "photons_per_pulse", "input_photons", "leakage_photons",
                                      "retrieved_photons", "efficiency", "input_referenced_efficiency",
                                      "storage_time"), eff_rows)
    w.csv("temporal_schedule.csv", ("slot", "probe_on", "probe_off", "coupling_on", "coupling_off", "read_on"),
          [(s.index, s.probe_on, s.probe_off, s.coupling_on, s.coupling_off, s.read_on) for s in schedule.slots],
          role="schedule")
    w.metrics(metric_rows)
    w.figure("temporal.png", plotting.temporal_figure(traces, schedule.slots[:3]))
    w.report.extras["efficiency"] = {r[0]: r[5] for r in eff_rows}
    w.report.extras["slots_per_window"] = schedule.slots_per_window
    return w.finish()


# dual image


def crosstalk_matrix(cfg: ExperimentConfig, stored: dict) -> dict:
    """Energy retrieved into direction ``j`` from the wave stored by channel ``i``."""
    med = cfg.medium()
    lam = cfg["optics.wavelength"]
    waist = cfg["scenario.beam_waist"]
    out = {}
    for i, s in stored.items():
        ch = med.channels[i]
        for j in LABELS:
            if i == j:
                f = read_spinwave(s.wave, ch)
            else:
                f = retrieve_into(s.wave, ch, med.channels[j].k_transverse(lam), waist, med.cloud)
            out[(i, j)] = f
    return out


def run_scenario_dual_image(cfg: ExperimentConfig, out_dir, mask1: str | None = None, mask2: str | None = None,
                            enable=("1", "2")) -> ScenarioReport:
    enable = tuple(sorted(set(str(e) for e in enable)))
    if not enable or any(e not in LABELS for e in enable):
        raise ConfigError(f"enable must be a nonempty subset of {LABELS}", "enable")
    w = ReportWriter(out_dir, "dual-image", cfg)
    n = cfg["grid.n"]
    timing = cfg.timing()
    photons = cfg["scenario.photons_per_pulse"]
    masks = {"1": mask1 or cfg["scenario.mask1"], "2": mask2 or cfg["scenario.mask2"]}
    fields = {lb: cfg.mask_field(masks[lb]) for lb in LABELS}
    stored = _store(cfg, timing, fields, photons)
    fields_out = crosstalk_matrix(cfg, stored)
    matrix = {k: energy(f) for k, f in fields_out.items()}
    med = cfg.medium()
    lam = cfg["optics.wavelength"]

    xt_rows = []
    for (i, j), e in sorted(matrix.items()):
        coef = 1.0 if i == j else math.sqrt(e / matrix[(i, i)]) if matrix[(i, i)] > 0 else 0.0
        xt_rows.append((i, j, e, e / matrix[(i, i)] if matrix[(i, i)] > 0 else 0.0, coef))
    w.csv("dual_crosstalk.csv", ("stored_channel", "readout_direction", "retrieved_photons",
                                 "ratio_to_matched", "coefficient"), xt_rows)

    runs = [(f"probe{e}", (e,)) for e in enable]
    if len(enable) == 2:
        runs.append(("both", enable))
    exposure = cfg["scenario.dual_exposure_time"]
    frames = cfg["scenario.dual_frames"]
    bg_tile = background_tile(cfg, exposure)
    leak_win, ret_win = _arrival_windows(stored["1"], timing)
    master = cfg["seed"]
    sid = SCENARIO_IDS["dual-image"]
    bg_sum, bg_totals = _accumulate(bg_tile, frames, stream_seed(master, sid, 0, STREAM_BACKGROUND), n)
    bg_sum = bg_sum[0]

    panels, titles, test_rows, metric_rows = [], [], [], []
    for k, (name, active) in enumerate(runs, start=1):
        leak_maps = {i: _camera_intensity(stored[i].leak.field, cfg) for i in active}
        ret_maps = {j: sum(_camera_intensity(fields_out[(i, j)], cfg) for i in active) for j in LABELS}
        leak_mean = _mean_counts(tile(leak_maps, n), leak_win, cfg, exposure, bg_tile)
        ret_mean = _mean_counts(tile(ret_maps, n), ret_win, cfg, exposure, bg_tile)
        leak_sum, _ = _accumulate(leak_mean, frames, stream_seed(master, sid, k, STREAM_LEAKAGE), n)
        ret_sum, ret_totals = _accumulate(ret_mean, frames, stream_seed(master, sid, k, STREAM_RETRIEVED), n)
        leak_sum, ret_sum = leak_sum[0], ret_sum[0]
        leak_img = leak_sum - bg_sum
        ret_img = ret_sum - bg_sum
        meta = {"scenario": "dual-image", "run": name, "frames": frames, "exposure_time": exposure,
                "gates_per_exposure": cfg.ccd(exposure).gates_per_exposure, "gate_width": cfg["detection.gate_width"],
                "background_subtracted": "clamped"}
        w.pgm16(f"dual_{name}_leak.pgm", np.clip(leak_img, 0, None), dict(meta, gate_start=leak_win[0], image="leakage"))
        w.pgm16(f"dual_{name}_retrieved.pgm", np.clip(ret_img, 0, None),
                dict(meta, gate_start=ret_win[0], image="retrieved"))
        panels += [np.clip(leak_img, 0, None), np.clip(ret_img, 0, None)]
        titles += [f"{name}: leakage", f"{name}: retrieved"]
        for lb in active:
            sl = region(lb, n)
            V, R = image_metrics(ret_sum[:, sl], ret_img[:, sl], leak_img[:, sl], cfg["scenario.profile_axis"],
                                 cfg["scenario.profile_anchor"])
            metric_rows.append({"photons_per_pulse": photons, "channel": lb, "V": V, "R": R,
                                "storage_time": timing.storage_time})
        if len(active) == 1:
            other = [lb for lb in LABELS if lb not in active][0]
            j = LABELS.index(other)
            res = stats.ttest_ind(ret_totals[:, j], bg_totals[:, j], equal_var=False)
            p = float(res.pvalue) if np.isfinite(res.pvalue) else 1.0
            test_rows.append((name, other, frames, ret_totals[:, j].mean(), bg_totals[:, j].mean(), p,
                              "background" if p > 0.01 else "signal"))
    if test_rows:
        w.csv("dual_background_test.csv", ("run", "region", "frames", "mean_counts", "background_mean_counts",
                                           "p_value", "verdict"), test_rows)
    w.metrics(metric_rows)
    w.figure("dual_image.png", plotting.image_panel(panels, titles))
    w.report.extras.update(matrix=matrix, background_tests=test_rows,
                           delta_k=abs(med.channels["2"].k_transverse(lam)[0] - med.channels["1"].k_transverse(lam)[0]))
    return w.finish()


# photon sweep


def sweep_point(cfg: ExperimentConfig, unit_maps: dict, windows, photons: float, frames: int, point: int,
                exposure: float, bg_tile: np.ndarray, groups: int):
    """Accumulate retrieved, leakage and background exposures for one photon number.

    ``unit_maps`` holds per-channel camera intensities for one photon per pulse.
    Returns per-channel metric dicts and per-stream frame totals.
    """
    n = cfg["grid.n"]
    master, sid = cfg["seed"], SCENARIO_IDS["photon-sweep"]
    leak_win, ret_win = windows
    ret_mean = _mean_counts(tile({lb: m["retrieved"] * photons for lb, m in unit_maps.items()}, n), ret_win, cfg,
                            exposure, bg_tile)
    leak_mean = _mean_counts(tile({lb: m["leakage"] * photons for lb, m in unit_maps.items()}, n), leak_win, cfg,
                             exposure, bg_tile)
    ret, ret_tot = _accumulate(ret_mean, frames, stream_seed(master, sid, point, STREAM_RETRIEVED), n, groups)
    leak, leak_tot = _accumulate(leak_mean, frames, stream_seed(master, sid, point, STREAM_LEAKAGE), n, groups)
    bg, bg_tot = _accumulate(bg_tile, frames, stream_seed(master, sid, point, STREAM_BACKGROUND), n, groups)
    axis, anchor = cfg["scenario.profile_axis"], cfg["scenario.profile_anchor"]

    R_raw, L_raw, B_raw = ret.sum(0), leak.sum(0), bg.sum(0)
    rows = []
    for lb in LABELS:
        sl = region(lb, n)
        V, R = image_metrics(R_raw[:, sl], (R_raw - B_raw)[:, sl], (L_raw - B_raw)[:, sl], axis, anchor)
        V_std, R_std = float("nan"), float("nan")
        if groups > 1:
            # jackknife over interleaved frame groups: drop one group at a time
            jk = np.array([image_metrics((R_raw - ret[g])[:, sl], (R_raw - ret[g] - B_raw + bg[g])[:, sl],
                                         (L_raw - leak[g] - B_raw + bg[g])[:, sl], axis, anchor)
                           for g in range(groups)])
            V_std, R_std = (math.sqrt((groups - 1) / groups * np.nansum((c - np.nanmean(c)) ** 2)) for c in jk.T)
        rows.append({"photons_per_pulse": photons, "channel": lb, "frames": frames, "V": V, "V_std": V_std,
                     "R": R, "R_std": R_std, "signal_counts": float((R_raw - B_raw)[:, sl].sum()),
                     "background_counts": float(B_raw[:, sl].sum())})
    images = {"retrieved": R_raw - B_raw, "leakage": L_raw - B_raw}
    return rows, images, {"retrieved": ret_tot, "leakage": leak_tot, "background": bg_tot}


def sweep_unit_maps(cfg: ExperimentConfig):
    timing = cfg.timing()
    f = cfg.mask_field(cfg["scenario.sweep_mask"])
    stored = _store(cfg, timing, {lb: f for lb in LABELS}, 1.0)
    med = cfg.medium()
    maps = {lb: {"retrieved": _camera_intensity(read_spinwave(s.wave, med.channels[lb]), cfg),
                 "leakage": _camera_intensity(s.leak.field, cfg)} for lb, s in stored.items()}
    return maps, _arrival_windows(stored["1"], timing)


def run_scenario_photon_sweep(cfg: ExperimentConfig, out_dir) -> ScenarioReport:
    w = ReportWriter(out_dir, "photon-sweep", cfg)
    exposure = cfg["scenario.sweep_exposure_time"]
    groups = cfg["scenario.subensembles"]
    bg_tile = background_tile(cfg, exposure)
    unit_maps, windows = sweep_unit_maps(cfg)
    rows, total_rows, panels, titles = [], [], [], []
    for point, (p, frames) in enumerate(zip(cfg["scenario.photon_sweep"], cfg["scenario.sweep_frames"])):
        pr, images, totals = sweep_point(cfg, unit_maps, windows, p, frames, point, exposure, bg_tile, groups)
        rows += pr
        tag = _fmt_photons(p)
        meta = {"scenario": "photon-sweep", "photons_per_pulse": p, "frames": frames, "exposure_time": exposure,
                "gates_per_exposure": cfg.ccd(exposure).gates_per_exposure, "background_subtracted": "clamped"}
        for kind, img in images.items():
            w.pgm16(f"sweep_{tag}_{kind}.pgm", np.clip(img, 0, None), dict(meta, image=kind))
        panels.append(np.clip(images["retrieved"], 0, None))
        titles.append(f"{p:g} photons/pulse, {frames} frames")
        for stream, tot in totals.items():
            for i, fr in enumerate(tot):
                total_rows.append((p, stream, i, *fr))
    w.csv("photon_sweep.csv", ("photons_per_pulse", "channel", "frames", "V", "V_std", "R", "R_std",
                               "signal_counts", "background_counts"),
          [[r[c] for c in ("photons_per_pulse", "channel", "frames", "V", "V_std", "R", "R_std", "signal_counts",
                           "background_counts")] for r in rows])
    w.csv("sweep_frame_totals.csv", ("photons_per_pulse", "stream", "frame", "counts_region1", "counts_region2"),
          total_rows, role="frame_totals")
    w.metrics([{k: r[k] for k in ("photons_per_pulse", "channel", "V", "R")} for r in rows])
    w.figure("photon_sweep.png", plotting.sweep_figure(rows))
    w.figure("photon_sweep_images.png", plotting.image_panel(panels, titles))
    w.report.extras["sweep"] = rows
    return w.finish()


# decay


def decay_timing(cfg: ExperimentConfig, storage_time: float):
    """Timing for one storage-time point; the pulse period stretches to fit long holds."""
    base = cfg.timing()
    need = base.switch_off_fraction * base.probe_width + storage_time + base.coupling_width
    return cfg.timing(storage_time=storage_time, pulse_period=max(base.pulse_period, need))


@dataclass
class DecayModel:
    """Noiseless expectations for the storage-time sweep (channel 1)."""

    t: np.ndarray
    photons: np.ndarray          # retrieved photons per pulse
    gates: np.ndarray            # gates per exposure at each point
    maps: list                   # retrieved camera intensity per pulse
    windows: list
    background_total: np.ndarray  # background counts in region 1 per exposure


def decay_model(cfg: ExperimentConfig) -> DecayModel:
    ts = np.asarray(cfg["scenario.storage_sweep"], dtype=float)
    if ts.size < 4:
        raise ConfigError("decay sweep needs at least 4 storage times", "scenario.storage_sweep")
    photons = cfg["scenario.decay_photons"]
    f = cfg.mask_field(cfg["scenario.mask1"])
    exposure = cfg["scenario.decay_exposure_time"]
    n = cfg["grid.n"]
    med = cfg.medium()
    E, gates, maps, windows, bgs = [], [], [], [], []
    for t in ts:
        timing = decay_timing(cfg, float(t))
        s = _store(cfg, timing, {"1": f}, photons)["1"]
        out = read_spinwave(s.wave, med.channels["1"])
        E.append(energy(out))
        maps.append(_camera_intensity(out, cfg))
        windows.append(_arrival_windows(s, timing)[1])
        ccd = cfg.ccd(exposure, "1", timing)
        gates.append(ccd.gates_per_exposure)
        bgs.append(ccd.background_per_pixel * n * n)
    return DecayModel(ts, np.array(E), np.array(gates), maps, windows, np.array(bgs))


def decay_series(cfg: ExperimentConfig, seed: int, model: DecayModel | None = None, noise: bool | None = None):
    """Retrieved photons per pulse at each storage time, as inferred from camera counts.

    Uses whole-region totals (a sum of Poisson pixels is Poisson in the sum),
    background-subtracted and divided by ``QE * gates * frames``.
    """
    model = model or decay_model(cfg)
    noise = cfg["scenario.decay_noise"] if noise is None else noise
    if not noise:
        return model.photons.copy()
    qe = cfg["detection.quantum_efficiency"]
    frames = cfg["scenario.decay_frames"]
    rng = np.random.default_rng(stream_seed(seed, SCENARIO_IDS["decay"], 0, STREAM_RETRIEVED))
    scale = qe * model.gates * frames
    signal = rng.poisson(scale * model.photons + frames * model.background_total)
    background = rng.poisson(frames * model.background_total)
    return (signal - background) / scale


def run_scenario_decay(cfg: ExperimentConfig, out_dir) -> ScenarioReport:
    w = ReportWriter(out_dir, "decay", cfg)
    model = decay_model(cfg)
    master, sid = cfg["seed"], SCENARIO_IDS["decay"]
    measured = decay_series(cfg, master, model)
    fit = fit_decay(model.t, measured)
    n = cfg["grid.n"]
    exposure = cfg["scenario.decay_exposure_time"]
    frames = cfg["scenario.decay_frames"]
    ref = model.maps[int(np.argmin(model.t))]
    rows, panels, titles = [], [], []
    for k, t in enumerate(model.t):
        timing = decay_timing(cfg, float(t))
        bg = background_tile(cfg, exposure, timing)[:, region("1", n)]
        ccd = cfg.ccd(exposure, "1", timing)
        if cfg["scenario.decay_noise"]:
            mean = ccd.quantum_efficiency * ccd.gates_per_exposure * model.maps[k] + bg
            sig, _ = accumulate_exposures(mean, frames, stream_seed(master, sid, k + 1, STREAM_RETRIEVED))
            bgs, _ = accumulate_exposures(bg, frames, stream_seed(master, sid, k + 1, STREAM_BACKGROUND))
            raw, img = sig[0].astype(float), (sig[0] - bgs[0]).astype(float)
        else:
            img = ccd.quantum_efficiency * ccd.gates_per_exposure * frames * model.maps[k]
            raw = img + frames * bg
        V, _ = image_metrics(raw, img, img, cfg["scenario.decay_profile_axis"], cfg["scenario.profile_anchor"])
        R_clean = similarity(model.maps[k], ref) if model.maps[k].any() else float("nan")
        rows.append((t, model.photons[k], measured[k], V, R_clean))
        w.pgm16(f"decay_{k:02d}.pgm", np.clip(img, 0, None),
                {"scenario": "decay", "storage_time": float(t), "frames": frames, "exposure_time": exposure,
                 "gates_per_exposure": ccd.gates_per_exposure, "background_subtracted": "clamped"})
        panels.append(np.clip(img, 0, None))
        titles.append(f"{t * 1e6:.2f} us")
    w.csv("decay_series.csv", ("storage_time", "expected_photons", "measured_photons", "V", "R_noiseless"), rows)
    fit_t = np.linspace(model.t.min(), model.t.max(), 200)
    w.csv("decay_fit_curve.csv", ("t", "fitted_photons"), zip(fit_t, fit(fit_t)), role="fit_curve")
    w.metrics([{"photons_per_pulse": cfg["scenario.decay_photons"], "channel": "1", "tau": fit.tau,
                "residual": fit.residual_norm}]
              + [{"photons_per_pulse": cfg["scenario.decay_photons"], "channel": "1", "V": r[3], "R": r[4],
                  "storage_time": r[0]} for r in rows])
    w.figure("decay.png", plotting.decay_figure(model.t, measured, fit_t, fit(fit_t), fit.tau))
    w.figure("decay_images.png", plotting.image_panel(panels, titles, ncols=4))
    w.report.extras.update(fit=fit, measured=measured, expected=model.photons)
    return w.finish()


SCENARIOS = {
    "temporal": run_scenario_temporal,
    "dual-image": run_scenario_dual_image,
    "photon-sweep": run_scenario_photon_sweep,
    "decay": run_scenario_decay,
}

__all__ = ["SCENARIOS", "FitError", "decay_model", "decay_series", "run_scenario_decay",
           "run_scenario_dual_image", "run_scenario_photon_sweep", "run_scenario_temporal"]
