"""Image metrics and decay fitting.

Visibility is ``(I_max - I_min) / (I_max + I_min)`` along a line profile;
similarity is the normalized pixelwise inner product of two images. Decay
data are fitted with ``y = y0 + A * exp(-t / tau)`` by a damped
Gauss-Newton (Levenberg-Marquardt) iteration with an analytic Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class Profile:
    values: np.ndarray
    axis: str
    offset: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError("profile must be nonempty and finite")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DecayFit:
    y0: float
    A: float
    tau: float
    residual_norm: float
    half_widths: tuple[float, float, float]
    iterations: int

    def __call__(self, t):
        return self.y0 + self.A * np.exp(-np.asarray(t, dtype=float) / self.tau)


def centroid(image: np.ndarray) -> tuple[int, int]:
    """Intensity-weighted center ``(row, col)``, rounded to the nearest sample."""
    img = np.clip(np.asarray(image, dtype=float), 0, None)
    total = img.sum()
    if total == 0:
        raise ValueError("centroid undefined for an all-zero image")
    rows, cols = np.indices(img.shape)
    return int(round((rows * img).sum() / total)), int(round((cols * img).sum() / total))


def extract_profile(image: np.ndarray, axis: str = "vertical", anchor="centroid",
                    anchor_image: np.ndarray | None = None) -> Profile:
    """Row or column of ``image`` through ``anchor``.

    ``axis="vertical"`` returns a column (values run top to bottom). ``anchor``
    is ``"centroid"`` or an explicit column/row index. The centroid may be taken
    from ``anchor_image`` instead of ``image`` itself.
    """
    img = np.asarray(image, dtype=float)
    if img.size == 0:
        raise ValueError("image is empty")
    if axis not in ("vertical", "horizontal"):
        raise ValueError(f"axis must be 'vertical' or 'horizontal', got {axis!r}")
    if anchor == "centroid":
        r, c = centroid(img if anchor_image is None else anchor_image)
        index = c if axis == "vertical" else r
    else:
        index = int(anchor)
    if axis == "vertical":
        return Profile(img[:, index].copy(), axis, index)
    return Profile(img[index, :].copy(), axis, index)


def visibility(p: Profile | np.ndarray) -> float:
    v = np.clip(p.values if isinstance(p, Profile) else np.asarray(p, dtype=float), 0, None)
    hi, lo = v.max(), v.min()
    if hi + lo <= 0:
        raise ValueError("visibility undefined for an all-zero profile")
    return float((hi - lo) / (hi + lo))


def similarity(A: np.ndarray, B: np.ndarray) -> float:
    a = np.clip(np.asarray(A, dtype=float), 0, None)
    b = np.clip(np.asarray(B, dtype=float), 0, None)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    na, nb = np.sum(a * a), np.sum(b * b)
    if na == 0 or nb == 0:
        raise ValueError("similarity undefined for an all-zero image")
    # normalize first so huge accumulated counts cannot overflow the product
    a = a / math.sqrt(na)
    b = b / math.sqrt(nb)
    return float(min(1.0, np.sum(a * b)))


def decay_model(t, y0, A, tau):
    return y0 + A * np.exp(-np.asarray(t, dtype=float) / tau)


def _jacobian(t, A, tau):
    e = np.exp(-t / tau)
    return np.column_stack([np.ones_like(t), e, A * t * e / tau ** 2])


def fit_decay(t, y, max_iter: int = 200, tol: float = 1e-12) -> DecayFit:
    """Least-squares fit of ``y0 + A * exp(-t / tau)``.

    Starts from ``y0 = min(y)``, ``A = max(y) - min(y)``, ``tau = span / 3``,
    and again from the best point of a coarse tau scan; the lower-cost
    solution wins. Raises :class:`FitError` when the data do not decay or the iteration
    does not converge.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and y must be 1-D arrays of equal length")
    if t.size < 4:
        raise ValueError(f"need at least 4 samples, got {t.size}")
    if np.unique(t).size != t.size:
        raise ValueError("sample times must be distinct")
    order = np.argsort(t)
    t, y = t[order], y[order]
    span = t[-1] - t[0]
    if np.ptp(y) == 0:
        raise FitError("tau unidentifiable: data are constant")

    if y[0] < y[-1]:
        raise FitError("tau unidentifiable: data do not decay")
    # shift time so the fit is well conditioned; A is referred back to t = 0 at the end
    ts = t - t[0]
    starts = [np.array([y.min(), y.max() - y.min(), span / 3.0]), _profile_start(ts, y)]
    best, failure = None, None
    for p0 in starts:
        try:
            p, cost, it = _levenberg_marquardt(ts, y, p0, max_iter, tol)
        except FitError as exc:
            failure = exc
            continue
        if best is None or cost < best[1]:
            best = (p, cost, it)
    if best is None:
        raise failure
    p, cost, it = best

    y0, A, tau = p
    if not (tau > 0 and A > 0) or tau > 100 * span:
        raise FitError(f"tau unidentifiable: fitted A={A:.3g}, tau={tau:.3g}")

    dof = max(t.size - 3, 1)
    J = _jacobian(ts, A, tau)
    s2 = cost / dof
    try:
        cov = np.linalg.inv(J.T @ J) * s2
        half = stats.t.ppf(0.975, dof) * np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        half = np.full(3, np.inf)
    # refer amplitude to t = 0
    A0 = A * math.exp(t[0] / tau)
    return DecayFit(float(y0), float(A0), float(tau), float(math.sqrt(cost)),
                    (float(half[0]), float(half[1] * math.exp(t[0] / tau)), float(half[2])), it)


def _profile_start(ts, y, n: int = 60):
    """Best point of a log-spaced tau scan with y0 and A solved linearly.

    A second starting point for the iteration: once tau falls well below the
    sample spacing the tau derivative vanishes at every sample and damped
    Gauss-Newton can stall on that plateau.
    """
    span = ts[-1]
    step = np.min(np.diff(ts))
    best = (np.inf, None)
    for tau in np.geomspace(step / 10, 100 * span, n):
        M = np.column_stack([np.ones_like(ts), np.exp(-ts / tau)])
        coef, *_ = np.linalg.lstsq(M, y, rcond=None)
        r = y - M @ coef
        if r @ r < best[0] and coef[1] > 0:
            best = (r @ r, np.array([coef[0], coef[1], tau]))
    return best[1] if best[1] is not None else np.array([y.min(), y.max() - y.min(), span / 3.0])


def _levenberg_marquardt(ts, y, p, max_iter, tol):
    def residual(q):
        return y - decay_model(ts, *q)

    r = residual(p)
    cost = r @ r
    lam = 1e-3
    scale_y = max(np.abs(y).max(), 1e-300)
    for it in range(1, max_iter + 1):
        J = _jacobian(ts, p[1], p[2])
        JTJ = J.T @ J
        g = J.T @ r
        D = np.diag(np.diag(JTJ)) + 1e-300
        improved = False
        for _ in range(50):
            try:
                step = np.linalg.solve(JTJ + lam * D, g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            q = p + step
            if q[2] <= 0:
                lam *= 10
                continue
            rq = residual(q)
            cq = rq @ rq
            if cq <= cost:
                improved = True
                break
            lam *= 10
        if not improved:
            break
        rel_step = np.abs(step) / np.maximum(np.abs(q), 1e-300)
        dcost = cost - cq
        p, r, cost = q, rq, cq
        lam = max(lam / 10, 1e-15)
        if np.max(rel_step) < 1e-12 or dcost <= tol * cost or cost <= (1e-15 * scale_y) ** 2 * y.size:
            break
    else:
        raise FitError(f"decay fit did not converge in {max_iter} iterations (cost={cost:.3g}, params={p})")
    return p, cost, it
