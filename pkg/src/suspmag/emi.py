"""Motor interference versus sensor separation, and tether-length selection.

Noise amplitude is modelled as a power law ``N(d) = k * d**p`` fitted by
ordinary least squares in log-log space. An inverse-square law is the special
case ``p = -2`` and can be imposed through ``fixed_exponent``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_column, check_positive
from .errors import EmiError, NoFeasibleLengthError

REFERENCE_NOISE = ((5.0, 3.2), (8.0, 1.6), (10.0, 0.7), (12.0, 0.4), (14.0, 0.2))

DEFAULT_NOISE_THRESHOLD_NT = 1.0


@dataclass(frozen=True)
class NoiseSample:
    distance_m: float
    noise_nT: float

    def __post_init__(self):
        check_positive("distance_m", self.distance_m, EmiError)
        if not (math.isfinite(self.noise_nT) and self.noise_nT >= 0):
            raise EmiError(f"noise_nT must be non-negative, got {self.noise_nT!r}")


@dataclass(frozen=True)
class EmiModel:
    coefficient_k: float
    exponent_p: float
    fit_residual_rms: float
    n_samples: int = 0
    n_excluded: int = 0
    fixed_exponent: bool = False

    def __post_init__(self):
        if not self.coefficient_k > 0:
            raise EmiError("coefficient_k must be positive")
        if not self.exponent_p < 0:
            raise EmiError(
                f"fitted exponent {self.exponent_p:.4g} is not negative: noise does not "
                "fall off with distance")

    def predict(self, distance_m):
        return predict_noise(self, distance_m)

    def to_dict(self):
        return asdict(self)


class PowerLawNoiseModel(RegressorMixin, BaseEstimator):
    """Log-log least-squares power law, scikit-learn style.

    Parameters
    ----------
    fixed_exponent : float or None
        If given, only the coefficient is fitted.

    Attributes
    ----------
    coefficient_k_, exponent_p_ : float
    fit_residual_rms_ : float
        RMS of the residuals of ``ln(noise)``.
    n_excluded_ : int
        Zero-noise samples dropped before fitting (no logarithm exists).
    """

    def __init__(self, fixed_exponent=None):
        self.fixed_exponent = fixed_exponent

    def fit(self, X, y):
        d = check_column(X, "X")
        y = np.asarray(y, dtype=float).ravel()
        if y.shape != d.shape:
            raise EmiError("distance and noise columns differ in length")
        if np.any(d <= 0):
            raise EmiError("distances must be positive")
        if np.any(y < 0) or not np.all(np.isfinite(y)):
            raise EmiError("noise values must be finite and non-negative")
        keep = y > 0
        self.n_excluded_ = int(np.count_nonzero(~keep))
        if self.n_excluded_:
            warnings.warn(f"{self.n_excluded_} zero-noise sample(s) excluded from the log fit",
                          stacklevel=2)
        d, y = d[keep], y[keep]
        if d.size < (1 if self.fixed_exponent is not None else 2):
            raise EmiError("not enough positive-noise samples to fit")
        ld, ly = np.log(d), np.log(y)
        if self.fixed_exponent is not None:
            p = float(self.fixed_exponent)
            ln_k = float(np.mean(ly - p * ld))
        else:
            if np.ptp(ld) == 0:
                raise EmiError("degenerate fit: all samples share one distance")
            ld_c = ld - ld.mean()
            p = float(np.dot(ld_c, ly - ly.mean()) / np.dot(ld_c, ld_c))
            ln_k = float(ly.mean() - p * ld.mean())
        resid = ly - (ln_k + p * ld)
        self.exponent_p_ = p
        self.coefficient_k_ = math.exp(ln_k)
        self.fit_residual_rms_ = float(np.sqrt(np.mean(resid ** 2)))
        self.n_samples_ = int(d.size)
        return self

    def predict(self, X):
        check_is_fitted(self, "coefficient_k_")
        d = check_column(X, "X")
        if np.any(d <= 0):
            raise EmiError("prediction distance must be positive")
        return self.coefficient_k_ * d ** self.exponent_p_

    def to_model(self) -> EmiModel:
        check_is_fitted(self, "coefficient_k_")
        return EmiModel(self.coefficient_k_, self.exponent_p_, self.fit_residual_rms_,
                        self.n_samples_, self.n_excluded_, self.fixed_exponent is not None)


def fit_noise_model(samples, fixed_exponent=None) -> EmiModel:
    samples = list(samples)
    if not samples:
        raise EmiError("no noise samples given")
    d = [s.distance_m for s in samples]
    y = [s.noise_nT for s in samples]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = PowerLawNoiseModel(fixed_exponent=fixed_exponent).fit(d, y)
    return est.to_model()


def predict_noise(model: EmiModel, distance_m):
    """Predicted noise in nT; accepts a scalar or an array of distances."""
    arr = np.asarray(distance_m, dtype=float)
    if np.any(~(arr > 0)):
        raise EmiError(f"distance must be positive, got {distance_m!r}")
    out = model.coefficient_k * arr ** model.exponent_p
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SelectionPolicy:
    """``threshold``: shortest length whose predicted noise is within the limit.

    ``weighted``: minimise ``w1*A + w2*Ts + w3*N`` after min-max scaling each
    column to [0, 1]; ties go to the shorter length.
    """
    kind: str = "threshold"
    noise_threshold_nT: float = DEFAULT_NOISE_THRESHOLD_NT
    weights: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.kind not in ("threshold", "weighted"):
            raise EmiError(f"unknown selection policy {self.kind!r}")
        if self.kind == "threshold":
            check_positive("noise_threshold_nT", self.noise_threshold_nT, EmiError)
        if len(self.weights) != 3 or any(w < 0 for w in self.weights) or sum(self.weights) == 0:
            raise EmiError("weights must be three non-negative numbers, not all zero")


@dataclass(frozen=True)
class SelectionReport:
    length_m: float
    policy: SelectionPolicy
    model: EmiModel
    table: list

    def to_dict(self):
        return {
            "selected_length_m": self.length_m,
            "policy": asdict(self.policy) | {"weights": list(self.policy.weights)},
            "model": self.model.to_dict(),
            "table": self.table,
        }


def _minmax(col):
    col = np.asarray(col, dtype=float)
    span = col.max() - col.min()
    return np.zeros_like(col) if span == 0 else (col - col.min()) / span


def select_tether_length(sweep, model: EmiModel, policy: SelectionPolicy | None = None):
    """Choose a cable length from ``(L, A, Ts)`` rows and a noise model.

    Returns a :class:`SelectionReport`; its ``table`` lists every candidate with
    the predicted noise and, for the weighted policy, the score.
    """
    policy = policy or SelectionPolicy()
    rows = [tuple(float(v) for v in (r.length_m, r.amplitude_m, r.settling_s))
            if hasattr(r, "length_m") else tuple(float(v) for v in r) for r in sweep]
    if not rows:
        raise EmiError("empty sweep")
    lengths = [r[0] for r in rows]
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise EmiError("sweep must be sorted by strictly increasing length")
    noise = predict_noise(model, np.array(lengths))
    table = [{"length_m": L, "amplitude_m": A, "settling_s": T, "noise_nT": float(N)}
             for (L, A, T), N in zip(rows, noise)]

    if policy.kind == "threshold":
        feasible = [i for i, N in enumerate(noise) if N <= policy.noise_threshold_nT]
        for i, row in enumerate(table):
            row["feasible"] = i in feasible
        if not feasible:
            raise NoFeasibleLengthError(
                f"no length in the sweep brings predicted noise to "
                f"{policy.noise_threshold_nT:g} nT (best {noise.min():.4g} nT at "
                f"{lengths[int(np.argmin(noise))]:g} m)")
        chosen = feasible[0]
    else:
        w1, w2, w3 = policy.weights
        score = (w1 * _minmax([r[1] for r in rows]) + w2 * _minmax([r[2] for r in rows])
                 + w3 * _minmax(noise))
        for row, s in zip(table, score):
            row["score"] = float(s)
        chosen = int(np.flatnonzero(score == score.min())[0])
    return SelectionReport(lengths[chosen], policy, model, table)


def read_noise_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"distance_m", "noise_nT"} <= set(reader.fieldnames):
            raise EmiError(f"{path}: expected header distance_m,noise_nT")
        try:
            return [NoiseSample(float(r["distance_m"]), float(r["noise_nT"])) for r in reader]
        except ValueError as exc:
            raise EmiError(f"{path}: {exc}") from exc


def read_sweep_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = {"length_m", "amplitude_m", "settling_s"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise EmiError(f"{path}: expected header length_m,amplitude_m,settling_s")
        try:
            rows = [(float(r["length_m"]), float(r["amplitude_m"]), float(r["settling_s"]))
                    for r in reader]
        except ValueError as exc:
            raise EmiError(f"{path}: {exc}") from exc
    return sorted(rows)
