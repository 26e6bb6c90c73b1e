"""Isolation metrics for two-zone program reproduction.

All metrics are ratios of averaged acoustic power computed from the
system matrix M (points x channels), under the two extreme assumptions
about a program's channels:

- correlated: channels carry the same signal, pressures add coherently,
  power at a point is |sum_i M_ki|^2.
- uncorrelated: channels carry independent signals, powers add,
  power at a point is sum_i |M_ki|^2.

Real program material sits between the extremes, so each metric reports
both ratios and takes the minimum as its value.

Inter-zone isolation (IZI) compares one program's power between its
bright zone and dark zone, averaging over the points of each zone.
Inter-program isolation (IPI) compares the target program against the
interfering program within one zone, normalizing each program by its
channel count. For a single channel both reduce to the classic acoustic
contrast ratio.

Values are linear power ratios; ``db`` is 10*log10(value). A zero
denominator (perfect cancellation) yields an infinite ratio flagged by
``unbounded`` rather than an error, so frequency sweeps stay total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filter_design import SystemMatrix

_THIRD_OCTAVE_HALF_WIDTH = 2.0 ** (1.0 / 6.0)


@dataclass(frozen=True)
class MetricValue:
    """One metric evaluation at one frequency.

    ``corr`` and ``uncorr`` are the coherent and incoherent power ratios,
    ``value`` their minimum and ``db`` its decibel form. ``unbounded``
    marks a zero denominator; ``db`` is then +inf. A zero numerator gives
    db = -inf with ``unbounded`` False (silence in the numerator is a
    bounded, if extreme, outcome).
    """

    frequency: float
    corr: float
    uncorr: float
    value: float
    db: float
    unbounded: bool = False

    @classmethod
    def from_ratios(cls, frequency: float, corr: float, uncorr: float) -> "MetricValue":
        value = min(corr, uncorr)
        unbounded = math.isinf(value)
        if value > 0:
            db = 10.0 * math.log10(value) if not unbounded else math.inf
        else:
            db = -math.inf
        return cls(
            frequency=float(frequency),
            corr=corr,
            uncorr=uncorr,
            value=value,
            db=db,
            unbounded=unbounded,
        )


@dataclass(frozen=True)
class MetricSpectrum:
    """A labeled metric evaluated over a frequency grid.

    Frequencies must be strictly increasing. ``label`` names the metric
    and zone, e.g. "IZI_A" or "IPI_B".
    """

    label: str
    values: tuple[MetricValue, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        freqs = [v.frequency for v in self.values]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("spectrum frequencies must be strictly increasing")

    def frequencies(self) -> np.ndarray:
        return np.array([v.frequency for v in self.values])

    def db(self) -> np.ndarray:
        return np.array([v.db for v in self.values])

    def __len__(self) -> int:
        return len(self.values)


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf
    return num / den


def _check_indices(name: str, indices, bound: int):
    idx = tuple(int(i) for i in indices)
    if not idx:
        raise ValueError(f"{name} must not be empty")
    bad = [i for i in idx if not 0 <= i < bound]
    if bad:
        raise ValueError(f"{name} indices out of range: {bad}")
    return idx


def _zone_powers(M: np.ndarray, points, channels):
    """(coherent, incoherent) power sums of one program over a point set."""
    block = M[np.ix_(points, channels)]
    coh = float(np.sum(np.abs(block.sum(axis=1)) ** 2))
    inc = float(np.sum(np.abs(block) ** 2))
    return coh, inc


def izi(M: SystemMatrix, bz_points, dz_points, program_channels) -> MetricValue:
    """Inter-zone isolation of one program.

    Ratio of the program's point-averaged power in its bright zone to
    that in the dark zone, under both channel correlation extremes:

        corr   = [sum_bz |sum_i M_ki|^2 / n_bz] / [same over dz]
        uncorr = [sum_bz sum_i |M_ki|^2 / n_bz] / [same over dz]

    and value = min(corr, uncorr). Point sets must be disjoint.
    """
    k_count = M.entries.shape[0]
    bz = _check_indices("bz_points", bz_points, k_count)
    dz = _check_indices("dz_points", dz_points, k_count)
    if set(bz) & set(dz):
        raise ValueError(f"bright and dark zones overlap: {sorted(set(bz) & set(dz))}")
    chans = _check_indices("program_channels", program_channels, M.entries.shape[1])

    bz_coh, bz_inc = _zone_powers(M.entries, bz, chans)
    dz_coh, dz_inc = _zone_powers(M.entries, dz, chans)
    corr = _ratio(bz_coh / len(bz), dz_coh / len(dz))
    uncorr = _ratio(bz_inc / len(bz), dz_inc / len(dz))
    return MetricValue.from_ratios(M.frequency, corr, uncorr)


def ipi(M: SystemMatrix, zone_points, target_channels, interferer_channels) -> MetricValue:
    """Inter-program isolation within one zone.

    Ratio of the target program's power to the interfering program's
    power over the same points, each normalized by its channel count:

        corr   = [sum_z |sum_{i in T} M_ki|^2 / n_T] / [sum_z |sum_{i in J} M_ki|^2 / n_J]
        uncorr = analogous with |.|^2 inside the channel sum

    and value = min(corr, uncorr). The channel sets must be disjoint.
    Note the normalizers count channels, not points; the point sums run
    over the same zone in numerator and denominator.
    """
    i_count = M.entries.shape[1]
    zone = _check_indices("zone_points", zone_points, M.entries.shape[0])
    target = _check_indices("target_channels", target_channels, i_count)
    interferer = _check_indices("interferer_channels", interferer_channels, i_count)
    if set(target) & set(interferer):
        raise ValueError(
            f"target and interferer programs overlap: {sorted(set(target) & set(interferer))}"
        )

    t_coh, t_inc = _zone_powers(M.entries, zone, target)
    j_coh, j_inc = _zone_powers(M.entries, zone, interferer)
    corr = _ratio(t_coh / len(target), j_coh / len(interferer))
    uncorr = _ratio(t_inc / len(target), j_inc / len(interferer))
    return MetricValue.from_ratios(M.frequency, corr, uncorr)


def single_point_ipi(M: SystemMatrix, k: int, target_channels, interferer_channels) -> MetricValue:
    """IPI evaluated at a single point: ipi with the zone set {k}."""
    return ipi(M, (int(k),), target_channels, interferer_channels)


def acoustic_contrast(H_A: np.ndarray, H_B: np.ndarray, q: np.ndarray) -> float:
    """Point-averaged power ratio between two zones for one filter vector.

    Returns (||H_A q||^2 / n_A) / (||H_B q||^2 / n_B) as a plain linear
    ratio (inf when zone B receives exactly nothing). For a single-channel
    program this is what izi reduces to.
    """
    h_a = np.asarray(H_A, dtype=complex)
    h_b = np.asarray(H_B, dtype=complex)
    q = np.asarray(q, dtype=complex).reshape(-1)
    num = float(np.sum(np.abs(h_a @ q) ** 2)) / h_a.shape[0]
    den = float(np.sum(np.abs(h_b @ q) ** 2)) / h_b.shape[0]
    return _ratio(num, den)


def third_octave_smooth(spectrum: MetricSpectrum) -> MetricSpectrum:
    """Smooth a spectrum with a 1/3-octave sliding window.

    Each output bin is the dB-domain mean (geometric mean of the linear
    ratios) over all input bins whose frequency lies within a third of an
    octave centered on the output frequency, [f * 2^(-1/6), f * 2^(1/6)].
    Windows truncate at the grid edges. Smoothed bins carry the averaged
    value in ``corr``, ``uncorr`` and ``value`` alike, since smoothing
    happens after the min.
    """
    if len(spectrum) == 0:
        raise ValueError("cannot smooth an empty spectrum")
    freqs = spectrum.frequencies()
    db_vals = spectrum.db()
    smoothed = []
    for i, f in enumerate(freqs):
        lo = f / _THIRD_OCTAVE_HALF_WIDTH
        hi = f * _THIRD_OCTAVE_HALF_WIDTH
        window = db_vals[(freqs >= lo) & (freqs <= hi)]
        db = float(np.mean(window))
        if db == math.inf:
            value = math.inf
        elif db == -math.inf or math.isnan(db):
            value = 0.0
        else:
            value = 10.0 ** (db / 10.0)
        smoothed.append(
            MetricValue(
                frequency=float(f),
                corr=value,
                uncorr=value,
                value=value,
                db=db,
                unbounded=db == math.inf,
            )
        )
    return MetricSpectrum(label=spectrum.label, values=tuple(smoothed))
