"""Entangling-cloner link model and closed-form eavesdropper entropies.

The channel is modelled as a beamsplitter of transmittance ``t_ch`` mixing
the signal with one arm of an eavesdropper-controlled EPR state of variance
``W_ch``; the receiver as a beamsplitter of transmittance ``t_rec`` mixing
the signal with a thermal state of variance ``W_rec``. Choosing
``W = xi / (1 - T) + 1`` makes the excess noise referred to the channel
output come out as ``xi`` exactly. Trusted devices are excluded from the
eavesdropper's side of the bookkeeping but still shape the receiver's
measurement statistics.

Everything here is a pure function of its inputs and safe to call
concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, PhysicalityError, UsageError
from .gaussian import (
    SIGMA_Z,
    CovMatrix,
    apply_symplectic,
    beamsplitter,
    clamp_spectrum,
    direct_sum,
    epr_state,
    thermal_state,
    two_mode_eigs,
    von_neumann_entropy,
)

# Unit transmittance with nonzero noise would make the source variance
# W = xi / (1 - T) + 1 singular; the open port is kept at least this wide.
_MIN_OPEN_PORT = 1e-12


# Largest channel noise-source variance the closed forms evaluate accurately.
_MAX_W_CH = 1e4


def _clamped_t(t: float, xi: float) -> float:
    # a noisy source needs a non-unit beamsplitter; the clamped value is used
    # consistently in W, the propagation and the closed forms
    return min(t, 1.0 - _MIN_OPEN_PORT) if xi > 0.0 else t


class Detection(enum.Enum):
    """Receiver measurement: one quadrature (homodyne) or both (heterodyne)."""

    HOMODYNE = "homodyne"
    HETERODYNE = "heterodyne"


class Trust(enum.Enum):
    """Which noise/loss sources are assumed calibrated and out of the
    eavesdropper's reach."""

    UNTRUSTED_ALL = "untrusted_all"
    TRUSTED_RECEIVER = "trusted_receiver"
    TRUSTED_RECEIVER_AND_PREPARATION = "trusted_receiver_and_preparation"


@dataclass(frozen=True, kw_only=True)
class LinkParams:
    """All physical parameters of one point-to-point link.

    Attributes:
        v_mod: Gaussian modulation variance in SNU; the shared EPR state has
            variance ``v_mod + 1``.
        xi_pr: preparation excess noise in SNU, produced at the transmitter.
        t_ch: channel power transmittance, in (0, 1].
        xi_ch: channel excess noise in SNU referred to the channel output.
        t_rec: receiver transmittance (detection and coupling efficiency).
        xi_rec: receiver excess noise in SNU (electronic noise etc.).
        detection: homodyne or heterodyne readout.
        trust: which device imperfections are trusted.
    """

    v_mod: float
    t_ch: float
    xi_ch: float
    t_rec: float
    xi_rec: float
    detection: Detection
    trust: Trust
    xi_pr: float = 0.0

    def __post_init__(self):
        for name in ("v_mod", "t_ch", "xi_ch", "t_rec", "xi_rec", "xi_pr"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.v_mod < 0.0:
            raise DomainError(f"v_mod must be >= 0, got {self.v_mod}")
        for name in ("xi_pr", "xi_ch", "xi_rec"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("t_ch", "t_rec"):
            t = getattr(self, name)
            if not 0.0 < t <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {t}")
        if not isinstance(self.detection, Detection):
            raise DomainError(f"detection must be a Detection value, got {self.detection!r}")
        if not isinstance(self.trust, Trust):
            raise DomainError(f"trust must be a Trust value, got {self.trust!r}")

    @property
    def v(self) -> float:
        """Variance of the shared EPR state: v_mod + 1."""
        return self.v_mod + 1.0

    @property
    def t_tot(self) -> float:
        """End-to-end transmittance, channel times receiver."""
        return self.t_ch * self.t_rec

    @property
    def xi_tot(self) -> float:
        """Total excess noise in the receiver's measurement, in SNU."""
        return self.t_tot * self.xi_pr + self.t_rec * self.xi_ch + self.xi_rec

    @property
    def mu(self) -> float:
        """Number of measured quadratures: 1 for homodyne, 2 for heterodyne."""
        return 2.0 if self.detection is Detection.HETERODYNE else 1.0


@dataclass(frozen=True)
class EntropyPair:
    """Eavesdropper entropies before and after the receiver's measurement.

    ``nu_pre`` and ``nu_post`` hold the symplectic eigenvalue pairs behind
    ``s_e`` and ``s_e_given_b`` (each sorted descending).
    """

    s_e: float
    s_e_given_b: float
    nu_pre: tuple[float, float]
    nu_post: tuple[float, float]


def effective_v(params: LinkParams) -> float:
    """EPR variance fed to the eavesdropper-side formulas.

    Trusted preparation noise is handled by substituting V -> V + xi_pr;
    in every other case the bare V = v_mod + 1 is used.
    """
    if params.trust is Trust.TRUSTED_RECEIVER_AND_PREPARATION and params.xi_pr > 0.0:
        return params.v + params.xi_pr
    return params.v


def effective_xi_ch(params: LinkParams) -> float:
    """Channel noise attributed to the eavesdropper.

    Untrusted preparation noise is indistinguishable from channel noise, so
    it is folded in as xi_ch + t_ch * xi_pr; trusted preparation noise is
    accounted for by the V -> V + xi_pr substitution instead.
    """
    if params.trust is not Trust.TRUSTED_RECEIVER_AND_PREPARATION and params.xi_pr > 0.0:
        return params.xi_ch + params.t_ch * params.xi_pr
    return params.xi_ch


def noise_source_variances(params: LinkParams) -> tuple[float, float]:
    """Variances (W_ch, W_rec) of the noise-source states.

    ``W = xi / (1 - T) + 1`` so that the excess noise at the respective
    output equals xi. Transmittances are clamped to 1 - 1e-12 before the
    division; with zero noise the source is vacuum regardless of T. A W_ch
    beyond 1e4 SNU (channel noise with almost no channel loss) is rejected
    because the conditional-spectrum formulas degrade there.
    """
    return _model(params)[3:5]


def _model(params: LinkParams) -> tuple[float, float, float, float, float, float]:
    """Quantities the noise model is built from, with transmittances clamped
    consistently: (V, t_ch, t_rec, W_ch, W_rec, V_B)."""
    xi_ch = effective_xi_ch(params)
    t_ch = _clamped_t(params.t_ch, xi_ch)
    t_rec = _clamped_t(params.t_rec, params.xi_rec)
    v = effective_v(params)
    w_ch = 1.0 if xi_ch == 0.0 else 1.0 + xi_ch / (1.0 - t_ch)
    if w_ch > _MAX_W_CH:
        # the conditional-spectrum formulas cancel W_ch^2-sized terms down to
        # order one, so a nearly lossless noisy channel outruns double
        # precision (the receiver-side W_rec only ever enters linearly and has
        # no such limit)
        raise DomainError(
            f"channel noise {xi_ch:g} at t_ch = {params.t_ch:g} implies a noise-source "
            f"variance of {w_ch:.3g} SNU, beyond the supported {_MAX_W_CH:g}; "
            "lower t_ch or the noise attributed to the channel"
        )
    w_rec = 1.0 if params.xi_rec == 0.0 else 1.0 + params.xi_rec / (1.0 - t_rec)
    v_b = t_ch * t_rec * (v - 1.0) + 1.0 + t_rec * xi_ch + params.xi_rec
    return v, t_ch, t_rec, w_ch, w_rec, v_b


def bob_variance(params: LinkParams) -> float:
    """Receiver quadrature variance T_tot (V - 1) + 1 + xi_tot (same for q and p)."""
    return _model(params)[5]


def receiver_folded(params: LinkParams) -> LinkParams:
    """Equivalent link with the receiver absorbed into the channel.

    With nothing trusted, the eavesdropper is credited with the end-to-end
    loss and noise; the model collapses to a single effective channel
    followed by an ideal receiver.
    """
    return replace(
        params,
        t_ch=params.t_tot,
        xi_ch=params.xi_tot,
        t_rec=1.0,
        xi_rec=0.0,
        xi_pr=0.0,
        trust=Trust.TRUSTED_RECEIVER,
    )


def assemble_and_propagate(params: LinkParams) -> CovMatrix:
    """Five-mode state after both beamsplitters.

    Mode order: (A, B, E1, E2, R) = transmitter arm, receiver arm, the two
    channel-EPR modes, and the receiver thermal mode. The channel
    beamsplitter mixes B with E1, the receiver beamsplitter mixes B with R.
    Preparation noise enters through the variance substitutions, never as a
    sixth mode.
    """
    v, t_ch, t_rec, w_ch, w_rec, _ = _model(params)
    initial = direct_sum([epr_state(v), epr_state(w_ch), thermal_state(w_rec)])
    bs_ch = beamsplitter(5, 1, 2, t_ch)
    bs_rec = beamsplitter(5, 1, 4, t_rec)
    return apply_symplectic(bs_rec @ bs_ch, initial)


def eve_state(params: LinkParams) -> CovMatrix:
    """Two-mode state held by the eavesdropper after the channel beamsplitter.

    Closed form: diagonal blocks ((1 - t_ch) V + t_ch W_ch) and W_ch, with
    sqrt(t_ch (W_ch**2 - 1)) sigma_z correlations. Its entropy equals the
    entropy of the transmitter-receiver state under trusted-receiver
    bookkeeping.
    """
    v, t_ch, _, w_ch, _, _ = _model(params)
    a = (1.0 - t_ch) * v + t_ch * w_ch
    c = math.sqrt(t_ch * (w_ch * w_ch - 1.0))
    out = np.zeros((4, 4))
    out[:2, :2] = a * np.eye(2)
    out[2:, 2:] = w_ch * np.eye(2)
    out[:2, 2:] = c * SIGMA_Z
    out[2:, :2] = c * SIGMA_Z
    return CovMatrix(out)


def eve_conditional_het(params: LinkParams) -> tuple[float, float]:
    """Eavesdropper symplectic eigenvalues after a heterodyne measurement.

    Treats the channel/receiver split as given; fold the receiver into the
    channel first (``receiver_folded``) for fully untrusted bookkeeping.
    """
    if params.detection is not Detection.HETERODYNE:
        raise UsageError("link is configured for homodyne detection; use eve_conditional_hom")
    v, t_ch, t_rec, w_ch, w_rec, v_b = _model(params)

    e1 = v * ((1.0 - t_rec) * w_rec + t_rec * w_ch + 1.0) + t_ch * (w_ch - v) * (
        1.0 + (1.0 - t_rec) * w_rec
    )
    e2 = math.sqrt(t_ch * (w_ch * w_ch - 1.0)) * (t_rec * v + (1.0 - t_rec) * w_rec + 1.0)
    e3 = (1.0 - t_rec) * w_ch * w_rec + t_rec * t_ch * (v * w_ch - 1.0) + t_rec + w_ch

    disc = (e1 + e3) ** 2 - 4.0 * e2 * e2
    if disc < 0.0:
        raise PhysicalityError(f"conditional spectrum has negative discriminant {disc:.3e}")
    z = math.sqrt(disc)
    nu3 = (z + (e3 - e1)) / (2.0 * (v_b + 1.0))
    nu4 = (z - (e3 - e1)) / (2.0 * (v_b + 1.0))
    pair = clamp_spectrum(np.array([nu3, nu4]))
    return float(pair[0]), float(pair[1])


def eve_conditional_hom(params: LinkParams) -> tuple[float, float]:
    """Eavesdropper symplectic eigenvalues after a homodyne measurement.

    The conditioned 4x4 state is anisotropic, but squaring its spectral
    matrix and regrouping rows reduces the problem to one 2x2 block whose
    eigenvalues are the squared symplectic eigenvalues. q- and p-measurement
    give the same spectrum.
    """
    if params.detection is not Detection.HOMODYNE:
        raise UsageError("link is configured for heterodyne detection; use eve_conditional_het")
    v, t_ch, t_rec, w_ch, w_rec, v_b = _model(params)
    cross = math.sqrt(t_ch * (w_ch * w_ch - 1.0))
    reflected = t_rec * v + (1.0 - t_rec) * w_rec

    e1 = v + t_ch * (w_ch - v) * reflected / v_b
    e2 = cross * reflected / v_b
    e3 = v + t_ch * (w_ch - v)
    e4 = -cross
    e5 = w_ch - (1.0 - t_ch) * t_rec * (w_ch * w_ch - 1.0) / v_b
    e6 = w_ch

    m11 = e1 * e3 + e2 * e4
    m12 = e2 * e3 + e4 * e5
    m21 = e1 * e4 + e2 * e6
    m22 = e2 * e4 + e5 * e6

    inner = (m11 - m22) ** 2 + 4.0 * m12 * m21
    if inner < -1e-12:
        raise PhysicalityError(f"conditional spectrum has negative radicand {inner:.3e}")
    root = math.sqrt(max(inner, 0.0))
    squares = [(m11 + m22 + root) / 2.0, (m11 + m22 - root) / 2.0]
    nus = []
    for sq in squares:
        if sq < -1e-12:
            raise PhysicalityError(f"conditional spectrum has negative radicand {sq:.3e}")
        nus.append(math.sqrt(max(sq, 0.0)))
    pair = clamp_spectrum(np.array(nus))
    return float(pair[0]), float(pair[1])


def _conditional_pair(params: LinkParams) -> tuple[float, float]:
    if params.detection is Detection.HETERODYNE:
        return eve_conditional_het(params)
    return eve_conditional_hom(params)


def _eve_premeasurement_pair(params: LinkParams) -> tuple[float, float]:
    """Symplectic eigenvalues of the eavesdropper's two-mode state.

    Same spectrum as two_mode_eigs on the eve_state entries, but with the
    discriminant expanded into the cancellation-free form
    ``(xV)^2 + 2(2-x)V s + s^2 + 4(1-x)`` where ``x = 1 - t_ch`` and
    ``s = xi_ch + x = x W_ch``, so the pair stays accurate even when the
    source variance W_ch is many orders of magnitude above shot noise.
    """
    v, t_ch, _, _, _, _ = _model(params)
    x = 1.0 - t_ch
    s = effective_xi_ch(params) + x
    z = math.sqrt((x * v) ** 2 + 2.0 * (2.0 - x) * v * s + s * s + 4.0 * (1.0 - x))
    d = s - x * v  # difference of the diagonal entries
    pair = clamp_spectrum(np.array([0.5 * (z + d), 0.5 * (z - d)]))
    return float(pair[0]), float(pair[1])


def holevo_bound(params: LinkParams) -> tuple[EntropyPair, float]:
    """Upper bound on the eavesdropper-receiver information, in bits/symbol.

    Returns the entropy pair and ``chi = S_E - S_E|B``, clamped to zero when
    rounding pushes it slightly negative. Under fully untrusted bookkeeping
    the pre-measurement pair comes from the end-to-end two-mode state and
    the conditional pair from the receiver-folded link.
    """
    if params.trust is Trust.UNTRUSTED_ALL:
        v = params.v
        b = params.t_tot * (v - 1.0) + 1.0 + params.xi_tot
        c = math.sqrt(params.t_tot * (v * v - 1.0))
        pre = two_mode_eigs(v, b, c)
        effective = receiver_folded(params)
    else:
        pre = _eve_premeasurement_pair(params)
        effective = params

    nu_pre = tuple(sorted(pre, reverse=True))
    nu_post = tuple(sorted(_conditional_pair(effective), reverse=True))
    s_e = von_neumann_entropy(nu_pre)
    s_e_given_b = von_neumann_entropy(nu_post)
    chi = s_e - s_e_given_b
    if chi < -1e-9:
        raise PhysicalityError(f"Holevo bound came out negative ({chi:.3e})")
    pair = EntropyPair(s_e=s_e, s_e_given_b=s_e_given_b, nu_pre=nu_pre, nu_post=nu_post)
    return pair, max(chi, 0.0)
