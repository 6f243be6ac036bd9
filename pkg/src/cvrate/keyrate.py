"""Secure-fraction and key-rate assembly.

Combines the mutual information of the Gaussian channel with the
eavesdropper bound from :mod:`cvrate.cloner` and the classical
post-processing parameters into a single result record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cloner import LinkParams, holevo_bound
from .errors import DomainError


@dataclass(frozen=True, kw_only=True)
class ProtocolParams:
    """Classical post-processing parameters.

    Attributes:
        beta: reconciliation efficiency in [0, 1]; required, no default.
        fer: frame-error rate of the error-correcting code, in [0, 1].
        disclosed_fraction: share of the raw key given up for parameter
            estimation, in [0, 1).
        f_sym: symbol rate in symbols/second; when absent, results are
            reported in bits/symbol only.
    """

    beta: float
    fer: float = 0.0
    disclosed_fraction: float = 0.0
    f_sym: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0.0 <= self.fer <= 1.0:
            raise DomainError(f"fer must lie in [0, 1], got {self.fer}")
        if not 0.0 <= self.disclosed_fraction < 1.0:
            raise DomainError(
                f"disclosed_fraction must lie in [0, 1), got {self.disclosed_fraction}"
            )
        if self.f_sym is not None and self.f_sym <= 0.0:
            raise DomainError(f"f_sym must be positive, got {self.f_sym}")


@dataclass(frozen=True)
class RateResult:
    """One evaluated operating point.

    ``secret_fraction`` keeps its sign for diagnostics; ``key_rate`` is zero
    whenever the secret fraction is not positive and ``None`` when no symbol
    rate was supplied. ``eigs`` holds the four symplectic eigenvalues behind
    the eavesdropper bound (pre-measurement pair first).
    """

    snr: float
    i_ab: float
    chi_eb: float
    secret_fraction: float
    key_rate: float | None
    eigs: tuple[float, float, float, float]


def snr(params: LinkParams) -> float:
    """Signal-to-noise ratio of the receiver's measurement.

    ``T_tot * v_mod / (mu + xi_tot)``: heterodyne splits the signal over two
    quadratures, which shows up as one extra shot-noise unit in the
    denominator.
    """
    return params.t_tot * params.v_mod / (params.mu + params.xi_tot)


def mutual_information(params: LinkParams) -> float:
    """Mutual information of transmitter and receiver in bits/symbol,
    ``mu/2 * log2(1 + SNR)``."""
    return 0.5 * params.mu * math.log2(1.0 + snr(params))


def evaluate(params: LinkParams, proto: ProtocolParams) -> RateResult:
    """Evaluate one operating point.

    The secret fraction is ``beta * I_AB - chi_EB``; the key rate, when a
    symbol rate is present, is
    ``f_sym * (1 - fer) * (1 - disclosed_fraction) * max(secret_fraction, 0)``.
    """
    pair, chi = holevo_bound(params)
    i_ab = mutual_information(params)
    secret = proto.beta * i_ab - chi
    if proto.f_sym is None:
        key_rate = None
    elif secret > 0.0:
        key_rate = proto.f_sym * (1.0 - proto.fer) * (1.0 - proto.disclosed_fraction) * secret
    else:
        key_rate = 0.0
    return RateResult(
        snr=snr(params),
        i_ab=i_ab,
        chi_eb=chi,
        secret_fraction=secret,
        key_rate=key_rate,
        eigs=(pair.nu_pre[0], pair.nu_pre[1], pair.nu_post[0], pair.nu_post[1]),
    )
