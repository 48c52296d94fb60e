"""
Hız ve türev tahmincileri
"""
from .derivative import (
    CoupledDerivative,
    DerivativeEstimate,
    at_zero_from_batch,
    coupled_derivative,
    derivative_at_zero,
    derivative_v_m_beta,
    monotonicity_bound,
    v_m_beta_from_batch,
)
from .palm_batch import PalmBatch, PalmRecord, TruncationRateExceeded, collect_palm, palm_trajectory
from .range_constant import RangeEstimate, VisitIdentity, range_constant, visits_identity
from .speed import SpeedEstimate, speed_cut_ratio, speed_girsanov_sweep, speed_lln, sweep_form, sweep_from_batch

__all__ = [
    'CoupledDerivative',
    'DerivativeEstimate',
    'PalmBatch',
    'PalmRecord',
    'RangeEstimate',
    'SpeedEstimate',
    'TruncationRateExceeded',
    'VisitIdentity',
    'at_zero_from_batch',
    'collect_palm',
    'coupled_derivative',
    'derivative_at_zero',
    'derivative_v_m_beta',
    'monotonicity_bound',
    'palm_trajectory',
    'range_constant',
    'speed_cut_ratio',
    'speed_girsanov_sweep',
    'speed_lln',
    'sweep_form',
    'sweep_from_batch',
    'v_m_beta_from_batch',
    'visits_identity',
]
