"""High-precision bounds, integrals and thresholds for N(k) and m_n(k)."""
from .bessel import (Lemma1Report, dual_route_band, eval_H, eval_I0_integral, lemma1_grid,
                     lemma1_validate, log_H_real, series_cutoff)
from .hp import DEFAULT_PRECISION, LogComplex, default_precision, working
from .landscape import GridScan, HessianReport, W_grid_scan, W_hessian_origin, eval_W
from .saddle import (QuadratureSpec, SaddleIntegral, SaddleParams, chernoff_bound_logN,
                     log_exact, saddle_integral, saddle_integral_logN)
from .thresholds import (ENVELOPE_NOTE, default_degree_cap, part_a_envelope_log,
                         part_b_estimate_log, threshold_lower, threshold_upper)
