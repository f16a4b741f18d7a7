"""Basket call pricing by matching three moments to a shifted (mixture) log-normal."""
from .calibrate_lognormal import (ShiftedLognormalParams, approximant_moments_lognormal,
                                  calibrate_lognormal, solve_cubic_skew)
from .calibrate_mixture import (MixtureParams, approximant_moments_mixture, calibrate_mixture,
                                solve_mixture_shape)
from .estimator import ShiftedLognormalBasketPricer
from .exceptions import *  # noqa: F401,F403
from .greeks import GreekTriple, finite_difference_greeks, greeks_lognormal, small_skew_diagnostic
from .laws import (MixingLaw, builtin_law, exponential_law, gamma22_law, inverse_gaussian_law,
                   point_mass_law)
from .metrics import CaseResult, c1_c2
from .montecarlo import McConfig, McResult, mc_moments, mc_price_lognormal, mc_price_mixture, mc_price_strikes
from .moments import (BasketSpec, MomentSummary, basket_moments_lognormal, basket_moments_mixture,
                      factorize_correlation)
from .pricing import (Case, Method, PriceResult, black_scholes_call, normal_price, price_basket,
                      price_lognormal, price_mixture)
from .scenarios import Scenario, dump_scenarios, load_scenarios, parse_scenarios

__version__ = "0.1.0"
