"""Coloured bin packing: bi-criteria offline and online algorithms, exact
oracles, and the instance families that stress them."""

from .core import (
    BudgetExceeded, Bin, Instance, Item, Packing, PreconditionError, StretchReport,
    ValidationReport, bins_spanned, compute_stretch, load_instance, load_packing,
    make_items, parse_rational, save_instance, save_packing, validate_packing,
)
from .classic import (
    BoundedBestFit, best_fit, bounded_best_fit, first_fit, first_fit_decreasing, next_fit,
)
from .offline import offline_1plus_eps, offline_17_1plus_eps, pack_small_by_colour, vl_pack
from .online import LevelScheme, OnlineFirstFit, ThresholdScheme, run_online
from .aptas import aptas, solve_lps
from .oracle import exact_opt, exact_opt_beta, solve as oracle_solve

__version__ = "0.1.0"
