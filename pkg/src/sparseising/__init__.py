"""Sparse Ising model estimation by penalized composite conditional likelihood."""

from ._backend import BACKEND
from .baselines import (aggregate_nsai, aggregate_nsau, fit_node_logistic,
                        neighborhood_select, relaxed_refit)
from .cma import (FitResult, SolutionPath, SolverConfig, fit_lasso, fit_path, fit_scad_cma,
                  fit_weighted_lasso, kkt_residual, lambda_grid, lambda_max)
from .estimators import ESTIMATORS, Estimate, estimate
from .lla import LlaConfig, lla_cma, scad1, scad2, scad2_star_star
from .metrics import MetricReport, metrics, model_error
from .model import (CouplingVector, composite_grad, composite_loglik, conditional_probs,
                    coordinate_curvature, exact_distribution)
from .penalty import Penalty
from .selection import BicReport, bic_scores, bic_select
from .simulate import (GibbsConfig, GraphSpec, SimulationTruth, chain_graph, exact_sample,
                       gen_truth, gibbs_sample, lattice_graph, random_regular_graph)
from .stability import StabilityReport, ev_bound, stability_select

__version__ = "0.1.0"
