"""Nonlinear sufficient dimension reduction for distribution-on-distribution regression."""

from .distances import (DistanceMatrix, SlicingSpec, cross_matrix, hellinger_beta,
                        hellinger_gaussian, pairwise_matrix, sw2_empirical,
                        w2_empirical_1d, w2_gaussian)
from .gsir import GsirFit, RegularizationSpec, fit, predictors_insample, predictors_outsample
from .kernels import GramMatrix, KernelSpec, center_gram, default_gamma, gram_matrix
from .measures import DatasetPair, EmpiricalMeasure, empirical_from_samples, load_measures_csv
from .metrics import distance_correlation, multivariate_ranks, rvmr
from .selection import bic_order, gcv, select_epsilon

__version__ = "0.1.0"
