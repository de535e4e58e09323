"""Gaussian representations of weighted graphs and information-theoretic relations between them."""

__version__ = "0.1.0"

from .align import Alignment, align_down, align_pair
from .errors import EXIT_CODES, NetGaussError
from .gaussian import (Coupling, NetworkGaussian, coupled_sample, coupling_strength, entropy,
                       joint_covariance, represent, sample)
from .graph import Graph, closeness, graph_distance, is_connected, largest_component, validate
from .metrics import (FisherSetup, Partition, SamplingConfig, causality, conditional_covariance,
                      fisher_matrix, fisher_quantity, granger, kl_divergence, mutual_information,
                      random_partition, transfer_entropy)
from .relations import MetricConfig, RelationReport, relation_report
from .spectral import (RepresentationMode, SpectralCache, laplacian, laplacian_centrality,
                       laplacian_energy, pseudoinverse, spectral_cache)
