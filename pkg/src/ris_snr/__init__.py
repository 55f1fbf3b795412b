"""Optimal-SNR statistics of RIS-aided SIMO uplinks over correlated Ricean fading.

Subpackages and modules
-----------------------
specfun        confluent hypergeometric, Laguerre and Whittaker functions
channel_model  array geometry, correlation matrices and channel draws
ris_core       optimal RIS phases, instantaneous SNR and the Y statistic
analytic       closed-form mean, variance, F_R and gamma approximation
insights       favourable/unfavourable gain analysis
montecarlo     reproducible block-parallel simulation oracle
cli            command-line front end
"""

from .config import ScenarioConfig, dump_config, load_config, parse_config

__version__ = "0.1.0"

__all__ = ["ScenarioConfig", "dump_config", "load_config", "parse_config", "__version__"]
