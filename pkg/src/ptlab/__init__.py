__version__ = "0.1.0"

from .errors import ConfigError, DomainError, NumericalError, PtlabError
from .lattice import Boundary, LatticeSpec, ModulationSpec, ModulationTone
from .floquet import EffectiveCoupling, RationalBeta
from .spectra import SpectrumResult, eigenvalues_dense, pt_threshold
from .runconfig import RunConfig, parse_config

# Defines the public API for the package
__all__ = [
    "__version__",
    "Boundary",
    "ConfigError",
    "DomainError",
    "EffectiveCoupling",
    "LatticeSpec",
    "ModulationSpec",
    "ModulationTone",
    "NumericalError",
    "PtlabError",
    "RationalBeta",
    "RunConfig",
    "SpectrumResult",
    "eigenvalues_dense",
    "parse_config",
    "pt_threshold",
]
