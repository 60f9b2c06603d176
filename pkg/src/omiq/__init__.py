"""omiq: multi-omic feature selection and hybrid quantum-classical classification.

The library covers the full batch pipeline: TSV ingestion of omic matrices,
t-statistic feature engineering, four-method feature selection with AUC
filtering and Ward-linkage reduction, multi-omic integration, and a
statevector-simulated variational quantum classifier with classical
baselines and feature-importance reporting.
"""

from omiq.errors import OmiqError, OmiqValidationError

__all__ = ["OmiqError", "OmiqValidationError"]
__version__ = "0.1.0"
