"""Shotgun reconstruction of random hypercube colourings.

Library layout:

- :mod:`cubeshot.hypercube`   cube combinatorics, Harper order, spread sets
- :mod:`cubeshot.colouring`   colour sampling, distances, file format
- :mod:`cubeshot.canon`       canonical ball signatures and multisets
- :mod:`cubeshot.shotgun`     reconstruction, equivalence, atlas search
- :mod:`cubeshot.bijections`  approximately-local bijection machinery
- :mod:`cubeshot.probability` binomial bounds and Monte Carlo estimators
- :mod:`cubeshot.cli`         the ``cubeshot`` command line front end
"""

from .errors import BudgetError, CapacityError, InputDomainError

__all__ = ["BudgetError", "CapacityError", "InputDomainError"]
__version__ = "0.1.0"
