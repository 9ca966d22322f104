#!/usr/bin/env python3
__version__ = "0.1.0"

from .grensemble import Grensemble  # noqa: F401,E402
from .config import Config  # noqa: F401,E402
from .exceptions import GrensembleException, GrensembleValueError  # noqa: F401,E402
from .graph import LabeledGraph, build_graph  # noqa: F401,E402
from .voting import EnsembleConfig, EnsembleResult, ensemble, ensemble_corpus  # noqa: F401,E402
