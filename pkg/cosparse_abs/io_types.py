# cosparse_abs/io_types.py
from typing import Any, Dict

import numpy as np
import numpy.typing as npt

JSONDict = Dict[str, Any]
FloatArray = npt.NDArray[np.float64]
