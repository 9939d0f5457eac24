from .tensor import (
    CompGraph, Function, Tensor, backward, current_graph, forward,
    get_default_dtype, precision, set_default_dtype
)
from .surrogate import SurrogateSpec
from .functional import *
from .gradcheck import GradientCheckResult, check_gradient
