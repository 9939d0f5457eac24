# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import logging
import threading
import numpy as np
from contextlib import contextmanager
from typing import Callable, List, Optional, Sequence, Tuple, Union
from ..exceptions import GraphStateError, NonFiniteError, ShapeMismatchError

logger = logging.getLogger(__name__)

_state = threading.local()
_dtype_lock = threading.Lock()
_DEFAULT_DTYPE = {'dtype': np.dtype(np.float32)}
_ArrayLike = Union['Tensor', np.ndarray, float, int, Sequence]


def get_default_dtype() -> np.dtype:
    return _DEFAULT_DTYPE['dtype']


def set_default_dtype(dtype) -> None:
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f'Unsupported precision: {dtype}')
    with _dtype_lock:
        _DEFAULT_DTYPE['dtype'] = dtype


@contextmanager
def precision(dtype):
    previous = get_default_dtype()
    set_default_dtype(dtype)
    try:
        yield
    finally:
        set_default_dtype(previous)


def _graph_stack() -> list:
    if not hasattr(_state, 'graphs'):
        _state.graphs = []
    return _state.graphs


def current_graph() -> Optional['CompGraph']:
    stack = _graph_stack()
    return stack[-1] if stack else None


def check_finite(data: np.ndarray, origin: str) -> None:
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f'Non-finite value produced by {origin}.')


class Tensor():
    def __init__(self, data: _ArrayLike, requires_grad: bool = False, _node: Optional['Function'] = None):
        if isinstance(data, Tensor):
            data = data.data
        array = np.asarray(data)
        if array.dtype != get_default_dtype():
            array = array.astype(get_default_dtype())
        self.data = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._node = _node

    def __repr__(self):
        return f'<Tensor shape={self.shape} requires_grad={self.requires_grad}>'

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def node(self) -> Optional['Function']:
        return self._node

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> 'Tensor':
        return Tensor(self.data.copy())

    def zero_grad(self):
        self.grad = None

    def backward(self, grad: Optional[np.ndarray] = None):
        if self._node is None:
            raise GraphStateError('Tensor was not produced by a recorded operation.')
        backpropagate(self, grad, _topological_order(self))

    @staticmethod
    def ensure(value: _ArrayLike) -> 'Tensor':
        return value if isinstance(value, Tensor) else Tensor(value)

    def __add__(self, other):
        from .functional import add
        return add(self, Tensor.ensure(other))

    def __radd__(self, other):
        from .functional import add
        return add(Tensor.ensure(other), self)

    def __sub__(self, other):
        from .functional import sub
        return sub(self, Tensor.ensure(other))

    def __rsub__(self, other):
        from .functional import sub
        return sub(Tensor.ensure(other), self)

    def __mul__(self, other):
        from .functional import mul, scale
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, Tensor.ensure(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        from .functional import scale
        return scale(self, -1.0)


class Function():
    nonsmooth = False

    def __init__(self, *parents: Tensor):
        self.parents = parents
        self.index = -1
        self.out_grad: Optional[np.ndarray] = None
        self.output_shape: Tuple[int, ...] = ()

    @classmethod
    def apply(cls, *parents: Tensor, **kwargs) -> Tensor:
        node = cls(*parents)
        data = node.forward(*(parent.data for parent in parents), **kwargs)
        data = np.asarray(data)
        check_finite(data, cls.__name__)
        node.output_shape = data.shape
        requires_grad = any(parent.requires_grad for parent in parents)
        output = Tensor(data, requires_grad=requires_grad, _node=node if requires_grad else None)
        graph = current_graph()
        if graph is not None:
            graph.record(node)
        return output

    def forward(self, *arrays, **kwargs) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError

    def region(self) -> Optional[np.ndarray]:
        return None


def _topological_order(output: Tensor) -> List[Function]:
    order, visited = [], set()
    stack = [(output._node, False)]
    while stack:
        node, expanded = stack.pop()
        if node is None:
            continue
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent._node is not None and id(parent._node) not in visited:
                stack.append((parent._node, False))
    return order


def backpropagate(output: Tensor, grad: Optional[np.ndarray], order: Sequence[Function]):
    if grad is None:
        grad = np.ones_like(output.data)
    grad = np.asarray(grad, dtype=output.data.dtype)
    if grad.shape != output.shape:
        raise ShapeMismatchError(f'Output gradient shape {grad.shape} != output shape {output.shape}.')
    output._node.out_grad = grad
    for node in reversed(order):
        if node.out_grad is None:
            continue
        parent_grads = node.backward(node.out_grad)
        node.out_grad = None
        for parent, parent_grad in zip(node.parents, parent_grads):
            if parent_grad is None or not parent.requires_grad:
                continue
            check_finite(parent_grad, f'{type(node).__name__}.backward')
            if parent._node is not None:
                if parent._node.out_grad is None:
                    parent._node.out_grad = parent_grad
                else:
                    parent._node.out_grad = parent._node.out_grad + parent_grad
            elif parent.grad is None:
                parent.grad = np.array(parent_grad, dtype=parent.data.dtype)
            else:
                parent.grad = parent.grad + parent_grad


class CompGraph():
    """Records every op applied while the graph is active.

    Recording order is a topological order of the computation, so backward
    walks the record once in reverse.
    """

    def __init__(self, fn: Optional[Callable[..., Tensor]] = None):
        self._fn = fn
        self._nodes: List[Function] = []
        self._inputs: List[Tensor] = []
        self._output: Optional[Tensor] = None

    def __enter__(self):
        _graph_stack().append(self)
        return self

    def __exit__(self, *exc):
        _graph_stack().pop()
        return False

    def record(self, node: Function):
        node.index = len(self._nodes)
        self._nodes.append(node)

    @property
    def nodes(self) -> List[Function]:
        return self._nodes

    @property
    def output(self) -> Optional[Tensor]:
        return self._output

    def forward(self, *inputs: _ArrayLike, expected_shapes: Optional[Sequence[tuple]] = None):
        if self._fn is None:
            raise GraphStateError('CompGraph.forward needs a graph function.')
        self._inputs = [
            value if isinstance(value, Tensor) else Tensor(value, requires_grad=True)
            for value in inputs
        ]
        if expected_shapes is not None:
            for tensor, shape in zip(self._inputs, expected_shapes):
                if tuple(tensor.shape) != tuple(shape):
                    raise ShapeMismatchError(f'Input shape {tensor.shape} != expected {tuple(shape)}.')
        self._nodes = []
        with self:
            self._output = self._fn(*self._inputs)
        return self._output

    def track(self, output: Tensor, inputs: Sequence[Tensor]):
        self._output = output
        self._inputs = list(inputs)

    def backward(self, output_grad: Optional[np.ndarray] = None) -> List[Optional[np.ndarray]]:
        if self._output is None:
            raise GraphStateError('backward called before forward on this graph.')
        if self._output._node is None:
            return [np.zeros_like(tensor.data) for tensor in self._inputs]
        for tensor in self._inputs:
            tensor.grad = None
        backpropagate(self._output, output_grad, self._nodes)
        return [
            tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            for tensor in self._inputs
        ]

    def regions(self) -> List[np.ndarray]:
        signature = []
        for node in self._nodes:
            region = node.region()
            if region is not None:
                signature.append(region)
        return signature


def forward(graph: CompGraph, inputs: Sequence[_ArrayLike]) -> Tensor:
    return graph.forward(*inputs)


def backward(graph: CompGraph, output_grad: Optional[np.ndarray] = None) -> List[Optional[np.ndarray]]:
    return graph.backward(output_grad)
