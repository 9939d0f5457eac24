# -*- coding: utf-8 -*-
#!/usr/bin/env python3

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit, log_expit, log_softmax as _log_softmax
from typing import Optional, Sequence, Tuple
from ..exceptions import ShapeMismatchError
from .surrogate import SurrogateSpec
from .tensor import Function, Tensor

__all__ = [
    'add', 'bce_with_logits', 'clamp', 'conv2d', 'cross_entropy', 'exp', 'linear',
    'log', 'mse', 'mul', 'reduce_max', 'reduce_mean', 'reduce_sum', 'relu',
    'reshape', 'scale', 'sigmoid', 'softmax', 'spike_threshold', 'sub', 'take'
]

_DEFAULT_SURROGATE = SurrogateSpec()


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _accumulate_sum(array: np.ndarray, axis=None, keepdims=False) -> np.ndarray:
    return np.sum(array, axis=axis, dtype=np.float64, keepdims=keepdims).astype(array.dtype)


################################################################################
#                              LINEAR OPERATIONS                               #
################################################################################

class Conv2d(Function):
    def forward(self, x, weight, bias=None, stride: int = 1, padding: int = 0):
        if x.ndim != 4 or weight.ndim != 4:
            raise ShapeMismatchError(f'conv2d expects NCHW input and OIHW kernel, got {x.shape} and {weight.shape}.')
        if x.shape[1] != weight.shape[1]:
            raise ShapeMismatchError(f'conv2d channel mismatch: input {x.shape[1]}, kernel {weight.shape[1]}.')
        self.stride, self.padding = stride, padding
        self.input_shape = x.shape
        padded = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x
        kernel_h, kernel_w = weight.shape[2:]
        if padded.shape[2] < kernel_h or padded.shape[3] < kernel_w:
            raise ShapeMismatchError(f'conv2d kernel {weight.shape[2:]} larger than padded input {padded.shape[2:]}.')
        windows = sliding_window_view(padded, (kernel_h, kernel_w), axis=(2, 3))[:, :, ::stride, ::stride]
        self.padded_shape = padded.shape
        self.windows = windows
        self.weight = weight
        output = np.einsum('nchwij,ocij->nohw', windows, weight, optimize=True)
        if bias is not None:
            output = output + bias[None, :, None, None]
        return output

    def backward(self, grad):
        weight_grad = np.einsum('nohw,nchwij->ocij', grad, self.windows, optimize=True)
        window_grad = np.einsum('nohw,ocij->nchwij', grad, self.weight, optimize=True)
        padded_grad = np.zeros(self.padded_shape, dtype=grad.dtype)
        out_h, out_w = grad.shape[2:]
        stride = self.stride
        for i in range(self.weight.shape[2]):
            for j in range(self.weight.shape[3]):
                padded_grad[:, :, i:i + stride * out_h:stride, j:j + stride * out_w:stride] += window_grad[..., i, j]
        padding = self.padding
        if padding:
            padded_grad = padded_grad[:, :, padding:-padding, padding:-padding]
        grads = [padded_grad, weight_grad]
        if len(self.parents) == 3:
            grads.append(_accumulate_sum(grad, axis=(0, 2, 3)))
        return tuple(grads)


class Linear(Function):
    def forward(self, x, weight, bias=None):
        if x.shape[-1] != weight.shape[1]:
            raise ShapeMismatchError(f'linear expects {weight.shape[1]} features, got {x.shape[-1]}.')
        self.x, self.weight = x, weight
        output = x @ weight.T
        return output if bias is None else output + bias

    def backward(self, grad):
        grads = [grad @ self.weight, grad.reshape(-1, grad.shape[-1]).T @ self.x.reshape(-1, self.x.shape[-1])]
        if len(self.parents) == 3:
            grads.append(_accumulate_sum(grad.reshape(-1, grad.shape[-1]), axis=0))
        return tuple(grads)


class Add(Function):
    def forward(self, a, b):
        self.shapes = (a.shape, b.shape)
        return a + b

    def backward(self, grad):
        return _unbroadcast(grad, self.shapes[0]), _unbroadcast(grad, self.shapes[1])


class Sub(Function):
    def forward(self, a, b):
        self.shapes = (a.shape, b.shape)
        return a - b

    def backward(self, grad):
        return _unbroadcast(grad, self.shapes[0]), _unbroadcast(-grad, self.shapes[1])


class Scale(Function):
    def forward(self, x, factor: float = 1.0):
        self.factor = factor
        return x * x.dtype.type(factor)

    def backward(self, grad):
        return (grad * grad.dtype.type(self.factor),)


class Mul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return _unbroadcast(grad * self.b, self.a.shape), _unbroadcast(grad * self.a, self.b.shape)


class Reshape(Function):
    def forward(self, x, shape: Tuple[int, ...] = ()):
        self.input_shape = x.shape
        return x.reshape(shape)

    def backward(self, grad):
        return (grad.reshape(self.input_shape),)


class Take(Function):
    def forward(self, x, start: int = 0, stop: int = 1, axis: int = 1):
        self.input_shape, self.start, self.stop, self.axis = x.shape, start, stop, axis
        index = [slice(None)] * x.ndim
        index[axis] = slice(start, stop)
        self.selection = tuple(index)
        return x[self.selection]

    def backward(self, grad):
        full = np.zeros(self.input_shape, dtype=grad.dtype)
        full[self.selection] = grad
        return (full,)


################################################################################
#                           ELEMENTWISE NONLINEARITIES                         #
################################################################################

class Relu(Function):
    nonsmooth = True

    def forward(self, x):
        self.mask = x > 0
        return np.where(self.mask, x, x.dtype.type(0))

    def backward(self, grad):
        return (grad * self.mask,)

    def region(self):
        return self.mask


class Sigmoid(Function):
    def forward(self, x):
        self.output = expit(x)
        return self.output

    def backward(self, grad):
        return (grad * self.output * (1 - self.output),)


class Exp(Function):
    def forward(self, x):
        self.output = np.exp(x)
        return self.output

    def backward(self, grad):
        return (grad * self.output,)


class Log(Function):
    def forward(self, x):
        self.x = x
        return np.log(x)

    def backward(self, grad):
        return (grad / self.x,)


class Softmax(Function):
    def forward(self, x, axis: int = -1):
        self.axis = axis
        self.output = np.exp(_log_softmax(x, axis=axis))
        return self.output

    def backward(self, grad):
        weighted = _accumulate_sum(grad * self.output, axis=self.axis, keepdims=True)
        return (self.output * (grad - weighted),)


class Clamp(Function):
    nonsmooth = True

    def forward(self, x, low: Optional[float] = None, high: Optional[float] = None):
        low = -np.inf if low is None else low
        high = np.inf if high is None else high
        self.piece = np.where(x < low, -1, np.where(x > high, 1, 0)).astype(np.int8)
        return np.clip(x, low, high).astype(x.dtype)

    def backward(self, grad):
        return (grad * (self.piece == 0),)

    def region(self):
        return self.piece


class SpikeThreshold(Function):
    """Heaviside firing in forward, surrogate pseudo-derivative in backward."""

    nonsmooth = True

    def forward(self, u, v_th: float = 1.0, surrogate: SurrogateSpec = _DEFAULT_SURROGATE, inclusive: bool = False):
        self.surrogate = surrogate
        self.inclusive = inclusive
        self.distance = u - u.dtype.type(v_th)
        if surrogate.relaxed:
            return surrogate.primitive(self.distance).astype(u.dtype)
        fired = self.distance >= 0 if inclusive else self.distance > 0
        return fired.astype(u.dtype)

    def backward(self, grad):
        return (grad * self.surrogate.derivative(self.distance).astype(grad.dtype),)

    def region(self):
        if self.surrogate.relaxed:
            return self.surrogate.piece(self.distance)
        fired = self.distance >= 0 if self.inclusive else self.distance > 0
        return fired.astype(np.int8)


################################################################################
#                                 REDUCTIONS                                   #
################################################################################

class Sum(Function):
    def forward(self, x, axis=None):
        self.input_shape, self.axis = x.shape, axis
        return _accumulate_sum(x, axis=axis)

    def backward(self, grad):
        if self.axis is not None:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad, self.input_shape).copy(),)


class Mean(Function):
    def forward(self, x, axis=None):
        self.input_shape, self.axis = x.shape, axis
        self.count = x.size if axis is None else int(np.prod([x.shape[a] for a in np.atleast_1d(axis)]))
        return (np.sum(x, axis=axis, dtype=np.float64) / self.count).astype(x.dtype)

    def backward(self, grad):
        if self.axis is not None:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad / grad.dtype.type(self.count), self.input_shape).copy(),)


class Max(Function):
    nonsmooth = True

    def forward(self, x, axis=None):
        self.input_shape, self.axis = x.shape, axis
        if axis is None:
            self.argmax = np.argmax(x)
            return x.reshape(-1)[self.argmax]
        self.argmax = np.argmax(x, axis=axis)
        return np.max(x, axis=axis)

    def backward(self, grad):
        full = np.zeros(self.input_shape, dtype=grad.dtype)
        if self.axis is None:
            full.reshape(-1)[self.argmax] = grad
            return (full,)
        np.put_along_axis(full, np.expand_dims(self.argmax, self.axis), np.expand_dims(grad, self.axis), self.axis)
        return (full,)

    def region(self):
        return np.asarray(self.argmax)


class MSE(Function):
    def forward(self, a, b):
        self.difference = a - b
        self.count = a.size
        return (np.sum(np.square(self.difference, dtype=np.float64)) / self.count).astype(a.dtype)

    def backward(self, grad):
        local = grad * self.difference * self.difference.dtype.type(2.0 / self.count)
        return local, -local


class BCEWithLogits(Function):
    """Weighted mean of binary cross-entropy evaluated from logits."""

    def forward(self, logits, targets, weights):
        self.logits, self.targets, self.weights = logits, targets, weights
        self.normalizer = max(float(np.sum(weights, dtype=np.float64)), 1.0)
        losses = -(targets * log_expit(logits) + (1 - targets) * log_expit(-logits))
        return (np.sum(losses * weights, dtype=np.float64) / self.normalizer).astype(logits.dtype)

    def backward(self, grad):
        local = (expit(self.logits) - self.targets) * self.weights / self.normalizer
        return (grad * local).astype(grad.dtype), None, None


class CrossEntropy(Function):
    """Masked mean cross-entropy over a class axis."""

    def forward(self, logits, targets, mask, axis: int = 1):
        self.axis = axis
        log_probs = _log_softmax(logits, axis=axis)
        self.probabilities = np.exp(log_probs)
        self.one_hot = np.zeros_like(logits)
        np.put_along_axis(self.one_hot, np.expand_dims(targets.astype(np.int64), axis), 1, axis)
        self.mask = np.expand_dims(mask, axis)
        self.normalizer = max(float(np.sum(mask, dtype=np.float64)), 1.0)
        losses = -np.sum(self.one_hot * log_probs, axis=axis, keepdims=True)
        return (np.sum(losses * self.mask, dtype=np.float64) / self.normalizer).astype(logits.dtype)

    def backward(self, grad):
        local = (self.probabilities - self.one_hot) * self.mask / self.normalizer
        return (grad * local).astype(grad.dtype), None, None


################################################################################
#                              FUNCTIONAL WRAPPERS                             #
################################################################################

def conv2d(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None, stride: int = 1, padding: int = 0) -> Tensor:
    parents = (x, weight) if bias is None else (x, weight, bias)
    return Conv2d.apply(*parents, stride=stride, padding=padding)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    parents = (x, weight) if bias is None else (x, weight, bias)
    return Linear.apply(*parents)


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def sub(a: Tensor, b: Tensor) -> Tensor:
    return Sub.apply(a, b)


def scale(x: Tensor, factor: float) -> Tensor:
    return Scale.apply(x, factor=factor)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return Mul.apply(a, b)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return Reshape.apply(x, shape=tuple(shape))


def take(x: Tensor, start: int, stop: int, axis: int = 1) -> Tensor:
    return Take.apply(x, start=start, stop=stop, axis=axis)


def relu(x: Tensor) -> Tensor:
    return Relu.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def exp(x: Tensor) -> Tensor:
    return Exp.apply(x)


def log(x: Tensor) -> Tensor:
    return Log.apply(x)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    return Softmax.apply(x, axis=axis)


def clamp(x: Tensor, low: Optional[float] = None, high: Optional[float] = None) -> Tensor:
    return Clamp.apply(x, low=low, high=high)


def spike_threshold(u: Tensor, v_th: float, surrogate: SurrogateSpec = _DEFAULT_SURROGATE,
                    inclusive: bool = False) -> Tensor:
    return SpikeThreshold.apply(u, v_th=v_th, surrogate=surrogate, inclusive=inclusive)


def reduce_sum(x: Tensor, axis=None) -> Tensor:
    return Sum.apply(x, axis=axis)


def reduce_mean(x: Tensor, axis=None) -> Tensor:
    return Mean.apply(x, axis=axis)


def reduce_max(x: Tensor, axis=None) -> Tensor:
    return Max.apply(x, axis=axis)


def mse(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeMismatchError(f'mse operands differ in shape: {a.shape} vs {b.shape}.')
    return MSE.apply(a, b)


def bce_with_logits(logits: Tensor, targets: np.ndarray, weights: Optional[np.ndarray] = None) -> Tensor:
    weights = np.ones_like(logits.data) if weights is None else weights
    return BCEWithLogits.apply(logits, Tensor(targets), Tensor(weights))


def cross_entropy(logits: Tensor, targets: np.ndarray, mask: np.ndarray, axis: int = 1) -> Tensor:
    return CrossEntropy.apply(logits, Tensor(targets), Tensor(mask), axis=axis)
