#!/usr/bin/env python
# -*- coding: utf-8 -*-

import unittest
import numpy as np
from quality_corruption.exceptions import GraphStateError, NonFiniteError, ShapeMismatchError
from quality_corruption.numeric import (
    CompGraph, SurrogateSpec, Tensor, add, check_gradient, clamp, conv2d, exp, linear, mse, mul,
    precision, reduce_max, reduce_mean, reduce_sum, relu, scale, sigmoid, spike_threshold
)


class TestNumeric(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(0)

    ################################################################################
    #                              UTILITY FUNCTIONS.                              #
    ################################################################################

    @staticmethod
    def _gradient(fn, *inputs):
        graph = CompGraph(fn)
        graph.forward(*(Tensor(value, requires_grad=True) for value in inputs))
        return graph.backward()

    @staticmethod
    def _naive_conv(image, kernel):
        height = image.shape[0] - kernel.shape[0] + 1
        width = image.shape[1] - kernel.shape[1] + 1
        output = np.zeros((height, width))
        for row in range(height):
            for col in range(width):
                total = 0.0
                for i in range(kernel.shape[0]):
                    for j in range(kernel.shape[1]):
                        total += image[row + i, col + j] * kernel[i, j]
                output[row, col] = total
        return output

    def _random_composition(self, depth, features):
        weight = self.rng.normal(size=(features, features))
        bias = self.rng.normal(size=features)

        def composition(x):
            h = x
            for level in range(depth):
                if level % 2:
                    h = sigmoid(linear(h, Tensor(weight), Tensor(bias)))
                else:
                    h = add(mul(h, h), scale(h, 0.5))
            return reduce_mean(h)
        return composition

    ################################################################################
    #                                FORWARD TESTS                                 #
    ################################################################################

    def test_conv2d_zero_image(self):
        weight = Tensor(self.rng.normal(size=(2, 3, 3, 3)))
        bias = Tensor(np.array([0.5, -1.5]))
        output = conv2d(Tensor(np.zeros((1, 3, 5, 5))), weight, bias, padding=1)
        self.assertEqual(output.shape, (1, 2, 5, 5))
        np.testing.assert_allclose(output.data[0, 0], 0.5)
        np.testing.assert_allclose(output.data[0, 1], -1.5)

    def test_conv2d_identity_kernel(self):
        image = self.rng.uniform(size=(1, 3, 4, 4))
        weight = np.eye(3).reshape(3, 3, 1, 1)
        output = conv2d(Tensor(image), Tensor(weight), Tensor(np.zeros(3)))
        np.testing.assert_allclose(output.data, image.astype(np.float32))

    def test_conv2d_ramp_image(self):
        with precision(np.float64):
            image = np.arange(25, dtype=np.float64).reshape(5, 5)
            kernel = np.array([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]])
            output = conv2d(Tensor(image[None, None]), Tensor(kernel[None, None]), Tensor(np.zeros(1)))
        np.testing.assert_allclose(output.data[0, 0], self._naive_conv(image, kernel))
        np.testing.assert_allclose(output.data[0, 0], -8.0)

    def test_conv2d_channel_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((1, 3, 3, 3))), Tensor(np.zeros(1)))

    def test_non_finite_forward(self):
        with self.assertRaises(NonFiniteError):
            exp(Tensor(np.array([1000.0])))

    def test_spike_threshold_strict(self):
        u = Tensor(np.array([1.0, 1.0 + 1e-4, 0.5, -1e6]))
        spikes = spike_threshold(u, 1.0)
        self.assertEqual(spikes.data.tolist(), [0.0, 1.0, 0.0, 0.0])

    def test_spike_threshold_inclusive(self):
        spikes = spike_threshold(Tensor(np.array([1.0, 0.999])), 1.0, inclusive=True)
        self.assertEqual(spikes.data.tolist(), [1.0, 0.0])

    def test_relaxed_spike_threshold(self):
        surrogate = SurrogateSpec(width=1.0, relaxed=True)
        with precision(np.float64):
            spikes = spike_threshold(Tensor(np.array([0.0, 1.0, 1.25, 3.0])), 1.0, surrogate)
        np.testing.assert_allclose(spikes.data, [0.0, 0.5, 0.75, 1.0])

    ################################################################################
    #                               BACKWARD TESTS                                 #
    ################################################################################

    def test_sum_gradient(self):
        gradient, = self._gradient(reduce_sum, self.rng.normal(size=(2, 3)))
        np.testing.assert_array_equal(gradient, np.ones((2, 3)))

    def test_surrogate_peak(self):
        for width in (0.5, 1.0, 2.0):
            surrogate = SurrogateSpec(width=width)
            gradient, = self._gradient(lambda u: reduce_sum(spike_threshold(u, 1.0, surrogate)), np.array([1.0]))
            self.assertAlmostEqual(float(gradient[0]), 1.0 / width, places=5)

    def test_arctan_surrogate_peak(self):
        surrogate = SurrogateSpec(kind='arctan', width=2.0)
        gradient, = self._gradient(lambda u: reduce_sum(spike_threshold(u, 1.0, surrogate)), np.array([1.0]))
        self.assertAlmostEqual(float(gradient[0]), 0.5, places=5)

    def test_surrogate_outside_support(self):
        surrogate = SurrogateSpec(width=0.5)
        u = np.array([1.0 - 2 * 0.5, 1.0 + 2 * 0.5])
        gradient, = self._gradient(lambda x: reduce_sum(spike_threshold(x, 1.0, surrogate)), u)
        np.testing.assert_array_equal(gradient, [0.0, 0.0])

    def test_backward_before_forward(self):
        with self.assertRaises(GraphStateError):
            CompGraph(reduce_sum).backward()

    def test_gradient_through_shared_node(self):
        gradient, = self._gradient(lambda x: reduce_sum(mul(x, x)), np.array([1.0, -2.0, 3.0]))
        np.testing.assert_allclose(gradient, [2.0, -4.0, 6.0])

    def test_clamp_and_max_gradients(self):
        x = np.array([-2.0, 0.5, 3.0])
        gradient, = self._gradient(lambda t: reduce_sum(clamp(t, low=0.0, high=1.0)), x)
        np.testing.assert_array_equal(gradient, [0.0, 1.0, 0.0])
        gradient, = self._gradient(reduce_max, x)
        np.testing.assert_array_equal(gradient, [0.0, 0.0, 1.0])

    def test_backward_linearity(self):
        with precision(np.float64):
            x = self.rng.normal(size=(4,))

            def f(t):
                return reduce_sum(mul(sigmoid(t), t))

            def g(t):
                return mse(relu(t), Tensor(np.ones(4)))

            a, b = 0.7, -1.3
            combined, = self._gradient(lambda t: add(scale(f(t), a), scale(g(t), b)), x)
            grad_f, = self._gradient(f, x)
            grad_g, = self._gradient(g, x)
        np.testing.assert_allclose(combined, a * grad_f + b * grad_g, atol=1e-6)

    def test_finite_difference_agreement(self):
        with precision(np.float64):
            for trial in range(100):
                depth = 1 + trial % 4
                x = self.rng.normal(size=(2, 5))
                result = check_gradient(self._random_composition(depth, 5), x, n_coords=5, seed=trial)
                self.assertLess(result.max_relative_error, 1e-4)

    def test_gradient_check_excludes_kinks(self):
        with precision(np.float64):
            x = np.array([0.0, 1.0, -1.0, 2.0])
            result = check_gradient(lambda t: reduce_sum(relu(t)), x, n_coords=4)
        self.assertEqual(result.excluded, [0])
        self.assertEqual(sorted(result.coordinates), [1, 2, 3])
        self.assertLess(result.max_relative_error, 1e-6)

    def test_gradient_check_needs_scalar(self):
        with self.assertRaises(ShapeMismatchError):
            check_gradient(relu, np.ones(3))

    def test_determinism(self):
        x = self.rng.normal(size=(3, 6))
        composition = self._random_composition(3, 6)
        first = self._gradient(composition, x)
        second = self._gradient(composition, x)
        np.testing.assert_array_equal(first[0], second[0])
