#!/usr/bin/env python
# -*- coding: utf-8 -*-

import unittest
import numpy as np
from quality_corruption.exceptions import (
    ConfigurationError, GraphStateError, InputRangeError, ShapeMismatchError, SpikeRangeError
)
from quality_corruption.numeric import Tensor, precision
from quality_corruption.substrate import (
    Deployability, MembraneState, NeuronParams, SpikingNeuron, SubstrateSpec, check_spike_range,
    classify_substrate, encode_input, ilif_step, lif_step, reference_substrates, signed_if_step
)


class TestSpikingSubstrate(unittest.TestCase):
    def setUp(self):
        self.lif = NeuronParams(beta=0.5, v_th=1.0, kind='LIF')
        self.ilif = NeuronParams(beta=1.0, v_th=1.0, kind='I-LIF', d_max=4)
        self.signed = NeuronParams(beta=1.0, v_th=1.0, kind='SignedIF')

    @staticmethod
    def _start(values, steps=None):
        return MembraneState.initial(np.shape(values), steps)

    ################################################################################
    #                               NEURON DYNAMICS                                #
    ################################################################################

    def test_lif_fire_and_reset(self):
        with precision(np.float64):
            state, spikes = lif_step(self._start([0, 0]), Tensor(np.array([0.6, 1.2])), self.lif)
            self.assertEqual(spikes.data.tolist(), [0.0, 1.0])
            np.testing.assert_allclose(state.u.data, [0.6, 0.0])
            np.testing.assert_allclose(state.potential.data, [0.6, 1.2])
            state, spikes = lif_step(state, Tensor(np.array([0.6, 0.6])), self.lif)
        self.assertEqual(spikes.data.tolist(), [0.0, 0.0])
        np.testing.assert_allclose(state.u.data, [0.9, 0.6])
        self.assertEqual(state.t, 2)

    def test_lif_threshold_is_strict(self):
        _, spikes = lif_step(self._start([0]), Tensor(np.array([1.0])), self.lif)
        self.assertEqual(spikes.data.tolist(), [0.0])

    def test_ilif_integer_levels(self):
        with precision(np.float64):
            state, levels = ilif_step(self._start([0, 0, 0, 0]), Tensor(np.array([0.5, 1.0, 2.5, 7.0])), self.ilif)
        self.assertEqual(levels.data.tolist(), [0.0, 1.0, 2.0, 4.0])
        np.testing.assert_allclose(state.u.data, [0.5, 0.0, 0.5, 3.0])

    def test_signed_if_ternary(self):
        with precision(np.float64):
            state, spikes = signed_if_step(self._start([0, 0, 0]), Tensor(np.array([1.5, -1.5, 0.5])), self.signed)
            self.assertEqual(spikes.data.tolist(), [1.0, -1.0, 0.0])
            state, spikes = signed_if_step(state, Tensor(np.array([0.0, 0.0, 0.6])), self.signed)
        # no leak: 0.5 + 0.6 crosses the threshold
        self.assertEqual(spikes.data.tolist(), [0.0, 0.0, 1.0])

    def test_step_beyond_temporal_depth(self):
        neuron = SpikingNeuron(self.lif)
        state = self._start([0], steps=1)
        state, _ = neuron.step(state, Tensor(np.array([0.2])))
        with self.assertRaises(GraphStateError):
            neuron.step(state, Tensor(np.array([0.2])))

    def test_step_shape_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            lif_step(self._start([0, 0]), Tensor(np.array([0.2, 0.2, 0.2])), self.lif)

    def test_spike_range_check(self):
        check_spike_range(Tensor(np.array([0.0, 1.0])), self.lif)
        with self.assertRaises(SpikeRangeError):
            check_spike_range(Tensor(np.array([0.0, 2.0])), self.lif)
        check_spike_range(Tensor(np.array([-1.0, 1.0])), self.signed)
        with self.assertRaises(SpikeRangeError):
            check_spike_range(Tensor(np.array([5.0])), self.ilif)

    def test_neuron_run_captures_trace(self):
        neuron = SpikingNeuron(self.lif)
        currents = [Tensor(np.full((2, 2), 0.7))] * 3
        spikes, trace = neuron.run(currents, capture=True)
        self.assertEqual(len(spikes), 3)
        self.assertEqual(len(trace), 3)
        # 0.7, 0.35 + 0.7 = 1.05 fires, then 0.7 again
        self.assertEqual([float(step.data[0, 0]) for step in spikes], [0.0, 1.0, 0.0])

    def test_invalid_neuron_params(self):
        with self.assertRaises(ConfigurationError):
            NeuronParams(kind='Izhikevich')
        with self.assertRaises(ConfigurationError):
            NeuronParams(beta=0.0)
        with self.assertRaises(ConfigurationError):
            NeuronParams(kind='I-LIF', d_max=0)

    def test_step_kind_mismatch(self):
        with self.assertRaises(ConfigurationError):
            ilif_step(self._start([0]), Tensor(np.array([0.5])), self.lif)

    ################################################################################
    #                                INPUT ENCODING                                #
    ################################################################################

    def test_direct_encoding(self):
        image = Tensor(np.full((3, 4, 4), 0.5))
        currents = encode_input(image, 4)
        self.assertEqual(len(currents), 4)
        self.assertTrue(all(current is image for current in currents))

    def test_encoding_rejects_out_of_range_pixels(self):
        with self.assertRaises(InputRangeError):
            encode_input(Tensor(np.full((3, 2, 2), 1.5)), 2)

    def test_encoding_needs_positive_depth(self):
        with self.assertRaises(ConfigurationError):
            encode_input(Tensor(np.zeros((3, 2, 2))), 0)

    def test_unknown_encoding_scheme(self):
        with self.assertRaises(ConfigurationError):
            encode_input(Tensor(np.zeros((3, 2, 2))), 2, scheme='rate')

    ################################################################################
    #                               DEPLOYABILITY                                  #
    ################################################################################

    def test_reference_detectors(self):
        substrates = reference_substrates()
        verdicts = {name: classify_substrate(spec) for name, spec in substrates.items()}
        self.assertEqual(verdicts['EMS-YOLO'], Deployability.HARDWARE_DEPLOYABLE)
        for name in ('SpikeYOLO', 'SpikingYOLOX', 'Adv-SpikingYOLOX'):
            self.assertEqual(verdicts[name], Deployability.NON_DEPLOYABLE)

    def test_conditional_binary_spikes_are_not_deployable(self):
        spec = SubstrateSpec.for_neuron('SignedIF', 1)
        self.assertEqual(spec.c1_binary_spikes, 'conditional')
        self.assertEqual(classify_substrate(spec), Deployability.NON_DEPLOYABLE)

    def test_lif_substrate_is_deployable(self):
        spec = SubstrateSpec.for_neuron('LIF', 4)
        self.assertEqual(spec.encoding, 'binary01')
        self.assertEqual(classify_substrate(spec), Deployability.HARDWARE_DEPLOYABLE)
        self.assertEqual(
            classify_substrate(SubstrateSpec.for_neuron('LIF', 4, c2_ac_only=False)),
            Deployability.NON_DEPLOYABLE
        )

    def test_inconsistent_substrate(self):
        with self.assertRaises(ConfigurationError):
            SubstrateSpec(encoding='integer0toD', neuron='I-LIF', c1_binary_spikes='yes')
        with self.assertRaises(ConfigurationError):
            SubstrateSpec(T=0)
