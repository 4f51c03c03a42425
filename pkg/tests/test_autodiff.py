#!/usr/bin/env python3
"""
Unit tests for the autodiff engine.

Covers the hand-computed examples of every operation, the finite-difference
gradient checks, backward() semantics and the Adam optimizer.
"""

import math
import unittest

import numpy as np

from dmtg.autodiff import (
    AdamState, PlateauScheduler, Tensor, adam_step, backward, bce_with_logits, column, exp,
    log, matmul, max_gradient_error, mean, mse, mul, no_grad, relu, replicate_rows, row_mean,
    row_softmax, scale, sub, sum_all, tanh, task_losses, transpose, vstack, add,
)
from dmtg.errors import (
    DomainError, GraphReleasedError, MissingGradientError, NonFiniteError, ShapeError,
)


class TestTensor(unittest.TestCase):
    """Construction and invariants of Tensor."""

    def test_vectors_become_rows(self):
        t = Tensor([1.0, 2.0, 3.0])
        self.assertEqual(t.shape, (1, 3))
        self.assertEqual(Tensor(5.0).shape, (1, 1))

    def test_rank_three_rejected(self):
        with self.assertRaises(ShapeError):
            Tensor(np.zeros((2, 2, 2)))

    def test_non_finite_rejected(self):
        for bad in (np.nan, np.inf, -np.inf):
            with self.subTest(value=bad):
                with self.assertRaises(NonFiniteError):
                    Tensor([[1.0, bad]])

    def test_grad_present_iff_requires_grad(self):
        self.assertIsNone(Tensor([[1.0]]).grad)
        leaf = Tensor([[1.0, 2.0]], requires_grad=True)
        np.testing.assert_array_equal(leaf.grad, np.zeros((1, 2)))

    def test_item_needs_scalar(self):
        with self.assertRaises(ShapeError):
            Tensor([[1.0, 2.0]]).item()


class TestOperations(unittest.TestCase):
    """Forward values of the differentiable operations."""

    def test_matmul_identity(self):
        out = matmul(np.eye(2), [[3.0, 4.0], [5.0, 6.0]])
        np.testing.assert_array_equal(out.values, [[3.0, 4.0], [5.0, 6.0]])

    def test_matmul_hand_arithmetic(self):
        self.assertEqual(matmul([[1.0, 2.0]], [[3.0], [4.0]]).item(), 11.0)

    def test_matmul_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))

    def test_mul_is_a_mask(self):
        out = mul([[1.0, 2.0], [3.0, 4.0]], [[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(out.values, [[1.0, 0.0], [0.0, 4.0]])

    def test_binary_ops_do_not_broadcast(self):
        for op in (add, sub, mul):
            with self.subTest(op=op.__name__):
                with self.assertRaises(ShapeError):
                    op(np.ones((2, 2)), np.ones((1, 2)))

    def test_relu(self):
        np.testing.assert_array_equal(relu([-1.0, 2.0]).values, [[0.0, 2.0]])

    def test_log_of_non_positive(self):
        for bad in ([[0.0]], [[-1.0, 2.0]]):
            with self.subTest(values=bad):
                with self.assertRaises(DomainError):
                    log(bad)

    def test_exp_overflow_is_non_finite(self):
        with self.assertRaises(NonFiniteError):
            exp([[1000.0]])

    def test_softmax_examples(self):
        np.testing.assert_allclose(row_softmax([[0.0, 0.0]]).values, [[0.5, 0.5]])
        e = math.e
        np.testing.assert_allclose(row_softmax([[1.0, 0.0]]).values, [[e / (e + 1), 1 / (e + 1)]], rtol=1e-12)
        stable = row_softmax([[1000.0, 0.0]]).values
        self.assertAlmostEqual(stable[0, 0], 1.0)
        self.assertAlmostEqual(stable[0, 1], 0.0)

    def test_softmax_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        out = row_softmax(rng.normal(scale=10.0, size=(20, 5))).values
        np.testing.assert_allclose(out.sum(axis=1), np.ones(20), atol=1e-12)

    def test_reductions(self):
        a = [[1.0, 2.0], [3.0, 6.0]]
        self.assertEqual(sum_all(a).item(), 12.0)
        self.assertEqual(mean(a).item(), 3.0)
        np.testing.assert_array_equal(row_mean(a).values, [[1.5], [4.5]])

    def test_replicate_rows_needs_a_row(self):
        np.testing.assert_array_equal(replicate_rows([[1.0, 2.0]], 3).values, np.tile([1.0, 2.0], (3, 1)))
        with self.assertRaises(ShapeError):
            replicate_rows(np.ones((2, 2)), 3)

    def test_column_and_vstack(self):
        a = [[1.0, 2.0], [3.0, 4.0]]
        np.testing.assert_array_equal(column(a, 1).values, [[2.0], [4.0]])
        with self.assertRaises(ShapeError):
            column(a, 2)
        np.testing.assert_array_equal(vstack([[[1.0, 2.0]], [[3.0, 4.0]]]).values, a)
        with self.assertRaises(ShapeError):
            vstack([[[1.0]], [[1.0, 2.0]]])


class TestLosses(unittest.TestCase):
    """Regression and classification losses."""

    def test_mse_of_equal_inputs(self):
        self.assertEqual(mse([1.0, 2.0], [1.0, 2.0]).item(), 0.0)

    def test_bce_at_zero_logit(self):
        self.assertAlmostEqual(bce_with_logits([0.0], [1.0]).item(), math.log(2.0), places=12)

    def test_bce_rejects_soft_targets(self):
        with self.assertRaises(DomainError):
            bce_with_logits([0.0], [0.5])

    def test_loss_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            mse([1.0, 2.0], [1.0])

    def test_task_losses_per_column(self):
        pred = np.array([[0.0, 1.0], [0.0, 3.0]])
        target = np.array([[1.0, 1.0], [0.0, 1.0]])
        losses = task_losses(pred, target, [True, False]).values
        self.assertAlmostEqual(losses[0, 0], math.log(2.0), places=12)
        self.assertAlmostEqual(losses[0, 1], 2.0)

    def test_task_losses_flag_count(self):
        with self.assertRaises(ShapeError):
            task_losses(np.zeros((2, 2)), np.zeros((2, 2)), [False])


class TestBackward(unittest.TestCase):
    """backward() semantics."""

    def test_sum_gives_ones(self):
        x = Tensor(np.arange(4.0).reshape(2, 2), requires_grad=True)
        backward(sum_all(x))
        np.testing.assert_array_equal(x.grad, np.ones((2, 2)))

    def test_square_gives_twice_x(self):
        x = Tensor([[3.0]], requires_grad=True)
        backward(sum_all(mul(x, x)))
        self.assertEqual(x.grad[0, 0], 6.0)

    def test_tanh_slope_at_zero(self):
        x = Tensor([[0.0]], requires_grad=True)
        backward(sum_all(tanh(x)))
        self.assertEqual(x.grad[0, 0], 1.0)

    def test_gradients_accumulate(self):
        x = Tensor([[1.0, 2.0]], requires_grad=True)
        backward(sum_all(x))
        backward(sum_all(scale(x, 2.0)))
        np.testing.assert_array_equal(x.grad, [[3.0, 3.0]])

    def test_shared_subexpression(self):
        x = Tensor([[2.0]], requires_grad=True)
        y = tanh(x)
        backward(sum_all(add(y, y)))
        self.assertAlmostEqual(x.grad[0, 0], 2.0 * (1.0 - math.tanh(2.0) ** 2), places=14)

    def test_non_scalar_loss(self):
        x = Tensor([[1.0, 2.0]], requires_grad=True)
        with self.assertRaises(ShapeError):
            backward(scale(x, 2.0))

    def test_second_backward_rejected(self):
        x = Tensor([[1.0, 2.0]], requires_grad=True)
        loss = sum_all(mul(x, x))
        backward(loss)
        with self.assertRaises(GraphReleasedError):
            backward(loss)

    def test_no_grad_records_nothing(self):
        x = Tensor([[1.0]], requires_grad=True)
        with no_grad():
            loss = sum_all(mul(x, x))
        with self.assertRaises(GraphReleasedError):
            backward(loss)


class TestGradientChecks(unittest.TestCase):
    """Analytic gradients against central finite differences."""

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def _leaf(self, shape, name, positive=False):
        values = self.rng.uniform(0.5, 2.0, size=shape) if positive else self.rng.standard_normal(shape)
        return Tensor(values, requires_grad=True, name=name)

    def test_matmul_gradient(self):
        a, b = self._leaf((3, 3), "a"), self._leaf((3, 3), "b")
        self.assertLess(max_gradient_error(lambda: sum_all(matmul(a, b)), [a, b]), 1e-6)

    def test_mean_gradient(self):
        a = self._leaf((3, 4), "a")
        self.assertLess(max_gradient_error(lambda: mean(mul(a, a)), [a]), 1e-6)

    def test_every_op_at_ten_points(self):
        weights = Tensor(self.rng.standard_normal((3, 4)), name="weights")
        builders = {
            "tanh": lambda a: tanh(a),
            "exp": lambda a: exp(a),
            "log": lambda a: log(a),
            "neg": lambda a: scale(a, -1.0),
            "scale": lambda a: scale(a, 2.5),
            "softmax": lambda a: row_softmax(a),
            "transpose": lambda a: transpose(transpose(a)),
            "row_mean": lambda a: transpose(replicate_rows(transpose(row_mean(a)), 4)),
            "sub": lambda a: sub(a, mul(a, a)),
        }
        for name, build in builders.items():
            for point in range(10):
                with self.subTest(op=name, point=point):
                    a = self._leaf((3, 4), "a", positive=(name == "log"))
                    loss_fn = (lambda a=a, build=build: sum_all(mul(build(a), weights)))
                    self.assertLess(max_gradient_error(loss_fn, [a]), 1e-4)

    def test_loss_gradients(self):
        pred = self._leaf((6, 3), "pred")
        target = np.column_stack([self.rng.standard_normal(6), self.rng.integers(0, 2, 6),
                                  self.rng.standard_normal(6)]).astype(float)
        binary = [False, True, False]
        weights = Tensor(self.rng.uniform(0.5, 1.5, size=(1, 3)))
        self.assertLess(max_gradient_error(lambda: sum_all(mul(task_losses(pred, target, binary), weights)),
                                           [pred]), 1e-4)
        self.assertLess(max_gradient_error(lambda: mse(pred, target), [pred]), 1e-4)
        labels = (target > 0).astype(float)
        self.assertLess(max_gradient_error(lambda: bce_with_logits(pred, labels), [pred]), 1e-4)


class TestAdam(unittest.TestCase):
    """Adam updates and the plateau schedule."""

    def _step_on(self, x, loss_fn, state):
        backward(loss_fn(x))
        adam_step([x], state)

    def test_descends_on_square(self):
        x = Tensor([[1.0]], requires_grad=True, name="x")
        self._step_on(x, lambda t: sum_all(mul(t, t)), AdamState(lr=0.1))
        self.assertLess(x.values[0, 0], 1.0)

    def test_zero_gradient_leaves_parameters(self):
        x = Tensor([[1.5, -2.0]], requires_grad=True, name="x")
        adam_step([x], AdamState(lr=0.1))
        np.testing.assert_array_equal(x.values, [[1.5, -2.0]])

    def test_converges_on_shifted_square(self):
        x = Tensor([[0.0]], requires_grad=True, name="x")
        state = AdamState(lr=0.1)
        for _ in range(200):
            self._step_on(x, lambda t: sum_all(mul(sub(t, [[3.0]]), sub(t, [[3.0]]))), state)
        self.assertLess(abs(x.values[0, 0] - 3.0), 0.05)
        self.assertEqual(state.step, 200)

    def test_gradients_zeroed_after_step(self):
        x = Tensor([[2.0]], requires_grad=True, name="x")
        self._step_on(x, lambda t: sum_all(mul(t, t)), AdamState())
        np.testing.assert_array_equal(x.grad, [[0.0]])

    def test_missing_gradient(self):
        with self.assertRaises(MissingGradientError):
            adam_step([Tensor([[1.0]], name="frozen")], AdamState())

    def test_lr_scale_per_parameter(self):
        a = Tensor([[1.0]], requires_grad=True, name="a")
        b = Tensor([[1.0]], requires_grad=True, name="b")
        backward(sum_all(add(a, b)))
        adam_step([a, b], AdamState(lr=0.1, lr_scale={"b": 2.0}))
        # first Adam step moves each parameter by lr * sign(grad)
        self.assertAlmostEqual(1.0 - a.values[0, 0], 0.1, places=6)
        self.assertAlmostEqual(1.0 - b.values[0, 0], 0.2, places=6)

    def test_plateau_halves_lr_after_patience(self):
        state = AdamState(lr=0.1)
        plateau = PlateauScheduler(factor=0.5, patience=2)
        self.assertFalse(plateau.step(1.0, state))
        self.assertFalse(plateau.step(1.0, state))
        self.assertTrue(plateau.step(1.0, state))
        self.assertAlmostEqual(state.lr, 0.05)

    def test_plateau_respects_min_lr(self):
        state = AdamState(lr=0.1)
        plateau = PlateauScheduler(factor=0.5, patience=1, min_lr=0.1)
        plateau.step(1.0, state)
        self.assertFalse(plateau.step(2.0, state))
        self.assertEqual(state.lr, 0.1)


if __name__ == '__main__':
    unittest.main()
