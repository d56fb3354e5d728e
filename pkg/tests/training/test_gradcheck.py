"""Tests autograd gradients of every model variant against central finite differences."""

from htgnn.data import WindowBatch
from htgnn.nn import VARIANTS
from htgnn.training import grad_check
from htgnn.training.errors import PreconditionError

import pytest

from tests.nn.toys import toy_inputs, toy_model
from tests.training.stubs import LastValue, LinearMap

import torch


def _batch(seed: int = 0, d_y: int = 2) -> WindowBatch:
    x_l, x_h, w = toy_inputs(batch=3, seed=seed)
    y = torch.randn(3, d_y, generator=torch.Generator().manual_seed(seed + 100), dtype=torch.float64)
    return WindowBatch(x_l, x_h, w, y)


def test_linear_model():
    """Tests a linear model, whose loss is quadratic, matches its finite differences almost exactly."""
    torch.manual_seed(0)
    model = LinearMap(n_inputs=7).double()
    assert grad_check(model, _batch(), fraction=1.0) < 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("variant", VARIANTS)
def test_variants(variant: str):
    """Tests the analytic gradients of a variant on the toy graph."""
    model = toy_model(variant, seed=1)
    before = {k: v.clone() for k, v in model.state_dict().items()}
    assert grad_check(model, _batch(seed=2), fraction=0.05, minimum=50, seed=3) < 1e-4
    after = model.state_dict()
    assert all(torch.equal(before[k], after[k]) for k in before)


def test_selection_is_seeded():
    """Tests the same seed checks the same entries and gives the same answer."""
    torch.manual_seed(0)
    model = LinearMap(n_inputs=7).double()
    assert grad_check(model, _batch(), seed=4) == grad_check(model, _batch(), seed=4)


def test_preconditions():
    """Tests invalid steps, float32 models and models without parameters are refused."""
    model = LinearMap(n_inputs=7).double()
    with pytest.raises(PreconditionError, match="step must be positive"):
        grad_check(model, _batch(), step=0.0)
    with pytest.raises(PreconditionError, match="float64"):
        grad_check(LinearMap(n_inputs=7), _batch())
    frozen = LastValue().double()
    frozen.unused.requires_grad_(False)
    with pytest.raises(PreconditionError, match="no trainable parameter"):
        grad_check(frozen, _batch(d_y=1))
