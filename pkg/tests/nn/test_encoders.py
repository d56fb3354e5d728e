"""Tests for the exogenous, low-frequency and high-frequency encoders."""

from htgnn.config.errors import ConfigurationError
from htgnn.nn import (
    ExogenousEncoder,
    GatedConvLayer,
    GatedConvStack,
    HighFreqEncoder,
    LowFreqEncoder,
    encode_exogenous,
    encode_high_freq,
    encode_low_freq,
)
from htgnn.nn.errors import NonFiniteInputError, ShapeMismatchError, WindowTooShortError

import pytest

import torch
from torch import nn
from torch.nn import functional as F


def _zero(module: nn.Module) -> nn.Module:
    for parameter in module.parameters():
        nn.init.zeros_(parameter)
    return module


def test_exogenous_mean(seeded):
    """Tests the exogenous embedding only sees the per-variable time mean of its window."""
    encoder = ExogenousEncoder(1, 5).double()
    ramp = encode_exogenous(torch.tensor([[1.0, 2.0, 3.0]], dtype=torch.float64), encoder)
    constant = encode_exogenous(torch.tensor([[2.0, 2.0, 2.0]], dtype=torch.float64), encoder)
    assert ramp.shape == (5,)
    assert torch.equal(ramp, constant)
    shuffled = encode_exogenous(torch.tensor([[3.0, 1.0, 2.0]], dtype=torch.float64), encoder)
    torch.testing.assert_close(shuffled, ramp, rtol=0.0, atol=1e-15)


def test_exogenous_zero_parameters():
    """Tests an encoder with zero weights and biases embeds anything to the zero vector."""
    encoder = _zero(ExogenousEncoder(2, 4))
    h_w = encode_exogenous(torch.randn(2, 7), encoder)
    assert torch.equal(h_w, torch.zeros(4))


def test_exogenous_errors():
    """Tests the exogenous encoder rejects wrong shapes, empty and non-finite windows."""
    encoder = ExogenousEncoder(1, 5)
    with pytest.raises(ShapeMismatchError, match=r"\(batch, 1, L\)"):
        encoder(torch.zeros(2, 3, 4))
    with pytest.raises(WindowTooShortError):
        encoder(torch.zeros(2, 1, 0))
    with pytest.raises(NonFiniteInputError, match="'W'"):
        encoder(torch.tensor([[[1.0, float("nan")]]]))


def test_low_freq_zero_propagation():
    """Tests one step over a zero input from a zero state with zero weights gives SiLU(0) = 0."""
    encoder = _zero(LowFreqEncoder(3, 4))
    h = encode_low_freq(torch.zeros(1), torch.zeros(3), encoder)
    assert torch.equal(h, torch.zeros(4))


def test_low_freq_depends_on_context(seeded):
    """Tests identical windows with different exogenous embeddings give different states."""
    encoder = LowFreqEncoder(5, 10).double()
    x = torch.randn(30, dtype=torch.float64)
    first = encode_low_freq(x, torch.randn(5, dtype=torch.float64), encoder)
    second = encode_low_freq(x, torch.randn(5, dtype=torch.float64), encoder)
    assert first.shape == (10,)
    assert not torch.allclose(first, second)


def test_low_freq_is_sequential(seeded):
    """Tests swapping two distinct time steps changes the final state."""
    encoder = LowFreqEncoder(5, 10).double()
    h_w = torch.randn(5, dtype=torch.float64)
    x = torch.randn(12, dtype=torch.float64)
    swapped = x.clone()
    swapped[[2, 7]] = x[[7, 2]]
    assert not torch.allclose(encode_low_freq(x, h_w, encoder), encode_low_freq(swapped, h_w, encoder))


def test_low_freq_unconditioned_ignores_context(seeded):
    """Tests an unconditioned encoder starts from zeros whatever the exogenous embedding."""
    encoder = LowFreqEncoder(5, 10, conditioned=False).double()
    x = torch.randn(1, 2, 12, dtype=torch.float64)
    assert torch.equal(encoder(x, torch.randn(1, 5, dtype=torch.float64)), encoder(x, None))


def test_low_freq_silu_switch(seeded):
    """Tests the SiLU after every cell step can be switched off."""
    encoder = LowFreqEncoder(4, 4, silu_in_gru=False).double()
    x = torch.randn(1, 1, 6, dtype=torch.float64)
    h_w = torch.randn(1, 4, dtype=torch.float64)
    h = h_w.clone()
    for t in range(6):
        h = encoder.cell(x[:, 0, t : t + 1], h)
    torch.testing.assert_close(encoder(x, h_w)[:, 0], h, rtol=0.0, atol=0.0)


def test_low_freq_errors():
    """Tests the low-frequency encoder rejects empty and non-finite windows."""
    encoder = LowFreqEncoder(3, 4)
    with pytest.raises(WindowTooShortError):
        encoder(torch.zeros(1, 1, 0), torch.zeros(1, 3))
    with pytest.raises(NonFiniteInputError, match="'X_L'"):
        encoder(torch.full((1, 1, 3), float("inf")), torch.zeros(1, 3))
    with pytest.raises(ShapeMismatchError):
        encoder(torch.zeros(4, 3), torch.zeros(1, 3))


def test_low_freq_gradient_wrt_context(seeded):
    """Tests the analytic gradient of the state with respect to h_w matches central differences."""
    encoder = LowFreqEncoder(3, 4).double()
    x = torch.randn(1, 2, 8, dtype=torch.float64)
    h_w = torch.randn(1, 3, dtype=torch.float64, requires_grad=True)
    assert torch.autograd.gradcheck(lambda c: encoder(x, c), (h_w,), eps=1e-5, atol=1e-8, rtol=1e-4)


def test_gate_at_zero(seeded):
    """Tests zero gate weights and bias halve the convolution output."""
    layer = GatedConvLayer(1, 4, 3, 1, d_w=5).double()
    _zero(layer.gate)
    x = torch.randn(2, 1, 10, dtype=torch.float64)
    h_w = torch.randn(2, 5, dtype=torch.float64)
    torch.testing.assert_close(layer(x, h_w), 0.5 * layer.conv(x), rtol=0.0, atol=0.0)


def test_gate_saturation(seeded):
    """Tests a large gate bias lets the convolution through unchanged."""
    layer = GatedConvLayer(1, 4, 3, 1, d_w=5).double()
    nn.init.zeros_(layer.gate.weight)
    nn.init.constant_(layer.gate.bias, 30.0)
    x = torch.randn(2, 1, 10, dtype=torch.float64)
    torch.testing.assert_close(layer(x, torch.randn(2, 5, dtype=torch.float64)), layer.conv(x), rtol=0.0, atol=1e-9)


def test_impulse_response():
    """Tests a same-padded kernel [1, 2, 1] centres its response on an impulse."""
    layer = GatedConvLayer(1, 1, 3, 1, d_w=1, gated=False).double()
    with torch.no_grad():
        layer.conv.weight.copy_(torch.tensor([[[1.0, 2.0, 1.0]]]))
        layer.conv.bias.zero_()
    x = torch.zeros(1, 1, 7, dtype=torch.float64)
    x[0, 0, 3] = 1.0
    assert layer(x).flatten().tolist() == [0.0, 0.0, 1.0, 2.0, 1.0, 0.0, 0.0]


def test_gate_lies_in_open_unit_interval(seeded):
    """Tests gate values are strictly between 0 and 1 for finite embeddings."""
    layer = GatedConvLayer(4, 4, 5, 2, d_w=5).double()
    g = layer.gate_values(torch.randn(64, 5, dtype=torch.float64))
    assert g.shape == (64, 4)
    assert bool(((g > 0.0) & (g < 1.0)).all())
    assert layer.receptive_field == 9


def test_layer_configuration_errors():
    """Tests even kernels, zero dilations and wrong channel counts are rejected."""
    with pytest.raises(ConfigurationError, match="must be odd"):
        GatedConvLayer(1, 4, 4, 1, d_w=5)
    with pytest.raises(ConfigurationError, match="dilation"):
        GatedConvLayer(1, 4, 3, 0, d_w=5)
    with pytest.raises(ShapeMismatchError):
        GatedConvLayer(2, 4, 3, 1, d_w=5)(torch.zeros(1, 1, 8))
    with pytest.raises(WindowTooShortError, match="receptive field 9"):
        GatedConvStack(5, 2, d_w=5, length=8, out_features=3)


def test_high_freq_output_size(seeded):
    """Tests the node state concatenates both scales into d features."""
    encoder = HighFreqEncoder(5, 9, 30).double()
    h = encode_high_freq(torch.randn(30, dtype=torch.float64), torch.randn(5, dtype=torch.float64), encoder)
    assert h.shape == (9,)
    assert encoder.small.reduce.out_features == 4
    assert encoder.large.reduce.out_features == 5


def test_high_freq_is_not_reversal_symmetric(seeded):
    """Tests a window and its time reversal generally encode differently."""
    encoder = HighFreqEncoder(5, 10, 30).double()
    x = torch.randn(30, dtype=torch.float64)
    h_w = torch.randn(5, dtype=torch.float64)
    assert not torch.allclose(encode_high_freq(x, h_w, encoder), encode_high_freq(x.flip(0), h_w, encoder))


def test_unit_gate_matches_plain_cnn(seeded, monkeypatch):
    """Tests forcing every gate to 1 reproduces an ungated convolution stack computed by hand."""
    encoder = HighFreqEncoder(5, 10, 30).double()
    for stack in (encoder.small, encoder.large):
        for layer in stack.layers:
            width = layer.conv.out_channels
            monkeypatch.setattr(layer, "gate_values", lambda h_w, width=width: h_w.new_ones(h_w.shape[0], width))
    x = torch.randn(3, 2, 30, dtype=torch.float64)
    h_w = torch.randn(3, 5, dtype=torch.float64)

    def plain(stack: GatedConvStack, rows: torch.Tensor) -> torch.Tensor:
        for layer in stack.layers:
            conv = layer.conv
            rows = F.silu(F.conv1d(rows, conv.weight, conv.bias, padding=conv.padding, dilation=conv.dilation))
        return stack.reduce(rows.flatten(1))

    rows = x.reshape(6, 1, 30)
    expected = torch.cat([plain(encoder.small, rows), plain(encoder.large, rows)], dim=-1).reshape(3, 2, 10)
    torch.testing.assert_close(encoder(x, h_w), expected, rtol=0.0, atol=1e-12)


def test_outputs_finite_for_large_inputs(seeded):
    """Tests default-initialised encoders stay finite on inputs of magnitude 1e3."""
    x = 1e3 * torch.randn(2, 3, 30, dtype=torch.float64).sign()
    w = 1e3 * torch.ones(2, 1, 30, dtype=torch.float64)
    h_w = ExogenousEncoder(1, 5).double()(w)
    assert torch.isfinite(h_w).all()
    assert torch.isfinite(LowFreqEncoder(5, 10).double()(x, h_w)).all()
    assert torch.isfinite(HighFreqEncoder(5, 10, 30).double()(x, h_w)).all()


def test_reset_parameters_bounds(seeded):
    """Tests weights lie within ±1/√fan_in and biases start at zero."""
    encoder = HighFreqEncoder(5, 10, 30)
    conv = encoder.small.layers[1].conv
    assert conv.weight.abs().max().item() <= 1.0 / (4 * 3) ** 0.5
    assert torch.equal(conv.bias, torch.zeros_like(conv.bias))
    assert torch.equal(encoder.small.layers[0].gate.bias, torch.zeros(4))
