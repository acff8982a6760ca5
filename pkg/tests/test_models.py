import numpy as np
import pytest
import torch
import torch.nn.functional as F

from advsem.attack import loss_logit
from advsem.errors import ValidationError
from advsem.models import (
    Ensemble,
    SourceModel,
    ensemble_logits,
    linear_probe_model,
    pixel_gradient,
    tiny_conv_model,
)

from support import smooth_image


class _NegatingModule(torch.nn.Module):
    def __init__(self, inner):
        super().__init__()
        self.inner = inner

    def forward(self, x):
        return -self.inner(x)


def _member_forward_oracle(model, image):
    """Resize + normalize + module forward, written out by hand."""
    x = torch.from_numpy(image).permute(2, 0, 1).unsqueeze(0)
    x = F.interpolate(
        x, size=(model.input_width, model.input_width), mode="bilinear", align_corners=False
    )
    mean = torch.tensor(model.mean).view(1, 3, 1, 1)
    std = torch.tensor(model.std).view(1, 3, 1, 1)
    with torch.no_grad():
        return model.module((x - mean) / std).squeeze(0).numpy()


class TestEnsembleLogits:
    def test_singleton_equals_member(self, tiny_model):
        image = smooth_image(1, side=64)
        got = ensemble_logits(Ensemble((tiny_model,)), image)
        want = _member_forward_oracle(tiny_model, image)
        assert np.allclose(got, want, atol=1e-6)

    def test_opposite_members_cancel(self, tiny_model):
        negated = SourceModel(
            name="neg",
            input_width=tiny_model.input_width,
            num_classes=tiny_model.num_classes,
            module=_NegatingModule(tiny_model.module),
        )
        image = smooth_image(2, side=64)
        got = ensemble_logits(Ensemble((tiny_model, negated)), image)
        assert np.allclose(got, 0.0, atol=1e-6)

    def test_mean_of_two_members_matches_oracle(self, tiny_ensemble):
        image = smooth_image(3, side=96)
        got = ensemble_logits(tiny_ensemble, image)
        members = [_member_forward_oracle(m, image) for m in tiny_ensemble.members]
        assert np.allclose(got, np.mean(members, axis=0), atol=1e-6)

    def test_permutation_invariance(self, tiny_ensemble):
        image = smooth_image(4, side=64)
        a = ensemble_logits(tiny_ensemble, image)
        flipped = Ensemble(tuple(reversed(tiny_ensemble.members)))
        b = ensemble_logits(flipped, image)
        assert np.allclose(a, b, atol=1e-7)

    def test_empty_ensemble_rejected(self):
        with pytest.raises(ValidationError):
            Ensemble(())

    def test_vocabulary_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            Ensemble((tiny_conv_model(seed=0, num_classes=10),
                      tiny_conv_model(seed=0, num_classes=12)))

    def test_out_of_range_image_rejected(self, tiny_ensemble):
        image = smooth_image(5, side=64) + 0.5
        with pytest.raises(ValidationError):
            ensemble_logits(tiny_ensemble, image)

    def test_deterministic_weights_from_seed(self):
        a = tiny_conv_model("a", seed=9)
        b = tiny_conv_model("b", seed=9)
        image = smooth_image(6, side=64)
        assert np.array_equal(
            ensemble_logits(Ensemble((a,)), image), ensemble_logits(Ensemble((b,)), image)
        )


class TestPixelGradient:
    def test_constant_loss_zero_gradient(self, tiny_ensemble):
        image = smooth_image(7, side=64)
        grad = pixel_gradient(tiny_ensemble, image, lambda logits: logits.sum() * 0.0)
        assert np.array_equal(grad, np.zeros_like(grad))

    def test_linear_probe_closed_form(self):
        width, classes = 8, 5
        rng = np.random.default_rng(0)
        matrix = rng.normal(size=(classes, 3 * width * width)).astype(np.float32)
        model = linear_probe_model(matrix, input_width=width)
        image = rng.random((width, width, 3)).astype(np.float32)
        target = 2
        grad = pixel_gradient(
            Ensemble((model,)), image, lambda logits: loss_logit(logits, target)
        )
        # logits = M @ flatten(CHW pixels); d(-z_t)/dpixels = -row_t, back to HWC
        want = -matrix[target].reshape(3, width, width).transpose(1, 2, 0)
        assert np.allclose(grad, want, atol=1e-5)

    def test_matches_finite_differences_on_random_pixels(self, tiny_model):
        import copy

        image = smooth_image(8, side=64)
        ens = Ensemble((tiny_model,))
        target = 3
        grad = pixel_gradient(ens, image, lambda logits: loss_logit(logits, target))
        # high-precision oracle: double forward, no autograd involved
        module64 = copy.deepcopy(tiny_model.module).double()

        def f(img):
            x = torch.from_numpy(img).permute(2, 0, 1).unsqueeze(0)
            with torch.no_grad():
                return -module64(x).squeeze(0)[target].item()

        rng = np.random.default_rng(1)
        h = 1e-5
        for _ in range(10):
            y, x, c = rng.integers(0, 64), rng.integers(0, 64), rng.integers(0, 3)
            up = image.astype(np.float64)
            up[y, x, c] += h
            down = image.astype(np.float64)
            down[y, x, c] -= h
            numeric = (f(up) - f(down)) / (2 * h)
            assert abs(grad[y, x, c] - numeric) / max(abs(numeric), 1e-8) < 1e-3

    def test_sum_of_losses_is_sum_of_gradients(self, tiny_ensemble):
        image = smooth_image(9, side=64)
        g1 = pixel_gradient(tiny_ensemble, image, lambda l: loss_logit(l, 1))
        g2 = pixel_gradient(tiny_ensemble, image, lambda l: loss_logit(l, 4))
        g12 = pixel_gradient(
            tiny_ensemble, image, lambda l: loss_logit(l, 1) + loss_logit(l, 4)
        )
        assert np.allclose(g12, g1 + g2, atol=1e-6)
