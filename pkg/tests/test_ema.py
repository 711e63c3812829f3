import math

import pytest
import torch

from radregion.errors import ShapeMismatch
from radregion.ssl.ema import EmaState, ema_schedule, ema_update


class TestSchedule:
    def test_endpoints(self):
        assert ema_schedule(0.9995, 0, 100) == pytest.approx(0.9995, abs=0)
        assert ema_schedule(0.9995, 100, 100) == pytest.approx(1.0, abs=0)

    def test_midpoint(self):
        # cos(pi/2) = 0 -> 1 - (1 - 0.9995)/2 = 0.99975
        assert ema_schedule(0.9995, 50, 100) == pytest.approx(0.99975, abs=1e-12)

    def test_monotone_nondecreasing(self):
        vals = [ema_schedule(0.99, k, 200) for k in range(201)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_step_bounds(self):
        with pytest.raises(ValueError):
            ema_schedule(0.99, 5, 4)


class TestUpdate:
    def test_arithmetic_exact(self):
        # tau stays at tau_base for step 0
        state = EmaState(online=[torch.ones(3)], target=[torch.zeros(3)],
                         tau_base=0.9995, step=0, total_steps=10)
        state = ema_update(state)
        assert torch.allclose(state.target[0],
                              torch.full((3,), 0.0005), atol=1e-12)
        assert state.step == 1

    def test_tau_one_freezes_target(self):
        state = EmaState(online=[torch.ones(2)], target=[torch.full((2,), 5.0)],
                         tau_base=1.0, step=0, total_steps=4)
        state = ema_update(state)
        assert torch.equal(state.target[0], torch.full((2,), 5.0))

    def test_tau_zero_copies_online(self):
        state = EmaState(online=[torch.ones(2)], target=[torch.full((2,), 5.0)],
                         tau_base=0.0, step=0, total_steps=4)
        state = ema_update(state)
        assert torch.equal(state.target[0], torch.ones(2))

    def test_online_never_changes(self):
        online = [torch.randn(4, 4)]
        snapshot = online[0].clone()
        state = EmaState(online=online, target=[torch.randn(4, 4)],
                         tau_base=0.9, step=0, total_steps=8)
        for _ in range(8):
            state = ema_update(state)
        assert torch.equal(online[0], snapshot)

    def test_distance_decreases_monotonically_with_frozen_online(self):
        online = [torch.randn(8)]
        target = [torch.randn(8)]
        state = EmaState(online=online, target=target, tau_base=0.5,
                         step=0, total_steps=16)
        dist = [float((online[0] - target[0]).norm())]
        for _ in range(16):
            state = ema_update(state)
            dist.append(float((online[0] - target[0]).norm()))
        assert all(b <= a + 1e-12 for a, b in zip(dist, dist[1:]))
        assert dist[-1] < dist[0]

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            EmaState(online=[torch.ones(3)], target=[torch.ones(4)],
                     tau_base=0.9, step=0, total_steps=4)


class TestNoGradientLeak:
    def test_two_layer_toy_network(self):
        torch.manual_seed(0)
        online = torch.nn.Sequential(torch.nn.Linear(4, 8), torch.nn.ReLU(),
                                     torch.nn.Linear(8, 4))
        target = torch.nn.Sequential(torch.nn.Linear(4, 8), torch.nn.ReLU(),
                                     torch.nn.Linear(8, 4))
        for p in target.parameters():
            p.requires_grad_(False)

        from radregion.ssl.losses import byol_loss

        x = torch.randn(6, 4)
        with torch.no_grad():
            t = target(x)
        loss = byol_loss(online(x), t)
        loss.backward()
        assert all(p.grad is not None for p in online.parameters())
        assert all(p.grad is None for p in target.parameters())

    def test_detached_even_when_target_requires_grad(self):
        layer = torch.nn.Linear(4, 4)
        x = torch.randn(5, 4)
        q = torch.randn(5, 4, requires_grad=True)

        from radregion.ssl.losses import byol_loss

        loss = byol_loss(q, layer(x))
        loss.backward()
        assert all(p.grad is None for p in layer.parameters())
