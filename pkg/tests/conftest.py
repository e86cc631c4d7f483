"""Shared fixtures: flow networks trained on the mixture benchmark.

Training runs once per session (a couple of minutes each) and is shared by
the density-estimation tests and the acceptance suite.
"""

import numpy as np
import pytest

from flame import numkit as nk
from flame.envs import Gmm2d
from flame.flowcore import cfm_loss, meanflow_loss
from flame.netlib import INSTANTANEOUS, MEANFLOW, Adam, VectorFieldNet

GMM_TRAIN_ITERS = 10_000
GMM_BATCH = 256


def train_gmm_flow(mode: str, seed: int, iters: int = GMM_TRAIN_ITERS):
    """Density-benchmark protocol: 3x256 Mish net, straight-path losses."""
    gmm = Gmm2d()
    root = nk.Rng(seed)
    net = VectorFieldNet(2, 1, mode, root.stream("net"), hidden_layers=3,
                         hidden_width=256, time_embed_dim=64,
                         zero_init_final=True)
    opt = Adam(net.parameters(), lr=3e-4, lr_end=3e-5, anneal_steps=iters)
    data_rng = root.stream("data")
    loss_rng = root.stream("loss")
    loss_fn = meanflow_loss if mode == MEANFLOW else cfm_loss
    losses = []
    for _ in range(iters):
        a1 = gmm.sample(data_rng, GMM_BATCH)
        s = np.zeros((GMM_BATCH, 1))
        loss = loss_fn(net, s, a1, loss_rng)
        opt.zero_grad()
        loss.backward()
        opt.step()
        losses.append(float(loss.data))
    return net, np.array(losses)


@pytest.fixture(scope="session")
def gmm_cfm_trained():
    net, losses = train_gmm_flow(INSTANTANEOUS, seed=2024)
    return {"net": net, "losses": losses, "gmm": Gmm2d()}


@pytest.fixture(scope="session")
def gmm_meanflow_trained():
    net, losses = train_gmm_flow(MEANFLOW, seed=2025)
    return {"net": net, "losses": losses, "gmm": Gmm2d()}
