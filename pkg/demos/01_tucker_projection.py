"""Low multilinear rank: unfoldings, HOSVD and the projector ``P_U``.

A video whose background is static and smooth has small multilinear rank.
This script builds such a tensor, shows the mode-n unfoldings, truncates
it with HOSVD and checks that only the subspaces ``U U^T`` matter.
"""

import numpy as np

from srtc.data import SceneSpec, synth_scene
from srtc.tensor import fold, fro_norm, multi_project, unfold
from srtc.tucker import hosvd_init, projector_distance, reconstruct

_, bg, _ = synth_scene(SceneSpec(dims=(24, 20, 10), background_rank=(3, 2, 1), seed=4))
print("background shape", bg.shape)

for n in (1, 2, 3):
    m = unfold(bg, n)
    sv = np.linalg.svd(m, compute_uv=False)
    print(f"mode-{n} unfolding {m.shape}, leading singular values {np.round(sv[:4], 3)}")
    assert np.array_equal(fold(m, n, bg.shape), bg)

# the declared ranks reproduce the background to rounding error
factors, core = hosvd_init(bg, (3, 2, 1))
print("core shape", core.shape)
print("HOSVD error at ranks (3, 2, 1):", fro_norm(bg - reconstruct(core, factors)))

# lower ranks lose energy
f2, c2 = hosvd_init(bg, (1, 1, 1))
print("HOSVD error at ranks (1, 1, 1):", fro_norm(bg - reconstruct(c2, f2)))

# rotating a factor inside its span leaves the projection unchanged
rng = np.random.default_rng(0)
q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
rotated = (factors[0] @ q, factors[1], factors[2])
print("projector distance after rotation:", projector_distance(rotated[0], factors[0]))
print("projection difference:", fro_norm(multi_project(bg, rotated) - multi_project(bg, factors)))
