"""Refine a noisy per-pixel feature map with region masks and text proposals.

A toy image has two objects whose dense features are noisy. Region masks
carry clean embeddings; text proposals are filtered by the confidence
threshold and flooded over the same masks. Averaging the defined
contributors at each pixel cuts the noise by up to 3x.
"""

import numpy as np

from mvov3d import (
    DenseFeatureMap,
    RegionMask,
    TextProposalSet,
    compose_region_maps,
    flood_text_features,
    merge_pixel_features,
    select_text,
)

H, W, C = 32, 32, 4
rng = np.random.default_rng(1)

chair, lamp = np.eye(C)[0], np.eye(C)[1]

# Ground-truth layout: chair on the left, lamp on the right.
truth = np.tile(np.eye(C)[3], (H, W, 1))
truth[:, : W // 2] = chair
truth[:, W // 2 :] = lamp
noisy = DenseFeatureMap.full(truth + 0.5 * rng.standard_normal((H, W, C)))

left = np.zeros((H, W), dtype=bool)
left[:, : W // 2] = True
regions = [RegionMask(left, chair), RegionMask(~left, lamp)]
region_map = compose_region_maps(regions)

# Text proposals per region; the distractor never clears the threshold.
proposal_sets = [
    TextProposalSet(["chair", "cloud"], np.stack([chair, np.eye(C)[2]])),
    TextProposalSet(["lamp", "cloud"], np.stack([lamp, np.eye(C)[2]])),
]
floods = []
for region, proposals in zip(regions, proposal_sets):
    selection = select_text(region.embedding, proposals, delta=0.24)
    print(f"selected text: {selection.text!r} (score {selection.score:.2f})")
    floods.append(flood_text_features(selection, region))

text_map = floods[0]
for extra in floods[1:]:
    d = extra.defined
    text_map.features[d] = extra.features[d]
    text_map.count[d] = extra.count[d]

improved = merge_pixel_features(noisy, region_map, text_map)

err_before = np.linalg.norm(noisy.features - truth, axis=2).mean()
err_after = np.linalg.norm(improved.features - truth, axis=2).mean()
print(f"mean feature error: {err_before:.3f} before, {err_after:.3f} after refinement")
