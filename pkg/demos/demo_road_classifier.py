"""Train the acoustic road classifier end to end.

Builds the synthetic tire-noise corpus, prunes the 20 raw features down
to 7, fits the small MLP, and prints the held-out confusion matrix next
to the class-separability numbers that justify the feature choice.
"""

import itertools

import numpy as np

from arte_tcs.arte_classifier import (ROAD_ORDER, bootstrap_intra,
                                      confusion_matrix, kl_distance,
                                      prune_features, split_dataset,
                                      train_mlp)
from arte_tcs.synth_corpus import build_corpus
from arte_tcs.tire_road import RoadType

ds = build_corpus(seed=1)
train, test = split_dataset(ds, 0.3, seed=4)
mask = prune_features(train)
print("kept feature columns: %s" % mask.indices.tolist())
print("partition: %d lpc, %d band, %d cepstrum" % (
    mask.lpc_kept, mask.band_kept, mask.cep_kept))

model = train_mlp(train, mask, seed=0)
counts, acc = confusion_matrix(model, test.select(mask))
print()
print("held-out confusion (rows = predicted, columns = actual):")
print("           " + "".join("%8s" % r.value for r in ROAD_ORDER))
for k, road in enumerate(ROAD_ORDER):
    print("%-10s" % road.value + "".join("%8d" % c for c in counts[k]))
print("accuracy: %.4f" % acc)

sub = ds.select(mask)
inter = min(kl_distance(sub, a, b)
            for a, b in itertools.combinations(list(RoadType), 2))
intra = max(np.max(bootstrap_intra(sub, road)) for road in RoadType)
print()
print("class separation: smallest between-class KL %.1f vs largest" % inter)
print("within-class bootstrap KL %.2f (ratio %.1f)" % (intra, inter / intra))
