"""Train the HDI-category classifier on one year of indicators.

Pipeline: slice 2010, min-max scale the five predictors (GDP, NPP,
NIU, NL, NP), hold out a stratified 20% of regions, then fit the
(5 : hidden : 4) softmax network with full-batch gradient descent and
score the holdout with a confusion matrix.
"""

import numpy as np

from hdikit.evaluation import confusion, metrics, render_text
from hdikit.features import SplitSpec, build_classification_dataset, split
from hdikit.network import TrainConfig, init_network, predict, train

from synthdata import make_table

SEED = 0

table = make_table(n_regions=80, seed=0)
dataset = build_classification_dataset(table, 2010)
print(f"dataset: {dataset.features.shape[0]} regions, "
      f"{dataset.features.shape[1]} predictors")
counts = np.bincount(dataset.labels, minlength=4)
print(f"category counts (Low..VeryHigh): {counts.tolist()}")

train_set, test_set = split(dataset, SplitSpec(test_fraction=0.2,
                                               seed=SEED, stratified=True))
print(f"split: {len(train_set.labels)} train / {len(test_set.labels)} test")

model = init_network((5, 13, 4), seed=SEED)
config = TrainConfig(epochs=400, learning_rate=1.0, seed=SEED)
model, trace = train(model, (train_set.features, train_set.labels), config)

print("\nmean cross-entropy along training:")
for epoch in (0, 49, 99, 199, 399):
    print(f"  epoch {epoch + 1:>3}: {trace[epoch]:.4f}")

predicted = predict(model, test_set.features)
cm = confusion(test_set.labels, predicted)
print("\nholdout confusion matrix:")
print(render_text(cm))
print(f"holdout accuracy: {metrics(cm)['accuracy']:.2f}")
