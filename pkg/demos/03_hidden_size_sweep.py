"""Pick a hidden-layer width with a seeded restart sweep.

A single training run is a noisy estimate of how good a topology is:
the loss surface is non-convex and the outcome depends on the random
initial weights.  The sweep trains each candidate width several times
from independent seeds and compares mean misclassification counts, so
the winner is chosen on replicated evidence.  The whole grid is a pure
function of (data, config, seed) and repeats byte-for-byte.
"""

from hdikit.features import build_classification_dataset
from hdikit.network import TrainConfig, sweep

from synthdata import make_table

table = make_table(n_regions=80, seed=0)
dataset = build_classification_dataset(table, 2010)

config = TrainConfig(epochs=150, learning_rate=1.0, seed=0)
result = sweep(dataset, hidden_sizes=(10, 13, 16, 20), runs_per_config=10,
               config=config, jobs=2)

print("hidden  mean err  per-run misclassification counts")
for entry in result.entries:
    runs = " ".join(f"{e:g}" for e in entry.run_errors)
    print(f"{entry.hidden_neurons:>6}  {entry.mean_error:>8.2f}  [{runs}]")

print(f"\nbest width: {result.best.hidden_neurons} "
      f"(mean error {result.best.mean_error:g} over "
      f"{len(result.best.run_errors)} runs)")
if result.ties:
    print(f"tied widths broken toward fewer neurons: {result.ties}")

again = sweep(dataset, hidden_sizes=(10, 13, 16, 20), runs_per_config=10,
              config=config, jobs=1)
print(f"re-run with different parallelism is byte-identical: "
      f"{again.runs_csv() == result.runs_csv()}")
