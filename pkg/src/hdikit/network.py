"""Feedforward classifier trained with backpropagation.

The production topology is 5 inputs -> one hidden layer -> 4 softmax
outputs, one output per HDI band, but the code is generic over any
layer list.  Training is plain gradient descent on the mean
cross-entropy, full-batch by default; with shuffling off it is fully
deterministic for a given seed.

Model selection runs as a sweep: for each candidate hidden-layer size,
several independent seeded trainings are scored on a validation split
and the configuration with the lowest mean error wins.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadTopologyError,
    CorruptModelFileError,
    DimensionMismatchError,
    DivergedLossError,
    NonFiniteInputError,
)
from .features import (
    ColumnScaling,
    LabeledDataset,
    N_CATEGORIES,
    SplitSpec,
    split,
)

HIDDEN_ACTIVATIONS = ("logistic-sigmoid", "tanh")
ERROR_METRICS = ("misclassification-count", "sse", "cross-entropy")

MODEL_MAGIC = "hdikit-model"
MODEL_VERSION = 1


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign to avoid overflow in exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activate(z: np.ndarray, tag: str) -> np.ndarray:
    if tag == "logistic-sigmoid":
        return _sigmoid(z)
    if tag == "tanh":
        return np.tanh(z)
    raise ValueError(f"unknown activation {tag!r}")


def _activation_grad(a: np.ndarray, tag: str) -> np.ndarray:
    """Derivative expressed through the activation output."""
    if tag == "logistic-sigmoid":
        return a * (1.0 - a)
    if tag == "tanh":
        return 1.0 - a * a
    raise ValueError(f"unknown activation {tag!r}")


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=1, keepdims=True)


def _log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


@dataclass
class NetworkModel:
    """Weights, biases, and activation tags of a feedforward net.

    weights[i] has shape (layer_sizes[i+1], layer_sizes[i]); biases[i]
    matches the destination layer.  Immutable by convention during
    inference; training works on a private copy.
    """

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "logistic-sigmoid"
    output_activation: str = "softmax"
    seed: int = 0
    feature_scaling: tuple[ColumnScaling, ...] | None = None

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "NetworkModel":
        return NetworkModel(
            layer_sizes=self.layer_sizes,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            hidden_activation=self.hidden_activation,
            output_activation=self.output_activation,
            seed=self.seed,
            feature_scaling=self.feature_scaling,
        )


def init_network(layer_sizes, hidden_activation: str = "logistic-sigmoid",
                 seed: int = 0) -> NetworkModel:
    """Seeded initialization: uniform +-sqrt(6/(fan_in+fan_out)), zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 3:
        raise BadTopologyError(
            f"need at least input, hidden, and output layers, got {sizes}")
    if any(s < 1 for s in sizes):
        raise BadTopologyError(f"every layer needs at least one unit: {sizes}")
    if hidden_activation not in HIDDEN_ACTIVATIONS:
        raise ValueError(f"unknown hidden activation {hidden_activation!r}; "
                         f"expected one of {HIDDEN_ACTIVATIONS}")

    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkModel(layer_sizes=sizes, weights=weights, biases=biases,
                        hidden_activation=hidden_activation, seed=int(seed))


def _check_features(model: NetworkModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionMismatchError(
            f"expected {model.n_inputs} features per row, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInputError("input contains NaN or infinity")
    return X


def _forward_activations(model: NetworkModel, X: np.ndarray) -> list[np.ndarray]:
    """All layer activations, input included; last entry is softmax output."""
    acts = [X]
    a = X
    last = len(model.weights) - 1
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ W.T + b
        a = _softmax(z) if i == last else _activate(z, model.hidden_activation)
        acts.append(a)
    return acts


def forward_batch(model: NetworkModel, X) -> np.ndarray:
    """Class-probability rows for a feature matrix."""
    X = _check_features(model, X)
    return _forward_activations(model, X)[-1]


def forward(model: NetworkModel, x) -> np.ndarray:
    """Probability vector for a single input; sums to 1 within 1e-9."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"expected a single vector, got {x.shape}")
    return forward_batch(model, x.reshape(1, -1))[0]


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise DimensionMismatchError(
            f"labels must lie in [0, {n_classes}), got range "
            f"[{labels.min()}, {labels.max()}]")
    out = np.zeros((labels.shape[0], n_classes))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


@dataclass(frozen=True)
class TrainConfig:
    """Gradient-descent settings; defaults are full-batch and deterministic.

    learning_rate 0 is allowed (a no-op run used to validate plumbing).
    """

    epochs: int = 500
    learning_rate: float = 0.5
    batch_mode: str = "full-batch"
    batch_size: int | None = None
    seed: int = 0
    shuffle: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (self.learning_rate >= 0.0 and math.isfinite(self.learning_rate)):
            raise ValueError("learning_rate must be finite and >= 0")
        if self.batch_mode not in ("full-batch", "minibatch"):
            raise ValueError(f"unknown batch_mode {self.batch_mode!r}")
        if self.batch_mode == "minibatch" and not self.batch_size:
            raise ValueError("minibatch mode needs a batch_size")


def _training_arrays(train_set) -> tuple[np.ndarray, np.ndarray, tuple | None]:
    if isinstance(train_set, LabeledDataset):
        return (np.asarray(train_set.features, dtype=float),
                np.asarray(train_set.labels, dtype=int),
                train_set.scaling)
    X, y = train_set
    return np.asarray(X, dtype=float), np.asarray(y, dtype=int), None


def _mean_cross_entropy(log_probs: np.ndarray, labels: np.ndarray) -> float:
    return float(-log_probs[np.arange(labels.shape[0]), labels].mean())


def train(model: NetworkModel, train_set,
          config: TrainConfig) -> tuple[NetworkModel, list[float]]:
    """Gradient-descent training; returns (new model, per-epoch loss trace).

    ``train_set`` is a LabeledDataset or an (X, labels) pair; labels are
    integer class codes one-hot encoded against the output layer.  The
    input model is never mutated.  The per-epoch loss is the mean
    cross-entropy over the samples as seen that epoch (pre-update); a
    non-finite loss aborts with DivergedLossError carrying the epoch.
    """
    X, labels, scaling = _training_arrays(train_set)
    X = _check_features(model, X)
    if labels.shape[0] != X.shape[0]:
        raise DimensionMismatchError(
            f"{X.shape[0]} feature rows vs {labels.shape[0]} labels")
    Y = one_hot(labels, model.n_outputs)

    net = model.copy()
    if scaling is not None:
        net.feature_scaling = scaling
    rng = np.random.default_rng(config.seed)
    n = X.shape[0]
    batch = n if config.batch_mode == "full-batch" else int(config.batch_size)

    trace: list[float] = []
    # overflow en route to divergence is detected below, not warned about
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(config.epochs):
            order = rng.permutation(n) if config.shuffle else np.arange(n)
            loss_sum = 0.0
            for start in range(0, n, batch):
                idx = order[start:start + batch]
                loss_sum += _train_step(net, X[idx], Y[idx],
                                        labels[idx], config.learning_rate)
            epoch_loss = loss_sum / n
            if not math.isfinite(epoch_loss):
                raise DivergedLossError(
                    f"training loss became non-finite at epoch {epoch}",
                    epoch=epoch)
            trace.append(epoch_loss)
    return net, trace


def _train_step(net: NetworkModel, Xb: np.ndarray, Yb: np.ndarray,
                labels_b: np.ndarray, lr: float) -> float:
    """One gradient step on a batch; returns summed cross-entropy."""
    acts = _forward_activations(net, Xb)
    probs = acts[-1]
    log_probs = _log_probs(acts, net)
    batch_loss = float(-log_probs[np.arange(labels_b.shape[0]), labels_b].sum())

    m = Xb.shape[0]
    delta = (probs - Yb) / m  # softmax + cross-entropy
    grads_w = []
    grads_b = []
    for layer in range(len(net.weights) - 1, -1, -1):
        a_prev = acts[layer]
        grads_w.append(delta.T @ a_prev)
        grads_b.append(delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ net.weights[layer]) * _activation_grad(
                acts[layer], net.hidden_activation)
    grads_w.reverse()
    grads_b.reverse()

    for W, b, gW, gb in zip(net.weights, net.biases, grads_w, grads_b):
        W -= lr * gW
        b -= lr * gb
    return batch_loss


def _log_probs(acts: list[np.ndarray], net: NetworkModel) -> np.ndarray:
    """Numerically stable log-probabilities from the penultimate activation."""
    z = acts[-2] @ net.weights[-1].T + net.biases[-1]
    return _log_softmax(z)


def loss_on(model: NetworkModel, X, labels) -> float:
    """Mean cross-entropy of a model on a labeled set."""
    X = _check_features(model, X)
    labels = np.asarray(labels, dtype=int)
    acts = _forward_activations(model, X)
    a_prev = acts[-2]
    z = a_prev @ model.weights[-1].T + model.biases[-1]
    return _mean_cross_entropy(_log_softmax(z), labels)


def predict(model: NetworkModel, features) -> np.ndarray:
    """Class code per row: argmax probability, ties to the lower class."""
    probs = forward_batch(model, features)
    return np.argmax(probs, axis=1)


def evaluation_error(model: NetworkModel, X, labels, metric: str) -> float:
    """Score a model on held-out rows with the chosen error metric.

    misclassification-count: number of wrong predictions (a count, not a
    rate); sse: summed squared difference between probabilities and the
    one-hot target; cross-entropy: mean negative log-likelihood.
    """
    if metric not in ERROR_METRICS:
        raise ValueError(f"unknown error metric {metric!r}; "
                         f"expected one of {ERROR_METRICS}")
    labels = np.asarray(labels, dtype=int)
    if metric == "misclassification-count":
        return float(np.sum(predict(model, X) != labels))
    if metric == "sse":
        probs = forward_batch(model, X)
        return float(np.sum((probs - one_hot(labels, model.n_outputs)) ** 2))
    return loss_on(model, X, labels)


@dataclass
class SweepEntry:
    hidden_neurons: int
    run_errors: list[float]
    mean_error: float
    diverged_runs: list[int] = field(default_factory=list)


@dataclass
class SweepResult:
    """Outcome of the hidden-size model-selection sweep.

    ``best`` holds the entry with the lowest mean error (ties resolved
    toward the smaller hidden size, other tied entries listed in
    ``ties``); ``best_model`` is the trained model of the best entry's
    lowest-error run.
    """

    entries: list[SweepEntry]
    best: SweepEntry
    ties: list[SweepEntry]
    error_metric: str
    runs_per_config: int
    best_model: NetworkModel

    def runs_csv(self) -> str:
        lines = ["hidden_neurons,run_index,error"]
        for entry in self.entries:
            for run_index, err in enumerate(entry.run_errors):
                lines.append(f"{entry.hidden_neurons},{run_index},{_fmt(err)}")
        return "\n".join(lines) + "\n"

    def summary_json(self) -> str:
        doc = {
            "error_metric": self.error_metric,
            "runs_per_config": self.runs_per_config,
            "entries": [
                {"hidden_neurons": e.hidden_neurons,
                 "run_errors": [_json_float(v) for v in e.run_errors],
                 "mean_error": _json_float(e.mean_error),
                 "diverged_runs": e.diverged_runs}
                for e in self.entries
            ],
            "best": {"hidden_neurons": self.best.hidden_neurons,
                     "mean_error": _json_float(self.best.mean_error)},
            "ties": [e.hidden_neurons for e in self.ties],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fmt(value: float) -> str:
    return repr(float(value))


def _json_float(value: float):
    # keep the summary standard JSON: infinities become strings
    return float(value) if math.isfinite(value) else "inf"


def _run_one(dataset_train, val_X, val_y, hidden: int, run_index: int,
             config: TrainConfig, metric: str,
             hidden_activation: str) -> tuple[float, bool, NetworkModel | None]:
    n_features = dataset_train.features.shape[1]
    run_seed = config.seed + run_index
    model = init_network((n_features, hidden, N_CATEGORIES),
                         hidden_activation=hidden_activation, seed=run_seed)
    run_config = TrainConfig(
        epochs=config.epochs, learning_rate=config.learning_rate,
        batch_mode=config.batch_mode, batch_size=config.batch_size,
        seed=run_seed, shuffle=config.shuffle)
    try:
        trained, _ = train(model, dataset_train, run_config)
    except DivergedLossError:
        return math.inf, True, None
    return evaluation_error(trained, val_X, val_y, metric), False, trained


def sweep(dataset: LabeledDataset | None = None,
          hidden_sizes=(10, 13, 16, 20),
          runs_per_config: int = 10,
          config: TrainConfig = TrainConfig(),
          error_metric: str = "misclassification-count",
          split_spec: SplitSpec | None = None,
          pre_split: tuple[LabeledDataset, LabeledDataset] | None = None,
          hidden_activation: str = "logistic-sigmoid",
          jobs: int = 1) -> SweepResult:
    """Train runs_per_config seeded restarts per hidden size; pick the best.

    Run seeds derive as config.seed + run_index.  Either pass
    ``pre_split`` (train, validation) or let the sweep split ``dataset``
    internally.  A diverged run records +inf as its error and is flagged
    in the entry, never dropped.  Runs are independent and may execute
    in parallel (``jobs``); results are always aggregated in
    (hidden_size, run_index) order, so parallelism never changes output.
    """
    hidden_sizes = [int(h) for h in hidden_sizes]
    if not hidden_sizes:
        raise ValueError("hidden_sizes must be non-empty")
    if runs_per_config < 1:
        raise ValueError("runs_per_config must be >= 1")

    if pre_split is not None:
        train_set, val_set = pre_split
    else:
        if dataset is None:
            raise ValueError("need a dataset or a pre_split pair")
        train_set, val_set = split(
            dataset, split_spec or SplitSpec(seed=config.seed))
    val_X = val_set.features
    val_y = val_set.labels

    tasks = [(h, r) for h in hidden_sizes for r in range(runs_per_config)]
    results: dict[tuple[int, int], tuple[float, bool, NetworkModel | None]] = {}
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {
                (h, r): pool.submit(_run_one, train_set, val_X, val_y, h, r,
                                    config, error_metric, hidden_activation)
                for h, r in tasks
            }
            for key, fut in futures.items():
                results[key] = fut.result()
    else:
        for h, r in tasks:
            results[(h, r)] = _run_one(train_set, val_X, val_y, h, r,
                                       config, error_metric, hidden_activation)

    entries = []
    models: dict[int, NetworkModel | None] = {}
    for h in hidden_sizes:
        errors = []
        diverged = []
        best_run = None
        for r in range(runs_per_config):
            err, blew_up, trained = results[(h, r)]
            errors.append(err)
            if blew_up:
                diverged.append(r)
            elif best_run is None or err < errors[best_run]:
                best_run = r
        mean_error = sum(errors) / len(errors)
        entries.append(SweepEntry(hidden_neurons=h, run_errors=errors,
                                  mean_error=mean_error, diverged_runs=diverged))
        models[h] = results[(h, best_run)][2] if best_run is not None else None

    best = min(entries, key=lambda e: (e.mean_error, e.hidden_neurons))
    ties = [e for e in entries if e is not best and e.mean_error == best.mean_error]
    best_model = models[best.hidden_neurons]
    if best_model is None:
        raise DivergedLossError(
            f"every run diverged for hidden size {best.hidden_neurons}")
    return SweepResult(entries=entries, best=best, ties=ties,
                       error_metric=error_metric,
                       runs_per_config=runs_per_config, best_model=best_model)


# --- model persistence ---

def _payload(model: NetworkModel) -> dict:
    return {
        "layer_sizes": list(model.layer_sizes),
        "hidden_activation": model.hidden_activation,
        "output_activation": model.output_activation,
        "seed": model.seed,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "feature_scaling": (None if model.feature_scaling is None else
                            [s.to_dict() for s in model.feature_scaling]),
    }


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(model: NetworkModel, path=None) -> str:
    """Serialize to versioned, checksummed JSON; lossless float encoding."""
    payload = _payload(model)
    doc = {
        "format": MODEL_MAGIC,
        "version": MODEL_VERSION,
        "checksum": _checksum(payload),
        "payload": payload,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def load_model(source) -> NetworkModel:
    """Load a model saved by save_model; validates magic, version, checksum."""
    if isinstance(source, (str, os.PathLike)) and "\n" not in str(source):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModelFileError(f"model file is not valid JSON: {exc}") from None
    if doc.get("format") != MODEL_MAGIC:
        raise CorruptModelFileError(
            f"bad magic: expected {MODEL_MAGIC!r}, got {doc.get('format')!r}")
    if doc.get("version") != MODEL_VERSION:
        raise CorruptModelFileError(
            f"unsupported model version {doc.get('version')!r}")
    payload = doc.get("payload")
    if not isinstance(payload, dict) or doc.get("checksum") != _checksum(payload):
        raise CorruptModelFileError("checksum mismatch: file is corrupt")

    scaling = payload["feature_scaling"]
    return NetworkModel(
        layer_sizes=tuple(payload["layer_sizes"]),
        weights=[np.asarray(w, dtype=float) for w in payload["weights"]],
        biases=[np.asarray(b, dtype=float) for b in payload["biases"]],
        hidden_activation=payload["hidden_activation"],
        output_activation=payload["output_activation"],
        seed=int(payload["seed"]),
        feature_scaling=(None if scaling is None else
                         tuple(ColumnScaling.from_dict(d) for d in scaling)),
    )
