"""Road-type classification on 20-dim acoustic feature vectors.

Pipeline: intra-class-variance pruning (20 -> 7), z-score
normalization, a small MLP with layers [7, 4, 3, 2, 4], and the
estimate hook that maps a recognized road back onto its friction
curve for the traction controllers.
"""

from dataclasses import dataclass

import numpy as np

from .arte_dsp import extract_raw, frame_length, Frame
from .errors import (
    ConfigError,
    InsufficientAudioError,
    ModelFormatError,
    TrainingDiverged,
)
from .tire_road import RoadType, peak_friction

ROAD_ORDER = tuple(RoadType)
RAW_DIM = 20
# feature families inside a raw vector: [start, stop, kept]
FAMILIES = ((0, 10, 3), (10, 15, 2), (15, 20, 2))
HIDDEN_SIZES = (4, 3, 2)
LOSS_TARGET = 1e-3
VAR_FLOOR = 1e-9


@dataclass
class FeatureDataset:
    features: np.ndarray
    labels: list
    norm_mean: np.ndarray = None
    norm_scale: np.ndarray = None

    def validate(self):
        x = np.asarray(self.features, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] != len(self.labels):
            raise ConfigError("feature matrix does not match label count")
        if not np.all(np.isfinite(x)):
            raise ConfigError("dataset contains non-finite features")
        if len(set(self.labels)) < 2:
            raise ConfigError("dataset needs at least two classes")
        return self

    def fit_normalization(self):
        x = self.features
        self.norm_mean = x.mean(axis=0)
        std = x.std(axis=0)
        # constant columns pass through unscaled
        self.norm_scale = np.where(std > 0.0, std, 1.0)
        return self

    def normalized(self):
        if self.norm_mean is None:
            raise ConfigError("normalization not fitted")
        return (self.features - self.norm_mean) / self.norm_scale

    def class_rows(self, road):
        idx = [i for i, lab in enumerate(self.labels) if lab is road]
        return self.features[idx]

    def select(self, mask):
        sub = FeatureDataset(self.features[:, mask.indices], list(self.labels))
        if self.norm_mean is not None:
            sub.norm_mean = self.norm_mean[mask.indices]
            sub.norm_scale = self.norm_scale[mask.indices]
        return sub


def split_dataset(ds, test_fraction=0.3, seed=0):
    """Stratified split; normalization fitted on the train side only."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for road in ROAD_ORDER:
        idx = np.array([i for i, lab in enumerate(ds.labels) if lab is road])
        if len(idx) == 0:
            continue
        rng.shuffle(idx)
        cut = int(round(test_fraction * len(idx)))
        test_idx.extend(idx[:cut])
        train_idx.extend(idx[cut:])
    train_idx.sort()
    test_idx.sort()

    def take(which):
        return FeatureDataset(ds.features[which],
                              [ds.labels[i] for i in which])

    train = take(train_idx).fit_normalization()
    test = take(test_idx)
    test.norm_mean = train.norm_mean
    test.norm_scale = train.norm_scale
    return train, test


@dataclass
class SelectionMask:
    indices: np.ndarray
    lpc_kept: int = 3
    band_kept: int = 2
    cep_kept: int = 2


def prune_features(ds):
    """Keep the 3+2+2 lowest mean-intra-class-variance features.

    Ranking runs inside each family separately on normalized features;
    ties resolve to the lower feature index.
    """
    if ds.features.shape[1] != RAW_DIM:
        raise ConfigError("pruning expects %d-dim rows" % RAW_DIM)
    norm = ds.normalized()
    classes = [r for r in ROAD_ORDER if any(lab is r for lab in ds.labels)]
    scores = np.zeros(RAW_DIM)
    for road in classes:
        idx = [i for i, lab in enumerate(ds.labels) if lab is road]
        if len(idx) < 2:
            raise ConfigError("need at least 2 samples per class to prune")
        scores += norm[idx].var(axis=0, ddof=1)
    scores /= len(classes)
    kept = []
    for start, stop, k in FAMILIES:
        order = np.argsort(scores[start:stop], kind="stable")
        kept.extend(sorted(start + order[:k]))
    return SelectionMask(indices=np.array(kept, dtype=int))


def _gauss_kl(xa, xb):
    mean_a, mean_b = xa.mean(axis=0), xb.mean(axis=0)
    var_a = np.maximum(xa.var(axis=0, ddof=1), VAR_FLOOR)
    var_b = np.maximum(xb.var(axis=0, ddof=1), VAR_FLOOR)
    d2 = (mean_a - mean_b) ** 2
    forward = 0.5 * np.sum(np.log(var_b / var_a) + (var_a + d2) / var_b - 1.0)
    backward = 0.5 * np.sum(np.log(var_a / var_b) + (var_b + d2) / var_a - 1.0)
    return float(forward + backward)


def kl_distance(ds, a, b):
    """Symmetric KL between diagonal-Gaussian fits of two classes."""
    xa = ds.class_rows(a)
    xb = ds.class_rows(b)
    if len(xa) < 2 or len(xb) < 2:
        raise ConfigError("both classes need at least 2 samples")
    return _gauss_kl(xa, xb)


def bootstrap_intra(ds, road, trials=5, seed=0):
    """Same-class KL noise floor from repeated half-splits.

    Each trial permutes the class rows, fits diagonal Gaussians to the
    two halves and reports their symmetric KL. The max over trials is a
    conservative floor against which inter-class distances are judged.
    """
    rows = ds.class_rows(road)
    if len(rows) < 4:
        raise ConfigError("need at least 4 samples to half-split a class")
    rng = np.random.default_rng(seed)
    half = len(rows) // 2
    out = np.empty(trials)
    for t in range(trials):
        perm = rng.permutation(len(rows))
        out[t] = _gauss_kl(rows[perm[:half]], rows[perm[half:]])
    return out


@dataclass
class MlpModel:
    sizes: tuple
    weights: list
    biases: list
    seed: int
    norm_mean: np.ndarray = None
    norm_scale: np.ndarray = None
    mask_indices: np.ndarray = None

    def validate(self):
        if tuple(self.sizes[1:-1]) != HIDDEN_SIZES:
            raise ModelFormatError("hidden layer sizes must be %r"
                                   % (HIDDEN_SIZES,))
        if self.sizes[-1] != len(ROAD_ORDER):
            raise ModelFormatError("output layer must have %d units"
                                   % len(ROAD_ORDER))
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.sizes[i + 1], self.sizes[i]):
                raise ModelFormatError("weight %d has shape %r, expected %r"
                                       % (i, w.shape,
                                          (self.sizes[i + 1], self.sizes[i])))
            if b.shape != (self.sizes[i + 1],):
                raise ModelFormatError("bias %d has wrong length" % i)
        return self


def _logistic(z):
    return 1.0 / (1.0 + np.exp(-z))


def _forward(model, x):
    a = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w.T + b
        a = _logistic(z) if i == last else np.tanh(z)
    return a


def _init_model(n_in, seed):
    rng = np.random.default_rng(seed)
    sizes = (n_in,) + HIDDEN_SIZES + (len(ROAD_ORDER),)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        scale = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-scale, scale, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(sizes=sizes, weights=weights, biases=biases, seed=seed)


def one_hot(labels):
    out = np.zeros((len(labels), len(ROAD_ORDER)))
    for i, lab in enumerate(labels):
        out[i, ROAD_ORDER.index(lab)] = 1.0
    return out


def train_mlp(ds, mask, seed=0, max_epochs=5000, learning_rate=1.0):
    """Full-batch MSE backprop; stops when the loss drops below 1e-3.

    mask=None trains on all 20 raw features instead of the pruned 7.
    """
    if ds.norm_mean is None:
        ds.fit_normalization()
    xall = ds.normalized()
    if mask is not None:
        xall = xall[:, mask.indices]
    y = one_hot(ds.labels)
    model = _init_model(xall.shape[1], seed)
    if mask is not None:
        model.norm_mean = ds.norm_mean[mask.indices]
        model.norm_scale = ds.norm_scale[mask.indices]
        model.mask_indices = np.array(mask.indices, dtype=int)
    else:
        model.norm_mean = ds.norm_mean.copy()
        model.norm_scale = ds.norm_scale.copy()
        model.mask_indices = np.arange(xall.shape[1])

    n = xall.shape[0]
    last = len(model.weights) - 1
    for epoch in range(max_epochs):
        acts = [xall]
        a = xall
        for i, (w, b) in enumerate(zip(model.weights, model.biases)):
            z = a @ w.T + b
            a = _logistic(z) if i == last else np.tanh(z)
            acts.append(a)
        loss = float(np.mean((a - y) ** 2))
        if not np.isfinite(loss):
            raise TrainingDiverged("loss became non-finite at epoch %d"
                                   % epoch, epoch=epoch)
        if loss < LOSS_TARGET:
            break
        delta = 2.0 * (a - y) / (n * y.shape[1]) * a * (1.0 - a)
        for i in range(last, -1, -1):
            grad_w = delta.T @ acts[i]
            grad_b = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ model.weights[i]) * (1.0 - acts[i] ** 2)
            model.weights[i] -= learning_rate * grad_w
            model.biases[i] -= learning_rate * grad_b
    return model


def classify(model, features):
    """(road, confidence); confidence from outputs normalized to sum 1."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (model.sizes[0],):
        raise ConfigError("expected %d features, got %r"
                          % (model.sizes[0], x.shape))
    z = (x - model.norm_mean) / model.norm_scale
    out = _forward(model, z[None, :])[0]
    probs = out / out.sum()
    k = int(np.argmax(probs))
    return ROAD_ORDER[k], float(probs[k])


def confusion_matrix(model, test):
    """Counts with rows = predicted, columns = actual, plus accuracy."""
    if len(test.labels) == 0:
        raise ConfigError("empty test set")
    counts = np.zeros((len(ROAD_ORDER), len(ROAD_ORDER)), dtype=int)
    for x, lab in zip(test.features, test.labels):
        pred, _ = classify(model, x)
        counts[ROAD_ORDER.index(pred), ROAD_ORDER.index(lab)] += 1
    accuracy = np.trace(counts) / counts.sum()
    return counts, float(accuracy)


def arte_estimate(model, mask, clip_window):
    """Window -> (road, lambda_opt, mu_peak) for the controllers."""
    length = frame_length(clip_window.sample_rate)
    if len(clip_window.samples) < length:
        raise InsufficientAudioError("window shorter than one 0.1 s frame")
    frame = Frame(samples=np.asarray(clip_window.samples[:length]),
                  origin_offset=0)
    raw = extract_raw(frame)
    road, _ = classify(model, raw[mask.indices])
    lam, mu = peak_friction(road)
    return road, lam, mu


def save_model(path, model):
    lines = [" ".join(str(int(s)) for s in model.sizes) + " %d" % model.seed]

    def fmt(vec):
        return " ".join("%.9g" % v for v in vec)

    lines.append(fmt(model.norm_mean))
    lines.append(fmt(model.norm_scale))
    # raw-feature positions this model consumes, so the file stands alone
    mask = (np.arange(model.sizes[0]) if model.mask_indices is None
            else model.mask_indices)
    lines.append(" ".join(str(int(i)) for i in mask))
    for w, b in zip(model.weights, model.biases):
        for row in w:
            lines.append(fmt(row))
        lines.append(fmt(b))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ModelFormatError("empty model file")
    head = lines[0].split()
    if len(head) != 6:
        raise ModelFormatError("header must hold 5 layer sizes and a seed")
    try:
        nums = [int(t) for t in head]
    except ValueError as exc:
        raise ModelFormatError("non-integer header field") from exc
    sizes, seed = tuple(nums[:5]), nums[5]

    pos = 1

    def take_vector(n):
        nonlocal pos
        if pos >= len(lines):
            raise ModelFormatError("model file truncated")
        parts = lines[pos].split()
        if len(parts) != n:
            raise ModelFormatError("expected %d values on line %d, got %d"
                                   % (n, pos + 1, len(parts)))
        pos += 1
        try:
            return np.array([float(t) for t in parts])
        except ValueError as exc:
            raise ModelFormatError("non-numeric value on line %d"
                                   % pos) from exc

    mean = take_vector(sizes[0])
    scale = take_vector(sizes[0])
    mask = take_vector(sizes[0])
    if np.any(mask != np.round(mask)) or np.any(mask < 0):
        raise ModelFormatError("mask line must hold non-negative integers")
    if np.any(np.diff(mask) <= 0):
        raise ModelFormatError("mask indices must strictly increase")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        weights.append(np.vstack([take_vector(fan_in)
                                  for _ in range(fan_out)]))
        biases.append(take_vector(fan_out))
    if pos != len(lines):
        raise ModelFormatError("trailing data after model values")
    model = MlpModel(sizes=sizes, weights=weights, biases=biases, seed=seed,
                     norm_mean=mean, norm_scale=scale,
                     mask_indices=mask.astype(int))
    return model.validate()
