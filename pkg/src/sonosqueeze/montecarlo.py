"""Flash-by-flash photon counting at two back-to-back detectors.

Each flash emits either a two-mode squeezed pair (``n_a == n_b`` before
detection) or two independent thermal modes.  Detector inefficiency is
binomial thinning.  The discriminant is the sample variance of
``n_a - n_b``: zero for ideal squeezed pairs, ``nbar_a(nbar_a+1) +
nbar_b(nbar_b+1)`` for thermal light.

Moments are accumulated as exact integer sums per batch, so a run is
bitwise reproducible for a fixed seed whatever the chunking or thread
count.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from ._numerics import log_coth
from .errors import DegenerateInputError, DomainError
from .states import SQUEEZED, THERMAL, check_nonneg, check_zeta

CHUNK_SIZE = 1 << 16
N_BATCHES = 100
Z_THRESHOLD = 3.0
MIN_FLASHES = 10_000
INCONCLUSIVE = "inconclusive"
EVENT_HEADER = ("flash", "n_a", "n_b")


@dataclass(frozen=True)
class SourceConfig:
    kind: str
    zeta: float = None
    nbar_a: float = None
    nbar_b: float = None

    def __post_init__(self):
        if self.kind == SQUEEZED:
            if self.zeta is None or self.nbar_a is not None or self.nbar_b is not None:
                raise DomainError("squeezed source takes zeta only")
            check_zeta(self.zeta)
        elif self.kind == THERMAL:
            if self.zeta is not None or self.nbar_a is None or self.nbar_b is None:
                raise DomainError("thermal source takes nbar_a and nbar_b only")
            check_nonneg(self.nbar_a, "nbar_a")
            check_nonneg(self.nbar_b, "nbar_b")
        else:
            raise DomainError(f"unknown source kind {self.kind!r}")

    @classmethod
    def squeezed(cls, zeta):
        return cls(SQUEEZED, zeta=zeta)

    @classmethod
    def thermal(cls, nbar_a, nbar_b):
        return cls(THERMAL, nbar_a=nbar_a, nbar_b=nbar_b)

    def log_ratios(self):
        """ln of the geometric ratio of each mode's photon-number law."""
        if self.kind == SQUEEZED:
            lr = -math.inf if self.zeta == 0 else -2.0 * float(log_coth(self.zeta))
            return lr, lr
        return _thermal_log_ratio(self.nbar_a), _thermal_log_ratio(self.nbar_b)


def _thermal_log_ratio(nbar):
    return -math.inf if nbar == 0 else -math.log1p(1.0 / nbar)


@dataclass(frozen=True)
class DetectorConfig:
    eta_a: float = 1.0
    eta_b: float = 1.0

    def __post_init__(self):
        for name in ("eta_a", "eta_b"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class PairSample:
    n_a: int
    n_b: int


class CounterStream:
    """Addressable uniform stream keyed by ``(seed, substream)``.

    Draws are hashes of a running counter, the same construction the
    ensemble kernels use, so a stream can be replayed exactly.
    """

    def __init__(self, seed, substream=0):
        self.seed = int(seed)
        self.substream = int(substream)
        self.key_a, self.key_b = chunk_keys(self.seed, self.substream)
        self.position = 0

    def uniforms(self, size):
        counters = np.arange(self.position, self.position + size, dtype=np.uint64)
        self.position += size
        return _kernels.uniforms_np(self.key_a, self.key_b, counters)

    def uniform(self):
        return float(self.uniforms(1)[0])


def chunk_keys(seed, chunk):
    if seed < 0 or seed >= 1 << 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    ss = np.random.SeedSequence(seed, spawn_key=(chunk,))
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def sample_squeezed_pairs(zeta, stream, size):
    lr, _ = SourceConfig.squeezed(zeta).log_ratios()
    n = _kernels.geometric_np(stream.uniforms(size), lr)
    return n, n.copy()


def sample_thermal_pairs(nbar_a, nbar_b, stream, size):
    lra, lrb = SourceConfig.thermal(nbar_a, nbar_b).log_ratios()
    return (
        _kernels.geometric_np(stream.uniforms(size), lra),
        _kernels.geometric_np(stream.uniforms(size), lrb),
    )


def _thin(n, eta, stream):
    n = np.asarray(n, dtype=np.int64)
    if eta >= 1.0:
        return n.copy()
    owner = np.repeat(np.arange(n.size), n)
    kept = owner[stream.uniforms(owner.size) < eta]
    return np.bincount(kept, minlength=n.size).astype(np.int64)


def apply_detector_loss_arrays(n_a, n_b, det, stream):
    return _thin(n_a, det.eta_a, stream), _thin(n_b, det.eta_b, stream)


def sample_squeezed_pair(zeta, stream):
    n_a, n_b = sample_squeezed_pairs(zeta, stream, 1)
    return PairSample(int(n_a[0]), int(n_b[0]))


def sample_thermal_pair(nbar_a, nbar_b, stream):
    n_a, n_b = sample_thermal_pairs(nbar_a, nbar_b, stream, 1)
    return PairSample(int(n_a[0]), int(n_b[0]))


def apply_detector_loss(sample, det, stream):
    n_a, n_b = apply_detector_loss_arrays([sample.n_a], [sample.n_b], det, stream)
    return PairSample(int(n_a[0]), int(n_b[0]))


# ------------------------------------------------------------------ report


@dataclass(frozen=True)
class CorrelationReport:
    flashes: int
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    cov_ab: float
    var_nab: float
    var_nab_stderr: float
    prediction_thermal: float
    prediction_squeezed: float
    prediction_squeezed_ideal: float
    z_thermal: float
    z_squeezed: float
    classification: str
    low_statistics: bool
    n_batches: int

    def as_dict(self):
        return asdict(self)


def _moments(row):
    """Exact (mean_a, mean_b, var_a, var_b, cov) from one row of integer sums."""
    n, sa, sb, saa, sbb, sab = (int(v) for v in row)
    mean_a, mean_b = Fraction(sa, n), Fraction(sb, n)
    if n < 2:
        return mean_a, mean_b, None, None, None
    norm = n * (n - 1)
    var_a = Fraction(n * saa - sa * sa, norm)
    var_b = Fraction(n * sbb - sb * sb, norm)
    cov = Fraction(n * sab - sa * sb, norm)
    return mean_a, mean_b, var_a, var_b, cov


def _z(value, prediction, stderr):
    if stderr > 0:
        return (value - prediction) / stderr
    if value == prediction:
        return 0.0
    return math.copysign(math.inf, value - prediction)


def predicted_squeezed_variance(mean_a, mean_b, det):
    """Var(n_a - n_b) for a thinned squeezed pair, from the detected means.

    By the law of total variance with per-photon loss:
    ``(eta_a - eta_b)^2 s(s+1) + s [eta_a(1-eta_a) + eta_b(1-eta_b)]``
    where ``s = sinh^2 zeta`` is estimated as ``(m_a + m_b)/(eta_a + eta_b)``.
    """
    eta_sum = det.eta_a + det.eta_b
    s = (mean_a + mean_b) / eta_sum if eta_sum > 0 else 0.0
    spread = det.eta_a * (1 - det.eta_a) + det.eta_b * (1 - det.eta_b)
    return (det.eta_a - det.eta_b) ** 2 * s * (s + 1) + s * spread


def classify(report):
    """thermal, squeezed or inconclusive by the 3-sigma rule on both z-scores."""
    if report.var_nab_stderr == 0 and math.isinf(report.z_thermal) and math.isinf(
        report.z_squeezed
    ):
        raise DegenerateInputError(
            "zero standard error and the estimate matches neither prediction"
        )
    sq = abs(report.z_squeezed) < Z_THRESHOLD
    th = abs(report.z_thermal) < Z_THRESHOLD
    if sq and not th:
        return SQUEEZED
    if th and not sq:
        return THERMAL
    return INCONCLUSIVE


def _batch_ids(start, stop, flashes, n_batches):
    idx = np.arange(start, stop, dtype=np.int64)
    return idx * n_batches // flashes


def _n_batches(flashes):
    return max(1, min(N_BATCHES, flashes // 2))


def report_from_sums(sums, det):
    """Build the correlation report from per-batch integer moment sums."""
    total = sums.sum(axis=0)
    flashes = int(total[0])
    if flashes == 0:
        raise DomainError("no flashes to summarise")
    mean_a, mean_b, var_a, var_b, cov = _moments(total)
    if var_a is None:
        raise DomainError("at least two flashes are needed for a variance")
    var_nab = var_a + var_b - 2 * cov

    batch_vals = []
    for row in sums:
        _, _, va, vb, c = _moments(row)
        if va is not None:
            batch_vals.append(float(va + vb - 2 * c))
    if len(batch_vals) >= 2:
        stderr = float(np.std(batch_vals, ddof=1)) / math.sqrt(len(batch_vals))
    else:
        stderr = math.inf

    m_a, m_b = float(mean_a), float(mean_b)
    pred_thermal = m_a * (m_a + 1) + m_b * (m_b + 1)
    pred_squeezed = predicted_squeezed_variance(m_a, m_b, det)
    v = float(var_nab)
    report = CorrelationReport(
        flashes=flashes,
        mean_a=m_a,
        mean_b=m_b,
        var_a=float(var_a),
        var_b=float(var_b),
        cov_ab=float(cov),
        var_nab=v,
        var_nab_stderr=stderr,
        prediction_thermal=pred_thermal,
        prediction_squeezed=pred_squeezed,
        prediction_squeezed_ideal=0.0,
        z_thermal=_z(v, pred_thermal, stderr),
        z_squeezed=_z(v, pred_squeezed, stderr),
        classification=INCONCLUSIVE,
        low_statistics=flashes < MIN_FLASHES,
        n_batches=len(sums),
    )
    return _with_classification(report)


def _with_classification(report):
    fields = report.as_dict()
    fields["classification"] = classify(report)
    return CorrelationReport(**fields)


def summarize_counts(n_a, n_b, det=DetectorConfig(), use_numba=None):
    """Correlation report for an existing sequence of detected pair counts."""
    n_a = np.asarray(n_a, dtype=np.int64)
    n_b = np.asarray(n_b, dtype=np.int64)
    if n_a.shape != n_b.shape or n_a.ndim != 1:
        raise DomainError("n_a and n_b must be 1-d arrays of equal length")
    if np.any(n_a < 0) or np.any(n_b < 0):
        raise DomainError("photon counts must be nonnegative")
    flashes = n_a.size
    if flashes == 0:
        raise DomainError("flashes must be > 0")
    _, _, accumulate = _kernels.get_backend(use_numba)
    n_batches = _n_batches(flashes)
    sums = np.zeros((n_batches, _kernels.N_SUMS), dtype=np.int64)
    accumulate(n_a, n_b, _batch_ids(0, flashes, flashes, n_batches), sums)
    return report_from_sums(sums, det)


def run_ensemble(source, det, flashes, seed, workers=1, use_numba=None, keep_events=False):
    """Simulate ``flashes`` flashes and summarise the back-to-back counts.

    Flash ``i`` belongs to chunk ``i // CHUNK_SIZE``; each chunk draws from a
    key derived from ``(seed, chunk)``.  Returns the report, or
    ``(report, n_a, n_b)`` when ``keep_events`` is set.
    """
    flashes = int(flashes)
    if flashes <= 0:
        raise DomainError("flashes must be > 0")
    _, sample_chunk, accumulate = _kernels.get_backend(use_numba)
    log_ra, log_rb = source.log_ratios()
    squeezed = source.kind == SQUEEZED
    n_batches = _n_batches(flashes)
    n_chunks = -(-flashes // CHUNK_SIZE)

    def run_chunk(chunk):
        start = chunk * CHUNK_SIZE
        stop = min(start + CHUNK_SIZE, flashes)
        key_a, key_b = chunk_keys(seed, chunk)
        n_a, n_b = sample_chunk(
            squeezed, log_ra, log_rb, det.eta_a, det.eta_b, key_a, key_b, stop - start
        )
        sums = np.zeros((n_batches, _kernels.N_SUMS), dtype=np.int64)
        accumulate(n_a, n_b, _batch_ids(start, stop, flashes, n_batches), sums)
        return sums, (n_a, n_b) if keep_events else None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, range(n_chunks)))
    else:
        results = [run_chunk(c) for c in range(n_chunks)]

    sums = np.zeros((n_batches, _kernels.N_SUMS), dtype=np.int64)
    for chunk_sums, _ in results:
        sums += chunk_sums
    report = report_from_sums(sums, det)
    if not keep_events:
        return report
    n_a = np.concatenate([ev[0] for _, ev in results])
    n_b = np.concatenate([ev[1] for _, ev in results])
    return report, n_a, n_b


# ------------------------------------------------------------------ events


def write_events_csv(fh, n_a, n_b):
    fh.write(",".join(EVENT_HEADER) + "\n")
    for i, (a, b) in enumerate(zip(n_a.tolist(), n_b.tolist())):
        fh.write(f"{i},{a},{b}\n")


def read_events_csv(fh):
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != EVENT_HEADER:
        raise DomainError(f"event CSV must start with header {','.join(EVENT_HEADER)}")
    n_a, n_b = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise DomainError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            n_a.append(int(row[1]))
            n_b.append(int(row[2]))
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
    return np.array(n_a, dtype=np.int64), np.array(n_b, dtype=np.int64)
