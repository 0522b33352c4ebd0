"""Synthetic embedding videos with planted ground truth, plus scoring.

Each generated video is a unit-row embedding matrix containing three
frame populations, separated by their raw query cosine:

* event frames: per event, a peak frame plus context frames whose
  relevance decays along the span and whose embedding walks a fixed-angle
  arc, so adjacent frames are similar but never coincide;
* filler frames: near-duplicates of one background direction with low
  query cosine, jittered by ``noise_sigma``;
* noise frames: isolated random directions occupying the lowest query
  cosine band.

The construction keeps every event cosine strictly above every noise
cosine (asserted at generation time), so relevance rankings are
well-defined and selector behavior on the corpus is interpretable.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .baselines import run_policy
from .core import as_frame_matrix, l2_normalize
from .errors import InvalidInputError, SweepError
from .selector import SelectorConfig

__all__ = [
    "SyntheticVideoSpec",
    "GroundTruth",
    "SelectionMetrics",
    "SweepRow",
    "generate",
    "evaluate",
    "make_corpus",
    "run_sweep",
]

logger = logging.getLogger(__name__)

EVENT_PEAK_COSINE = (0.75, 0.88)
EVENT_DECAY = (0.015, 0.035)
FILLER_COSINE = (0.08, 0.16)
NOISE_COSINE = (-0.40, -0.36)
MAX_GENERATION_ATTEMPTS = 16


@dataclass(frozen=True)
class SyntheticVideoSpec:
    """Generator parameters for one synthetic video.

    ``event_drift`` is the per-frame rotation angle (radians) of the
    within-event embedding arc: large values spread an event's frames
    apart, small values make the context frames near-duplicates of the
    peak (the suppressive regime the refinement loop is built to fix).
    """

    n_frames: int
    dim: int
    n_events: int
    event_span: int
    duplicate_rate: float
    noise_sigma: float
    seed: int
    event_drift: float = 0.9

    def __post_init__(self):
        for name in ("n_frames", "n_events", "event_span"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be >= 1")
        if self.dim < 3:
            raise InvalidInputError(
                "dim must be >= 3: the construction needs a rotation plane "
                "orthogonal to the query direction"
            )
        if self.n_events * self.event_span > self.n_frames:
            raise InvalidInputError(
                f"{self.n_events} events of span {self.event_span} do not fit "
                f"in {self.n_frames} frames"
            )
        if not 0.0 <= self.duplicate_rate <= 1.0:
            raise InvalidInputError("duplicate_rate must be in [0, 1]")
        if self.noise_sigma < 0:
            raise InvalidInputError("noise_sigma must be >= 0")
        if self.event_drift <= 0:
            raise InvalidInputError("event_drift must be > 0")


@dataclass
class GroundTruth:
    """Planted labels: one index list per event, plus the noise indices."""

    event_frames: list[list[int]]
    noise_frames: list[int]

    def all_event_frames(self) -> set[int]:
        return set(itertools.chain.from_iterable(self.event_frames))


@dataclass
class SelectionMetrics:
    event_recall: float
    frame_recall: float
    temporal_coverage: float
    noise_rate: float
    redundancy: float

    def to_dict(self):
        return {
            "event_recall": self.event_recall,
            "frame_recall": self.frame_recall,
            "temporal_coverage": self.temporal_coverage,
            "noise_rate": self.noise_rate,
            "redundancy": self.redundancy,
        }

    FIELDS = ("event_recall", "frame_recall", "temporal_coverage", "noise_rate", "redundancy")


def _unit_orthogonal(rng, q):
    """Random unit vector orthogonal to unit vector q."""
    while True:
        g = rng.normal(size=q.shape[0])
        g -= np.dot(g, q) * q
        norm = np.linalg.norm(g)
        if norm > 1e-9:
            return g / norm


def _at_cosine(q, direction, c):
    """Unit vector with cosine c against q, tilted toward ``direction``."""
    return c * q + np.sqrt(max(0.0, 1.0 - c * c)) * direction


def _generate_once(spec: SyntheticVideoSpec, rng):
    n, d = spec.n_frames, spec.dim
    q = rng.normal(size=d)
    q /= np.linalg.norm(q)

    frames = np.zeros((n, d), dtype=np.float64)

    # Disjoint event placement: one span per equal-length segment.
    seg = n // spec.n_events
    event_frames = []
    for e in range(spec.n_events):
        off = int(rng.integers(0, seg - spec.event_span + 1))
        start = e * seg + off
        event_frames.append(list(range(start, start + spec.event_span)))

    for idxs in event_frames:
        peak = rng.uniform(*EVENT_PEAK_COSINE)
        decay = rng.uniform(*EVENT_DECAY)
        u = _unit_orthogonal(rng, q)
        w = _unit_orthogonal(rng, q)
        w -= np.dot(w, u) * u
        w /= np.linalg.norm(w)
        for t, idx in enumerate(idxs):
            c = peak - t * decay
            angle = t * spec.event_drift
            direction = np.cos(angle) * u + np.sin(angle) * w
            frames[idx] = _at_cosine(q, direction, c)

    flat_events = set(itertools.chain.from_iterable(event_frames))
    non_event = [i for i in range(n) if i not in flat_events]
    n_filler = int(round(spec.duplicate_rate * len(non_event)))
    perm = rng.permutation(len(non_event))
    filler_idx = sorted(non_event[i] for i in perm[:n_filler])
    noise_idx = sorted(non_event[i] for i in perm[n_filler:])

    base_c = rng.uniform(*FILLER_COSINE)
    base = _at_cosine(q, _unit_orthogonal(rng, q), base_c)
    for idx in filler_idx:
        row = base + spec.noise_sigma * rng.normal(size=d) / np.sqrt(d)
        frames[idx] = row / np.linalg.norm(row)

    for idx in noise_idx:
        c = rng.uniform(*NOISE_COSINE)
        frames[idx] = _at_cosine(q, _unit_orthogonal(rng, q), c)

    gt = GroundTruth(event_frames=event_frames, noise_frames=noise_idx)
    return frames.astype(np.float32), q.astype(np.float32), gt


def generate(spec: SyntheticVideoSpec):
    """Deterministically build (frames, query, ground_truth) for a spec.

    Regenerates with a fresh stream (and logs) in the unlikely case the
    planted event/noise cosine separation does not hold.
    """
    rng = np.random.default_rng(spec.seed)
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        frames, q, gt = _generate_once(spec, rng)
        raw = frames.astype(np.float64) @ q.astype(np.float64)
        event_min = min(raw[i] for i in gt.all_event_frames())
        noise_max = max((raw[i] for i in gt.noise_frames), default=-np.inf)
        if event_min > noise_max:
            if attempt:
                logger.warning(
                    "seed %d: planted separation needed %d attempts", spec.seed, attempt + 1
                )
            return frames, q, gt
    raise InvalidInputError(
        f"could not achieve event/noise separation for seed {spec.seed}"
    )


def evaluate(selected, gt: GroundTruth, frames) -> SelectionMetrics:
    """Score a selection against the planted ground truth.

    Pure function of its inputs; the order of ``selected`` is irrelevant.
    Redundancy is the mean pairwise cosine among the selected rows, 0
    when fewer than two frames are selected.
    """
    m = as_frame_matrix(frames)
    picks = [int(i) for i in selected]
    if any(i < 0 or i >= m.shape[0] for i in picks):
        raise InvalidInputError("selected index out of range")
    chosen = set(picks)

    n_events = len(gt.event_frames)
    hits = [len(chosen & set(ev)) for ev in gt.event_frames]
    all_event = gt.all_event_frames()
    noise = set(gt.noise_frames)

    event_recall = sum(1 for h in hits if h >= 1) / n_events
    frame_recall = (len(chosen & all_event) / len(all_event)) if all_event else 0.0
    temporal_coverage = sum(1 for h in hits if h >= 2) / n_events
    noise_rate = (len(chosen & noise) / len(chosen)) if chosen else 0.0

    if len(chosen) >= 2:
        rows = l2_normalize(m[sorted(chosen)]).astype(np.float64)
        sims = np.clip(rows @ rows.T, -1.0, 1.0)
        k = rows.shape[0]
        redundancy = float((sims.sum() - k) / (k * (k - 1)))
    else:
        redundancy = 0.0

    return SelectionMetrics(
        event_recall=event_recall,
        frame_recall=frame_recall,
        temporal_coverage=temporal_coverage,
        noise_rate=noise_rate,
        redundancy=redundancy,
    )


def make_corpus(corpus_seed: int, videos: int = 50, n_frames: int = 128, dim: int = 32,
                n_events: int = 3, event_span: int = 5, duplicate_rate: float = 0.6,
                noise_sigma: float = 0.05, event_drift: float = 0.9) -> list[SyntheticVideoSpec]:
    """Per-video specs with seeds derived deterministically from one seed."""
    if videos < 1:
        raise InvalidInputError("videos must be >= 1")
    rng = np.random.default_rng(corpus_seed)
    seeds = rng.integers(0, 2**63 - 1, size=videos)
    return [
        SyntheticVideoSpec(
            n_frames=n_frames, dim=dim, n_events=n_events, event_span=event_span,
            duplicate_rate=duplicate_rate, noise_sigma=noise_sigma,
            seed=int(s), event_drift=event_drift,
        )
        for s in seeds
    ]


@dataclass
class SweepRow:
    """Mean metrics for one (policy, K, B) cell over a corpus."""

    policy: str
    budget_k: int
    batch_b: int
    videos: int
    metrics: SelectionMetrics

    def to_dict(self):
        out = {
            "policy": self.policy,
            "K": self.budget_k,
            "B": self.batch_b,
            "videos": self.videos,
        }
        out.update(self.metrics.to_dict())
        return out


def run_sweep(corpus, policies, budgets, batch_sizes, lam: float = 0.5,
              normalize_embeddings: bool = True) -> list[SweepRow]:
    """Mean metrics per (policy, K, B) cell over every corpus video.

    Videos are generated once and shared across cells; rows come out in
    (policy, K, B) iteration order and are deterministic given the
    corpus seeds.
    """
    if not corpus or not policies or not budgets or not batch_sizes:
        raise InvalidInputError("corpus, policies, budgets, batch_sizes must be nonempty")

    videos = [(spec, *generate(spec)) for spec in corpus]
    rows = []
    for policy, k, b in itertools.product(policies, budgets, batch_sizes):
        sums = dict.fromkeys(SelectionMetrics.FIELDS, 0.0)
        for vid, (spec, frames, query, gt) in enumerate(videos):
            try:
                cfg = SelectorConfig(
                    budget_k=k, batch_b=b, normalize_embeddings=normalize_embeddings
                )
                picks, _ = run_policy(policy, frames, query, cfg, lam=lam)
                metrics = evaluate(picks, gt, frames)
            except Exception as exc:
                raise SweepError(
                    f"policy={policy} K={k} B={b} video={vid} seed={spec.seed}: {exc}"
                ) from exc
            for name in SelectionMetrics.FIELDS:
                sums[name] += getattr(metrics, name)
        means = {name: sums[name] / len(videos) for name in SelectionMetrics.FIELDS}
        rows.append(
            SweepRow(policy=policy, budget_k=k, batch_b=b, videos=len(videos),
                     metrics=SelectionMetrics(**means))
        )
    return rows
