"""Shared fixtures-by-hand for the test suite: geometry builders and the
independent routing oracle."""

import math

import numpy as np

from driftstream.core import DataPoint, SOURCE_CORROBORATIVE
from driftstream.pool import ModelRecord
from driftstream.windows import DataWindow, DeltaBand


def point(pid, vec, label=None, source=None, ts=0):
    return DataPoint(id=pid, ts=ts, text="", vec=np.asarray(vec, dtype=float),
                     label=label, label_source=source)


def vec_at_distance(d, dim=2):
    """Unit vector at a chosen cosine distance from e1."""
    cos = 1.0 - 2.0 * d
    v = np.zeros(dim)
    v[0] = cos
    v[1] = math.sqrt(max(0.0, 1.0 - cos * cos))
    return v


def make_model(mid, centroid, band, weights=None, omega=0.9, created_at=0, dim=None):
    dim = dim if dim is not None else len(centroid)
    memory = DataWindow([point(f"{mid}-seed", centroid)], capacity=64, window_id=mid)
    w = np.zeros(dim + 1) if weights is None else np.asarray(weights, dtype=float)
    return ModelRecord(id=mid, weights=w, memory=memory, band=band,
                       omega=omega, created_at=created_at, last_evaluated=created_at)


def oracle_route(models_state, x, lam_value):
    """Alg-style routing re-derived from the rules, checking every model.

    models_state rows: (model_id, centroid, band_lo, band_hi).
    """
    appended, updated, owned = set(), set(), False
    for mid, centroid, lo, hi in models_state:
        nx, nc = np.linalg.norm(x.vec), np.linalg.norm(centroid)
        if nx == 0.0 or nc == 0.0:
            d = 0.5
        else:
            d = (1.0 - min(1.0, max(-1.0, float(x.vec @ centroid) / (nx * nc)))) / 2.0
        lam = min(max(lam_value, hi), 1.0) if lam_value is not None else min(hi + 0.05, 1.0)
        inside = (lo < d < hi) or (lo == hi == d)
        if inside:
            appended.add(mid)
            owned = True
            if x.label is not None and x.label_source == SOURCE_CORROBORATIVE:
                updated.add(mid)
        elif hi <= d < lam:
            appended.add(mid)
    return appended, updated, not owned


def random_routing_fixture(rng):
    """One randomized pool + point for oracle-equivalence checks."""
    from driftstream.pool import Pool, PoolConfig

    dim = int(rng.integers(2, 6))
    n_models = int(rng.integers(1, 6))
    pool = Pool()
    state = []
    for j in range(n_models):
        centroid = rng.standard_normal(dim)
        lo = float(rng.uniform(0.0, 0.6))
        hi = float(rng.uniform(lo + 0.05, 1.0))
        pool.models.append(make_model(f"m{j}", centroid, DeltaBand(0.6, lo, hi),
                                      created_at=j))
        state.append((f"m{j}", centroid.copy(), lo, hi))
    lam = None if rng.random() < 0.5 else float(rng.uniform(0.0, 1.0))
    labeled = rng.random() < 0.4
    x = point(
        "x", rng.standard_normal(dim),
        label=int(rng.integers(0, 2)) if labeled else None,
        source=SOURCE_CORROBORATIVE if labeled else None,
    )
    return pool, state, x, PoolConfig(lam=lam)


def cone_window(rng, n, angle_deg, spread_deg, dim=16, wid="w"):
    """Points at a controlled mean angle from e1; their distance-to-centroid
    distribution centers near (1 - cos(angle)) / 2."""
    phi = np.radians(rng.normal(angle_deg, spread_deg, n))
    axis = np.zeros(dim)
    axis[0] = 1.0
    pts = []
    for i, a in enumerate(phi):
        q = rng.standard_normal(dim)
        q[0] = 0.0
        q /= np.linalg.norm(q)
        pts.append(point(f"{wid}{i}", np.cos(a) * axis + np.sin(a) * q, ts=i))
    return DataWindow(pts, capacity=n, window_id=wid)
