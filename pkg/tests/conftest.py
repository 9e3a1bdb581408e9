"""Shared fixtures.

The session-scoped records below are the expensive part of the suite:
each is a full flow-to-extinction simulation reused by many tests.  Wall
time is recorded on the record (``_wall``) so runtime budgets can be
asserted where a test needs one.
"""
import time

import numpy as np
import pytest

from slabflow.solver import SolverConfig, FlowState, evolve, estimate_extinction
from slabflow.profile import ProfileCurve
from slabflow.harness import run_approximant


def _timed_approximant(n, R, cfg):
    t0 = time.perf_counter()
    rec = run_approximant(n, R, cfg)
    rec._wall = time.perf_counter() - t0
    return rec


@pytest.fixture(scope="session")
def r10_512():
    # ~2-3 min
    return _timed_approximant(2, 10.0, SolverConfig(N=512, safety=0.35))


@pytest.fixture(scope="session")
def r10_1024():
    # ~10 min; needed for the grid-independence and area-identity checks
    return _timed_approximant(2, 10.0, SolverConfig(N=1024, safety=0.35))


@pytest.fixture(scope="session")
def r20_512():
    # ~5 min
    return _timed_approximant(2, 20.0, SolverConfig(N=512, safety=0.35))


@pytest.fixture(scope="session")
def r40_512():
    # ~9 min; terminates on the curvature stop, not the area stop
    return _timed_approximant(2, 40.0, SolverConfig(N=512, safety=0.35))


@pytest.fixture(scope="session")
def n1_r5_512():
    # ~1 min; n=1 evolution whose exact solution is known in closed form
    return _timed_approximant(1, 5.0, SolverConfig(N=512, safety=0.35))


@pytest.fixture(scope="session")
def n1_r10_512():
    # ~1.5 min; long n=1 run for the displacement-constant fit
    return _timed_approximant(1, 10.0, SolverConfig(N=512, safety=0.35))


@pytest.fixture(scope="session")
def r4_128():
    # ~10 s; small end-to-end record for harness/CLI structure tests
    return _timed_approximant(2, 4.0, SolverConfig(N=128, safety=0.35))


@pytest.fixture(scope="session")
def n1_r3_128():
    # ~8 s; the n=1 approximant of age R is the oval itself, so its
    # exact lifespan is R
    return _timed_approximant(1, 3.0, SolverConfig(N=128, safety=0.35))


@pytest.fixture(scope="session")
def sphere_record():
    # unit-sphere n=2 collapse on the run clock (no shift applied)
    cfg = SolverConfig(N=256, safety=0.35)
    curve = ProfileCurve(n=2, kappa=np.full(cfg.N, 1.0))
    rec = evolve(FlowState(curve=curve, t=0.0, ell=1.0), cfg, stride=1 / 1200)
    rec.T_est = estimate_extinction(rec)
    return rec
