"""Smoke tests for the python bindings: geometry recovery on the reference
sphere configuration (unit sphere, source/receiver balls of radius 1/2 at
distance 4 from the origin, 90 degrees apart)."""

import math

import pytest

import enclosure as enc

P = (4.0, 0.0, 0.0)
PP = (0.0, 4.0, 0.0)
ETA = 0.5


@pytest.fixture(scope="module")
def sphere():
    return enc.ObstacleShape.sphere((0.0, 0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def balls():
    return enc.Ball(P, ETA), enc.Ball(PP, ETA)


C_REF = 2.0 * math.sqrt(17.0 - 4.0 * math.sqrt(2.0))  # 6.735917383848356


def test_broken_path_reference_values(sphere):
    mb = enc.min_broken_path(sphere, P, PP, 5)
    assert mb.c_min == pytest.approx(C_REF, abs=1e-9)
    q = mb.reflectors[0].q
    s = math.sqrt(2.0) / 2.0
    assert q[0] == pytest.approx(s, abs=1e-7)
    assert q[1] == pytest.approx(s, abs=1e-7)
    assert q[2] == pytest.approx(0.0, abs=1e-7)


def test_indicator_decay_rate(sphere, balls):
    B, Bp = balls
    taus = [8.0 * (40.0 / 8.0) ** (i / 11.0) for i in range(12)]
    curve = enc.semianalytic_indicator(sphere, B, Bp, taus)
    assert all(v > 0.0 for v in curve.values)
    fit = enc.decay_fit_refined(curve, 4.0)
    kappa = C_REF - 2.0 * ETA
    assert fit.rate == pytest.approx(kappa, abs=5e-3)


def test_scaled_limit_matches_curvature_prediction(sphere, balls):
    B, Bp = balls
    rhs = enc.asymptotic_rhs(enc.AsymptoticKind.scaled_indicator, sphere, B, Bp)
    assert rhs == pytest.approx(0.025830966, rel=1e-4)


def test_spheroid_frame(sphere):
    mb = enc.min_broken_path(sphere, P, PP, 4)
    frame = enc.SpheroidFrame(P, PP, mb.c_min)
    assert frame.semi_major == pytest.approx(mb.c_min / 2.0)
    q = mb.reflectors[0].q
    # the contact point lies on the spheroid
    d = (q - frame.center).dot(q - frame.center)
    assert d > 0.0
    phi = math.dist(q, P) + math.dist(q, PP)
    assert phi == pytest.approx(mb.c_min, abs=1e-9)


def test_geometry_pipeline_recovers_sphere(sphere, balls):
    B, Bp = balls
    mb = enc.min_broken_path(sphere, P, PP, 5)
    q = mb.reflectors[0].q
    nu = enc.extract_normal(q, P, PP)
    outward = sphere.outward_normal(q)
    assert max(abs(nu[i] - outward[i]) for i in range(3)) < 1e-9

    curv = enc.curvature_extract_geometry(sphere, q, B, Bp, 0.1, 0.2)
    ball = enc.reconstruct_ball(q, nu, curv, mb.c_min, mb.c_min - 2 * ETA)
    assert ball.radius == pytest.approx(1.0, abs=1e-6)
    assert max(abs(c) for c in ball.center) < 1e-6


def test_precondition_errors_are_value_errors(sphere):
    with pytest.raises(ValueError):
        # source ball overlapping the obstacle violates the spacing hypothesis
        enc.t_thresholds(sphere, enc.Ball((1.0, 0.0, 0.0), 0.5),
                         enc.Ball(PP, ETA))


def test_fdtd_tiny_run_free_space():
    cfg = enc.SimulationConfig()
    cfg.h = 0.2
    cfg.T = 2.0
    cfg.source = enc.Ball((0.0, 0.0, 0.0), 0.6)
    cfg.receiver = enc.Ball((1.5, 0.0, 0.0), 0.4)
    trace = enc.simulate(cfg)
    assert trace.n_samples > 0
    assert trace.n_receivers > 0
    # discrete leapfrog energy is conserved in free space
    e = trace.energy
    assert len(e) > 1
    assert max(abs(x / e[0] - 1.0) for x in e) < 1e-8
