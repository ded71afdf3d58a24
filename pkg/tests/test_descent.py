"""Top-of-descent planning and the level-by constraint flow."""

import pytest

from skytwin.kernel import ConstraintUnachievable, compute_top_of_descent
from skytwin.kernel.clearances import DescendNowLevelBy, DescendWhenReadyLevelBy
from skytwin.kernel.descent import abeam_distance_nm

from conftest import make_world, spawn_cruise


def test_tod_strictly_between_and_rollout_levels_in_time():
    w = make_world()
    ac = spawn_cruise(w, fl=350.0, lat=51.5, lon=-3.0, heading=90.0)
    wp = w.airspace.waypoint("EASTB")   # ~225 NMI ahead, far beyond descent range
    plan = compute_top_of_descent(w, ac, 200.0, wp, None, w.wind_forecast)
    d_abeam = abeam_distance_nm(w, ac, wp)
    assert 0.0 < plan.tod_dist_from_now < d_abeam
    assert plan.tod_dist_to_go == pytest.approx(d_abeam - plan.tod_dist_from_now, abs=1e-9)
    assert not plan.at_risk

    # closed-loop: issue the clearance and fly it
    ack = w.issue_clearance("TST001", DescendWhenReadyLevelBy(200.0, "EASTB"), "t")
    assert ack.accepted
    level_fl_at_abeam = None
    for _ in range(400):
        w.tick()
        if abeam_distance_nm(w, ac, wp) <= 0.0:
            level_fl_at_abeam = ac.kin.fl
            break
    assert level_fl_at_abeam is not None
    assert level_fl_at_abeam <= 200.0 + 0.5


def test_descend_now_vs_when_ready_paired():
    w1 = make_world()
    a1 = spawn_cruise(w1, fl=350.0)
    w1.issue_clearance("TST001", DescendNowLevelBy(250.0, "EASTB"), "t")
    w1.tick()
    assert a1.intent.vertical.mode == "descending"
    assert a1.kin.rocd < 0.0

    w2 = make_world()
    a2 = spawn_cruise(w2, fl=350.0)
    w2.issue_clearance("TST001", DescendWhenReadyLevelBy(250.0, "EASTB"), "t")
    w2.tick()
    assert a2.intent.vertical.mode == "level"   # waiting for the ToD
    assert a2.kin.rocd == 0.0
    started = False
    for _ in range(400):
        w2.tick()
        if a2.intent.vertical.mode == "descending":
            started = True
            break
    assert started

    # both meet the constraint in closed loop
    for w, ac in ((w1, a1), (w2, a2)):
        wp = w.airspace.waypoint("EASTB")
        while abeam_distance_nm(w, ac, wp) > 0.0 and w.sim_time < 3600.0:
            w.tick()
        assert ac.kin.fl <= 250.0 + 0.5


def test_degenerate_target_rejected():
    w = make_world()
    ac = spawn_cruise(w, fl=350.0)
    wp = w.airspace.waypoint("EASTB")
    with pytest.raises(ConstraintUnachievable):
        compute_top_of_descent(w, ac, 350.0, wp, None, w.wind_forecast)
    ack = w.issue_clearance("TST001", DescendWhenReadyLevelBy(350.0, "EASTB"), "t")
    assert not ack.accepted


def test_unachievable_constraint_rejected():
    w = make_world()
    # 60 NMI to the waypoint but 200 FL to lose: physically impossible
    ac = spawn_cruise(w, fl=390.0, lat=51.5, lon=-1.0)
    ack = w.issue_clearance("TST001", DescendWhenReadyLevelBy(150.0, "MIDLN"), "t")
    assert not ack.accepted
    assert "unachievable" in ack.reason
    assert ac.intent.vertical.mode == "level"   # no intent change
    rejected = w.log.of_kind("clearance-rejected")
    assert len(rejected) == 1


def test_waypoint_behind_rejected():
    w = make_world()
    spawn_cruise(w, fl=350.0, lat=51.5, lon=2.0, heading=90.0)  # east of MIDLN
    ack = w.issue_clearance("TST001", DescendWhenReadyLevelBy(250.0, "MIDLN"), "t")
    assert not ack.accepted
