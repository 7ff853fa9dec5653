#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..', '..'))                       # root/

import logging
import logging.handlers
import json

import numpy as np
import pytest
from scipy import stats

from openassembly.openType.typePart       import PartClass, ALL_PARTS
from openassembly.openType.typePose       import Pose2D
from openassembly.openType.typeScene      import Scene, is_valid
from openassembly.openType.rngStream      import RngStream, PLANNER
from openassembly.SimEngine               import PlanarSim
from openassembly.SimEngine.PlanarSim     import SlideAction, SlipModel
from openassembly.singulation             import Planner
from openassembly.singulation.Planner     import CostWeights, CostTerms, PlanResult

#============================ logging =========================================

LOGFILE_NAME = 'test_Planner.log'

log = logging.getLogger('test_Planner')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_Planner',
                   'Planner',
                   'PlanarSim',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ defines =========================================

SEED      = 42
P1        = PartClass.PEG1
P2        = PartClass.PEG2
GL        = PartClass.GEAR_LARGE
GS        = PartClass.GEAR_SMALL

SPREAD    = Scene((
    (P1,Pose2D(100,225)),
    (P2,Pose2D(100, 40)),
    (GL,Pose2D(400,225)),
    (GS,Pose2D(100,410)),
))

CLUTTERED = Scene((
    (P1,Pose2D(300,225,0.0)),
    (P2,Pose2D(300,300,0.0)),
    (GL,Pose2D(223,225)),
    (GS,Pose2D(357,225)),
))

#============================ fixtures ========================================

COSTS = [
    json.dumps(((False,True, 100.0,200.0,False),-2.0)),
    json.dumps(((True, True, 100.0,200.0,False), 8.0)),
    json.dumps(((False,False,  0.0,200.0,False), 1.0)),
    json.dumps(((False,False,  0.0,400.0,True ),12.0)),
]

@pytest.fixture(params=COSTS)
def costCase(request):
    return json.loads(request.param)

#============================ tests ===========================================

def test_weights_nonnegative():
    with pytest.raises(ValueError):
        CostWeights(collision=-1.0)

def test_cost_from_terms(costCase):
    (terms,expected) = costCase
    assert abs(Planner.cost_from_terms(CostTerms(*terms))-expected)<=1e-12

def test_action_cost_hand_evaluated():
    assert is_valid(SPREAD)
    action = SlideAction(GL,100,0)
    terms  = Planner.cost_terms(SPREAD,action)
    assert not terms.collision
    assert terms.gear
    assert terms.separation_gain==pytest.approx(100.0,abs=1e-12)
    assert terms.center_distance==pytest.approx(200.0,abs=1e-12)
    assert not terms.off_table
    assert abs(Planner.action_cost(SPREAD,action)-(-2.0))<=1e-12

def test_action_cost_null_action():
    terms = Planner.cost_terms(SPREAD,SlideAction(P1,0,0))
    assert not terms.collision
    assert terms.separation_gain==0.0
    assert abs(Planner.action_cost(SPREAD,SlideAction(P1,0,0))-0.005*200)<=1e-12

def test_action_cost_collision_penalized():
    # large gear slid through the first peg
    terms = Planner.cost_terms(SPREAD,SlideAction(GL,-300,0))
    assert terms.collision

def test_graspable_gain_rewarded():
    # first peg pinched between the gears, slid clear of both
    assert Planner.graspable_count(CLUTTERED)==1
    action = SlideAction(P1,0,-100)
    terms  = Planner.cost_terms(CLUTTERED,action)
    assert not terms.collision
    assert not terms.off_table
    assert terms.graspable_gain==1
    plain  = CostWeights(singulation=0.0)
    assert Planner.action_cost(CLUTTERED,action)==pytest.approx(Planner.action_cost(CLUTTERED,action,plain)-8.0,abs=1e-12)

def test_graspable_gain_zero_when_pegs_free():
    terms = Planner.cost_terms(SPREAD,SlideAction(GL,100,0))
    assert terms.graspable_gain==0

def test_table_margin_counts_as_off_table():
    # second peg ends 5 mm from the lower edge, still on the table
    action  = SlideAction(P2,0,-35)
    outcome = PlanarSim.apply_slide(SPREAD,action,PlanarSim.NO_SLIP,None)
    assert not outcome.off_table
    terms   = Planner.cost_terms(SPREAD,action)
    assert terms.off_table
    assert terms.graspable_gain==0

def test_sample_action_bounds():
    first  = Planner.sample_action(SPREAD,RngStream(SEED,PLANNER))
    second = Planner.sample_action(SPREAD,RngStream(SEED,PLANNER))
    assert first==second
    assert abs(first.dx)<=300 and abs(first.dy)<=300

def test_sample_action_distribution():
    rng     = RngStream(SEED,PLANNER)
    actions = [Planner.sample_action(SPREAD,rng) for _ in range(10000)]
    counts  = [sum(1 for a in actions if a.o==part) for part in ALL_PARTS]
    for c in counts:
        assert abs(c/10000-0.25)<=0.02
    assert stats.chisquare(counts).pvalue>0.001
    assert abs(np.mean([a.dx for a in actions]))<=6.0
    assert abs(np.mean([a.dy for a in actions]))<=6.0

def test_plan_single_sample():
    result = Planner.plan(SPREAD,n_samples=1,rng=RngStream(SEED,PLANNER))
    assert result.best_action==Planner.sample_action(SPREAD,RngStream(SEED,PLANNER))
    assert result.samples_evaluated==1
    assert result.best_cost==result.per_sample_costs[0]

def test_plan_argmin():
    for seed in range(10):
        result = Planner.plan(CLUTTERED,n_samples=50,rng=RngStream(seed,PLANNER))
        assert result.samples_evaluated==50
        assert len(result.per_sample_costs)==50
        assert result.best_cost==min(result.per_sample_costs)
        assert result.best_index==int(np.argmin(result.per_sample_costs))

def test_plan_ties_earliest():
    zero   = CostWeights(0.0,0.0,0.0,0.0,0.0,0.0)
    result = Planner.plan(SPREAD,zero,n_samples=20,rng=RngStream(SEED,PLANNER))
    assert result.best_index==0
    assert result.best_action==Planner.sample_action(SPREAD,RngStream(SEED,PLANNER))

def test_plan_deterministic():
    first  = Planner.plan(CLUTTERED,n_samples=30,rng=RngStream(SEED,PLANNER))
    second = Planner.plan(CLUTTERED,n_samples=30,rng=RngStream(SEED,PLANNER))
    assert first==second

def test_plan_more_samples_never_worse():
    for seed in range(20):
        few  = Planner.plan(CLUTTERED,n_samples=10, rng=RngStream(seed,PLANNER))
        many = Planner.plan(CLUTTERED,n_samples=100,rng=RngStream(seed,PLANNER))
        assert many.best_cost<=few.best_cost

def test_singulate_already_graspable():
    result = Planner.singulate(SPREAD,rng=RngStream(SEED,'singulate'))
    assert result.success
    assert result.interactions==0
    assert result.final_scene==SPREAD

def test_singulate_no_budget():
    assert not PlanarSim.all_pegs_graspable(CLUTTERED)
    result = Planner.singulate(CLUTTERED,max_interactions=0,rng=RngStream(SEED,'singulate'))
    assert not result.success
    assert result.interactions==0

def test_singulate_off_table_counts_executed_slide(monkeypatch):
    def pushOff(scene,*args,**kwargs):
        return PlanResult(SlideAction(GS,300,0),0.0,1,(0.0,))
    monkeypatch.setattr(Planner,'plan',pushOff)
    result = Planner.singulate(
        CLUTTERED,
        n_samples        = 1,
        max_interactions = 3,
        slip_model       = SlipModel(0.0),
        rng              = RngStream(SEED,'singulate'),
    )
    assert not result.success
    assert result.off_table
    assert result.interactions==1
    assert len(result.records)==1
    assert result.records[0].off_table
    assert not result.records[0].pegs_graspable

def test_singulate_cluttered():
    result = Planner.singulate(
        CLUTTERED,
        n_samples        = 100,
        slip_model       = SlipModel(0.0),
        rng              = RngStream(SEED,'singulate'),
    )
    assert result.success
    assert 1<=result.interactions<=10
    assert len(result.records)==result.interactions
    assert result.records[-1].pegs_graspable
    assert PlanarSim.all_pegs_graspable(result.final_scene)
    assert is_valid(result.final_scene)

def test_singulate_with_perception_deterministic():
    kwargs = dict(n_samples=30,rng=RngStream(SEED,'singulate'),perceive=True,n_points=500)
    first  = Planner.singulate(CLUTTERED,**kwargs)
    second = Planner.singulate(CLUTTERED,**kwargs)
    assert first.records==second.records
    assert first.final_scene==second.final_scene
