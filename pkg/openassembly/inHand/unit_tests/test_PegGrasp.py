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

from openassembly.openType.typePart        import PartClass, geometry
from openassembly.openType.rngStream       import RngStream, GRASP
from openassembly.perception.pcaPose       import PoseEstimate
from openassembly.inHand                   import PegGrasp
from openassembly.inHand.PegGrasp          import GraspConfig, GraspState
from openassembly.inHand.GraspException    import GraspException

#============================ logging =========================================

LOGFILE_NAME = 'test_PegGrasp.log'

log = logging.getLogger('test_PegGrasp')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_PegGrasp',
                   'PegGrasp',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ defines =========================================

SEED         = 7
IDENTITY_3   = ((1.0,0.0,0.0),(0.0,1.0,0.0),(0.0,0.0,1.0))

#============================ fixtures ========================================

INSERTIONS = [
    json.dumps((7.0, 0.0, False)),      # baseline pick-and-place
    json.dumps((7.0, 6.8, True )),
    json.dumps((0.5, 0.0, True )),      # boundary
    json.dumps((-0.5,0.0, True )),
    json.dumps((-3.0,-2.4,False)),
]

@pytest.fixture(params=INSERTIONS)
def insertionCase(request):
    return json.loads(request.param)

#============================ helpers =========================================

def _estimate(label=PartClass.PEG1,degenerate=False,yaw=0.3):
    return PoseEstimate(
        position     = (120.0,80.0,10.5),
        yaw          = yaw,
        label        = label,
        degenerate   = degenerate,
        eigenvalues  = (1.0,16.0,300.0),
        eigenvectors = IDENTITY_3,
    )

#============================ tests ===========================================

def test_default_config():
    config = PegGrasp.DEFAULT_GRASP_CONFIG
    assert config.x_p==20.0
    assert config.f_p==8.0

def test_zero_moment_arm_rejected():
    with pytest.raises(GraspException) as exc:
        GraspConfig(x_p=0.0)
    assert exc.value.errorCode==GraspException.BAD_GRASP_CONFIG

def test_config_beyond_peg_end_rejected():
    with pytest.raises(GraspException):
        GraspConfig(x_p=31.0)

def test_plan_peg_grasp():
    estimate = _estimate()
    grasp    = PegGrasp.plan_peg_grasp(estimate,geometry(PartClass.PEG1))
    assert (grasp.x_p,grasp.z_p,grasp.f_p)==(20.0,7.0,8.0)
    assert grasp.peg_pose==estimate.pose
    (gx,gy)  = grasp.grasp_point
    assert np.hypot(gx-120.0,gy-80.0)==pytest.approx(20.0,abs=1e-9)

def test_plan_peg_grasp_rejects_gear():
    with pytest.raises(GraspException) as exc:
        PegGrasp.plan_peg_grasp(_estimate(label=PartClass.GEAR_LARGE))
    assert exc.value.errorCode==GraspException.NOT_A_PEG

def test_plan_peg_grasp_rejects_degenerate():
    with pytest.raises(GraspException) as exc:
        PegGrasp.plan_peg_grasp(_estimate(degenerate=True))
    assert exc.value.errorCode==GraspException.NOT_A_PEG

def test_torques_of_default_grasp():
    grasp = PegGrasp.PegGrasp(20.0,7.0,8.0)
    assert PegGrasp.gravity_torque(grasp,0.1)==pytest.approx(19.62,abs=1e-9)
    assert PegGrasp.holding_torque(grasp,0.5,5.0)==pytest.approx(40.0/3.0,abs=1e-9)
    assert PegGrasp.simulate_reorientation(grasp)

def test_no_moment_arm_never_reorients():
    assert not PegGrasp.simulate_reorientation(PegGrasp.PegGrasp(0.0,7.0,8.0))

def test_twice_holding_torque_reorients():
    grasp   = PegGrasp.PegGrasp(20.0,7.0,8.0)
    holding = PegGrasp.holding_torque(grasp,0.5,5.0)
    mass    = 2*holding/(PegGrasp.GRAVITY*20.0)
    assert PegGrasp.simulate_reorientation(grasp,friction=0.5,mass=mass,pad_radius=5.0)

def test_huge_force_never_reorients():
    assert not PegGrasp.simulate_reorientation(PegGrasp.PegGrasp(30.0,7.0,1e9))

def test_reorientation_rejects_bad_constants():
    with pytest.raises(GraspException):
        PegGrasp.simulate_reorientation(PegGrasp.PegGrasp(20.0,7.0,8.0),friction=0.0)

def test_pivot_rule_monotone():
    forces = np.linspace(1.0,30.0,30)
    arms   = np.linspace(0.0,30.0,31)
    for x_p in arms:
        outcomes = [PegGrasp.simulate_reorientation(PegGrasp.PegGrasp(x_p,7.0,f)) for f in forces]
        # once the peg stays, more force keeps it staying
        assert all(not later for (earlier,later) in zip(outcomes,outcomes[1:]) if not earlier)
    for f_p in forces:
        outcomes = [PegGrasp.simulate_reorientation(PegGrasp.PegGrasp(x_p,7.0,f_p)) for x_p in arms]
        assert all(later for (earlier,later) in zip(outcomes,outcomes[1:]) if earlier)

def test_inject_grasp_error_deterministic():
    first  = PegGrasp.inject_grasp_error(RngStream(SEED,GRASP))
    second = PegGrasp.inject_grasp_error(RngStream(SEED,GRASP))
    assert first==second
    assert -10.0<=first<=10.0

def test_inject_grasp_error_distribution():
    rng    = RngStream(SEED,GRASP)
    draws  = np.array([PegGrasp.inject_grasp_error(rng) for _ in range(10000)])
    assert draws.min()>=-10.0 and draws.max()<=10.0
    assert abs(draws.mean())<=0.35
    (counts,_) = np.histogram(draws,bins=10,range=(-10.0,10.0))
    assert stats.chisquare(counts).pvalue>0.001

def test_grasp_state_offset_bound():
    with pytest.raises(ValueError):
        GraspState(PartClass.PEG1,10.5,True)

def test_radial_clearance():
    assert PegGrasp.radial_clearance()==pytest.approx(0.5,abs=1e-12)

def test_insert_peg(insertionCase):
    (dx,correction,expected) = insertionCase
    state = GraspState(PartClass.PEG2,dx,True).corrected(correction)
    assert PegGrasp.insert_peg(state)==expected

def test_insert_peg_requires_reorientation():
    with pytest.raises(GraspException) as exc:
        PegGrasp.insert_peg(GraspState(PartClass.PEG1,0.0,False))
    assert exc.value.errorCode==GraspException.NOT_REORIENTED
