#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..', '..'))                       # root/

import logging
import logging.handlers
import json
import math

import numpy as np
import pytest
from scipy import stats

from openassembly.openType.rngStream            import RngStream, FORCE_NOISE
from openassembly.insertion                     import ForceTrace, InsertionPolicy
from openassembly.insertion.InsertionPolicy     import ErrorDirection, DIRECTIONS
from openassembly.insertion.InsertionException  import InsertionException

#============================ logging =========================================

LOGFILE_NAME = 'test_InsertionPolicy.log'

log = logging.getLogger('test_InsertionPolicy')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_InsertionPolicy',
                   'InsertionPolicy',
                   'ForceTrace',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ defines =========================================

SEED = 5

#============================ fixtures ========================================

@pytest.fixture(scope='module')
def noiselessPolicy():
    return InsertionPolicy.fit_insertion_policy(1,0.0,RngStream(SEED,FORCE_NOISE))

@pytest.fixture(scope='module')
def policy():
    return InsertionPolicy.fit_insertion_policy(50,rng=RngStream(SEED,FORCE_NOISE))

CLASS_ERRORS = [
    json.dumps(((4.0,0.0),'+x')),
    json.dumps(((-4.0,0.0),'-x')),
    json.dumps(((0.0,4.0),'+y')),
    json.dumps(((0.0,-4.0),'-y')),
    json.dumps(((0.0,0.0),'centered')),
]

@pytest.fixture(params=CLASS_ERRORS)
def classError(request):
    (error,label) = json.loads(request.param)
    return (tuple(error),ErrorDirection(label))

#============================ helpers =========================================

class AlternatingPolicy(object):
    '''
    Always blames the y axis, flipping sign every call.
    '''

    def __init__(self):
        self.calls = 0

    def predict(self,trace,exclude=()):
        self.calls += 1
        return ErrorDirection.PLUS_Y if self.calls%2 else ErrorDirection.MINUS_Y

class OraclePolicy(object):
    '''
    Reads the true error back from the trace.
    '''

    def predict(self,trace,exclude=()):
        (dx,dy) = trace.injected_error
        if abs(dx)>=abs(dy):
            return ErrorDirection.PLUS_X if dx>0 else ErrorDirection.MINUS_X
        return ErrorDirection.PLUS_Y if dy>0 else ErrorDirection.MINUS_Y

#============================ tests ===========================================

def test_class_order():
    assert [str(d) for d in DIRECTIONS]==['+x','-x','+y','-y','centered']

def test_noiseless_centroids(noiselessPolicy):
    centroids = noiselessPolicy.centroids
    assert np.allclose(centroids[ErrorDirection.PLUS_X],(-2.0,0.0,5.0),atol=1e-12)
    assert np.allclose(centroids[ErrorDirection.MINUS_Y],(0.0,2.0,5.0),atol=1e-12)
    assert np.allclose(centroids[ErrorDirection.CENTERED],(0.0,0.0,5.0),atol=1e-12)

def test_predict_noiseless(noiselessPolicy,classError):
    (error,label) = classError
    trace = ForceTrace.synth_force_trace(error,0.0)
    assert InsertionPolicy.predict_error_direction(noiselessPolicy,trace)==label

def test_predict_tie_breaks_in_class_order(noiselessPolicy):
    # halfway between the +x and +y centroids, farther from centered
    trace = ForceTrace.synth_force_trace((4.0,4.0),0.0)
    assert noiselessPolicy.predict(trace)==ErrorDirection.PLUS_X
    trace = ForceTrace.synth_force_trace((-4.0,-4.0),0.0)
    assert noiselessPolicy.predict(trace)==ErrorDirection.MINUS_X

def test_predict_excluding_centered(noiselessPolicy):
    trace = ForceTrace.synth_force_trace((1.0,0.0),0.0)
    assert noiselessPolicy.predict(trace)==ErrorDirection.CENTERED
    assert noiselessPolicy.predict(trace,exclude=(ErrorDirection.CENTERED,))==ErrorDirection.PLUS_X

def test_not_fitted():
    with pytest.raises(InsertionException) as exc:
        InsertionPolicy.InsertionPolicy().predict(ForceTrace.synth_force_trace((0.0,0.0),0.0))
    assert exc.value.errorCode==InsertionException.NOT_FITTED

def test_fit_needs_every_class():
    traces = [ForceTrace.synth_force_trace((4.0,0.0),0.0)]
    with pytest.raises(ValueError):
        InsertionPolicy.InsertionPolicy().fit(traces,[ErrorDirection.PLUS_X])

def test_noiseless_accuracy(noiselessPolicy):
    evaluation = InsertionPolicy.evaluate_policy(noiselessPolicy,10,0.0,RngStream(SEED,'holdout'))
    assert evaluation.accuracy==1.0
    assert evaluation.confusion[0]==(10,0,0,0,0)

def test_default_noise_accuracy(policy):
    evaluation = InsertionPolicy.evaluate_policy(policy,40,rng=RngStream(SEED,'holdout'))
    assert evaluation.accuracy>=0.95
    assert sum(sum(row) for row in evaluation.confusion)==200
    assert evaluation.toDict()['classes'][-1]=='centered'

def test_huge_noise_near_chance():
    policy     = InsertionPolicy.fit_insertion_policy(1,1e4,RngStream(SEED,FORCE_NOISE))
    evaluation = InsertionPolicy.evaluate_policy(policy,100,1e4,RngStream(SEED,'holdout'))
    (low,high) = stats.binom.interval(0.999,500,0.2)
    assert low/500<=evaluation.accuracy<=high/500

def test_loop_inside_clearance(noiselessPolicy):
    result = InsertionPolicy.insert_gear_loop((0.2,0.0),noiselessPolicy)
    assert result.success
    assert result.iterations==0

def test_loop_noiseless_rollout(noiselessPolicy):
    result = InsertionPolicy.insert_gear_loop((4.0,0.0),noiselessPolicy,step_mm=1.5,noise=0.0)
    assert result.success
    assert result.iterations==3
    assert result.directions==(ErrorDirection.PLUS_X,)*3
    assert result.residual==pytest.approx((-0.5,0.0),abs=1e-12)

def test_loop_halves_step_on_reversal(noiselessPolicy):
    # 2.4 -> 0.9 -> -0.6, then the reversed move is 0.75 -> 0.15
    result = InsertionPolicy.insert_gear_loop((2.4,0.0),noiselessPolicy,step_mm=1.5,noise=0.0)
    assert result.success
    assert result.directions==(ErrorDirection.PLUS_X,ErrorDirection.PLUS_X,ErrorDirection.MINUS_X)
    assert result.residual[0]==pytest.approx(0.15,abs=1e-12)

def test_loop_adversarial_policy_fails():
    result = InsertionPolicy.insert_gear_loop((1.0,0.0),AlternatingPolicy(),max_iters=6,noise=0.0)
    assert not result.success
    assert not result.lost
    assert result.iterations==6

def test_loop_lost_peg():
    class Wrong(object):
        def predict(self,trace,exclude=()):
            return ErrorDirection.MINUS_X
    result = InsertionPolicy.insert_gear_loop((4.0,0.0),Wrong(),noise=0.0)
    assert not result.success
    assert result.lost
    assert result.iterations==1

def test_loop_terminates_with_oracle():
    step = 1.0
    for error in np.linspace(-5.0,5.0,41):
        for axis in (0,1):
            start       = [0.0,0.0]
            start[axis] = float(error)
            result = InsertionPolicy.insert_gear_loop(tuple(start),OraclePolicy(),step_mm=step,max_iters=10,noise=0.0)
            assert result.success
            assert result.iterations<=math.ceil(5.0/step)+1

def test_loop_rejects_no_iterations(noiselessPolicy):
    with pytest.raises(ValueError):
        InsertionPolicy.insert_gear_loop((1.0,0.0),noiselessPolicy,max_iters=0)

def test_loop_with_noise_deterministic(policy):
    first  = InsertionPolicy.insert_gear_loop((3.0,-1.0),policy,rng=RngStream(SEED,FORCE_NOISE))
    second = InsertionPolicy.insert_gear_loop((3.0,-1.0),policy,rng=RngStream(SEED,FORCE_NOISE))
    assert first==second
