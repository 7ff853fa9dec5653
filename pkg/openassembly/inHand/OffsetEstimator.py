# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Synthetic tactile observations of the in-hand offset and the regressor
that recovers the offset from them.

Each feature is a scaled tanh of the offset with its own gain, plus
Gaussian noise. The regressor is a distance-weighted k-nearest-neighbor
average over the training observations.
'''
import logging
log = logging.getLogger('OffsetEstimator')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import math
from dataclasses import dataclass

import numpy as np
from sklearn.neighbors import KNeighborsRegressor

from openassembly.openType.typePart      import PartClass
from openassembly.inHand                 import PegGrasp
from openassembly.inHand.GraspException  import GraspException

TACTILE_GAINS       = (0.4,0.6,0.8,1.0,1.2,1.5,1.8,2.2)
TACTILE_SCALE       = 50.0      # feature units
DEFAULT_TACTILE_SIGMA = 0.2     # feature units
MAX_NEIGHBORS       = 5

@dataclass(frozen=True)
class TactileObservation(object):
    features:   tuple

    def __post_init__(self):
        features = tuple(float(f) for f in self.features)
        if len(features)!=len(TACTILE_GAINS):
            raise ValueError('expected {0} features, got {1}'.format(len(TACTILE_GAINS),len(features)))
        if not all(math.isfinite(f) for f in features):
            raise ValueError('non-finite tactile feature')
        object.__setattr__(self,'features',features)

    def asArray(self):
        return np.array(self.features)

def embed(dx):
    '''
    Noiseless tactile features of an offset ``dx`` (mm).
    '''
    gains = np.array(TACTILE_GAINS)
    return (TACTILE_SCALE/gains)*np.tanh(gains*dx/10.0)

def observe_tactile(dx,noise=DEFAULT_TACTILE_SIGMA,rng=None):
    '''
    ``embed(dx)`` plus i.i.d. Gaussian noise of standard deviation ``noise``.
    Noise is drawn whenever ``rng`` is given.
    '''
    if abs(dx)>PegGrasp.MAX_GRASP_ERROR:
        raise ValueError('offset {0} beyond {1} mm'.format(dx,PegGrasp.MAX_GRASP_ERROR))
    features = embed(dx)
    if rng is not None:
        features = features+rng.normal(0.0,1.0,len(TACTILE_GAINS))*noise
    return TactileObservation(tuple(features))

class OffsetEstimator(object):
    '''
    Regresses the in-hand offset from a tactile observation.
    '''

    def __init__(self):

        # local variables
        self.observations   = []
        self.offsets        = []
        self._model         = None

    def __repr__(self):
        return 'OffsetEstimator(M={0})'.format(self.training_count)

    #======================== public ==========================================

    @property
    def training_count(self):
        return len(self.offsets)

    @property
    def fitted(self):
        return self._model is not None

    def fit(self,observations,offsets):
        observations = list(observations)
        offsets      = [float(dx) for dx in offsets]
        if not observations or len(observations)!=len(offsets):
            raise ValueError('need as many offsets as observations, at least one')

        self.observations   = observations
        self.offsets        = offsets
        self._model         = KNeighborsRegressor(
            n_neighbors     = min(MAX_NEIGHBORS,len(offsets)),
            weights         = 'distance',
            algorithm       = 'kd_tree',
        )
        self._model.fit(np.array([o.features for o in observations]),np.array(offsets))

        if log.isEnabledFor(logging.DEBUG):
            log.debug('fitted on {0} samples'.format(len(offsets)))
        return self

    def estimate(self,observation):
        if not self.fitted:
            raise GraspException(GraspException.NOT_FITTED)
        dx = float(self._model.predict(observation.asArray().reshape(1,-1))[0])
        return min(PegGrasp.MAX_GRASP_ERROR,max(-PegGrasp.MAX_GRASP_ERROR,dx))

def _samples(count,noise,rng):
    '''
    ``count`` (observation, offset) pairs; sample ``j`` draws from
    ``rng.child(j)``.
    '''
    observations = []
    offsets      = []
    for j in range(count):
        stream = rng.child(j)
        dx     = PegGrasp.inject_grasp_error(stream)
        observations.append(observe_tactile(dx,noise,stream))
        offsets.append(dx)
    return (observations,offsets)

def fit_offset_estimator(M,noise=DEFAULT_TACTILE_SIGMA,rng=None):
    '''
    Draws ``M`` training pairs and fits an estimator on them.
    '''
    if M<1:
        raise ValueError('M must be >= 1')
    (observations,offsets) = _samples(M,noise,rng)
    return OffsetEstimator().fit(observations,offsets)

def estimate_offset(estimator,observation):
    '''
    Estimated offset in mm, clamped to [-10, 10].
    '''
    return estimator.estimate(observation)

def holdout_mae(estimator,count,noise=DEFAULT_TACTILE_SIGMA,rng=None):
    '''
    Mean absolute error on ``count`` fresh pairs drawn from ``rng``.
    '''
    (observations,offsets) = _samples(count,noise,rng)
    errors = [abs(estimator.estimate(o)-dx) for (o,dx) in zip(observations,offsets)]
    return float(np.mean(errors))

@dataclass(frozen=True)
class InsertionTrial(object):
    trial:          int
    offset_mm:      float
    estimate_mm:    float
    residual_mm:    float
    reoriented:     bool
    success:        bool

def peg_insertion_trials(estimator,n_trials,noise=DEFAULT_TACTILE_SIGMA,rng=None,
                         config=PegGrasp.DEFAULT_GRASP_CONFIG,part=PartClass.PEG1):
    '''
    Grasp, reorient, offset and insert a peg ``n_trials`` times. Without an
    estimator no correction is applied (pick-and-place baseline).

    Trial ``t`` draws from ``rng.child(t)``.
    '''
    grasp   = PegGrasp.PegGrasp(config.x_p,config.z_p,config.f_p)
    trials  = []
    for t in range(n_trials):
        stream     = rng.child(t)
        reoriented = PegGrasp.simulate_reorientation(grasp,None,config.friction,config.mass,config.pad_radius)
        dx         = PegGrasp.inject_grasp_error(stream)
        obs        = observe_tactile(dx,noise,stream)
        estimate   = estimator.estimate(obs) if estimator is not None else 0.0
        state      = PegGrasp.GraspState(part,dx,reoriented).corrected(estimate)
        success    = reoriented and PegGrasp.insert_peg(state)
        trials.append(InsertionTrial(t,dx,estimate,state.residual,reoriented,success))
    return trials
