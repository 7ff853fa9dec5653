# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Gear insertion driven by the direction of the position error, as predicted
from the force trace of a failed attempt.

The policy is a nearest-centroid classifier over the filtered force means.
The insertion loop moves the gear one step against the predicted direction
and tries again.
'''
import logging
log = logging.getLogger('InsertionPolicy')
log.setLevel(logging.INFO)
log.addHandler(logging.NullHandler())

import enum
import math
from dataclasses import dataclass

import numpy as np
from sklearn.neighbors import NearestCentroid
from sklearn.metrics   import accuracy_score, confusion_matrix

from openassembly.insertion                    import ForceTrace
from openassembly.insertion.InsertionException import InsertionException

TRAINING_ERROR      = 4.0       # mm
DEFAULT_STEP        = 1.5       # mm
DEFAULT_CLEARANCE   = 0.5       # mm, radial
DEFAULT_MAX_ITERS   = 6
LOST_RESIDUAL       = 5.0       # mm, per axis

class ErrorDirection(enum.Enum):
    '''
    Error direction classes, in tie-breaking order.
    '''

    PLUS_X      = '+x'
    MINUS_X     = '-x'
    PLUS_Y      = '+y'
    MINUS_Y     = '-y'
    CENTERED    = 'centered'

    def __str__(self):
        return self.value

    @property
    def unit(self):
        return _UNITS[self]

DIRECTIONS = tuple(ErrorDirection)

_UNITS = {
    ErrorDirection.PLUS_X:   ( 1.0, 0.0),
    ErrorDirection.MINUS_X:  (-1.0, 0.0),
    ErrorDirection.PLUS_Y:   ( 0.0, 1.0),
    ErrorDirection.MINUS_Y:  ( 0.0,-1.0),
    ErrorDirection.CENTERED: ( 0.0, 0.0),
}

def training_error(direction,magnitude=TRAINING_ERROR):
    (ux,uy) = direction.unit
    return (ux*magnitude,uy*magnitude)

class InsertionPolicy(object):
    '''
    Nearest-centroid classifier of the error direction.
    '''

    def __init__(self,window=ForceTrace.DEFAULT_WINDOW):

        # store params
        self.window         = window

        # local variables
        self._model         = None
        self._centroids     = None

    def __repr__(self):
        return 'InsertionPolicy(fitted={0})'.format(self.fitted)

    #======================== public ==========================================

    @property
    def fitted(self):
        return self._model is not None

    @property
    def centroids(self):
        '''Dictionary of class centroid, keyed by ErrorDirection.'''
        if not self.fitted:
            raise InsertionException(InsertionException.NOT_FITTED)
        return {d:tuple(self._centroids[i]) for (i,d) in enumerate(DIRECTIONS)}

    def fit(self,traces,labels):
        '''
        :param traces: ForceTrace instances.
        :param labels: The ErrorDirection of each trace; every class needs at
                       least one trace.
        '''
        labels  = list(labels)
        missing = [d for d in DIRECTIONS if d not in labels]
        if missing:
            raise ValueError('no trace for {0}'.format(', '.join(str(d) for d in missing)))

        features        = np.array([ForceTrace.trace_features(t,self.window) for t in traces])
        model           = NearestCentroid()
        model.fit(features,np.array([DIRECTIONS.index(d) for d in labels]))
        # classes_ are sorted, so centroid i belongs to DIRECTIONS[i]
        self._model     = model
        self._centroids = np.asarray(model.centroids_)

        if log.isEnabledFor(logging.DEBUG):
            log.debug('centroids {0}'.format(self.centroids))
        return self

    def predict(self,trace,exclude=()):
        '''
        Nearest centroid among the classes not in ``exclude``; ties go to the
        earliest class in :data:`DIRECTIONS`.
        '''
        if not self.fitted:
            raise InsertionException(InsertionException.NOT_FITTED)
        feature   = ForceTrace.trace_features(trace,self.window)
        distances = np.linalg.norm(self._centroids-feature,axis=1)
        for d in exclude:
            distances[DIRECTIONS.index(d)] = np.inf
        return DIRECTIONS[int(np.argmin(distances))]

#============================ fitting =========================================

def _traces(n_per_class,noise,rng):
    traces = []
    labels = []
    for (c,direction) in enumerate(DIRECTIONS):
        for j in range(n_per_class):
            traces.append(ForceTrace.synth_force_trace(training_error(direction),noise,rng.child(c).child(j)))
            labels.append(direction)
    return (traces,labels)

def fit_insertion_policy(n_per_class,noise=ForceTrace.DEFAULT_FORCE_SIGMA,rng=None):
    '''
    Fits the policy on ``n_per_class`` traces at each of the errors
    (+-4, 0), (0, +-4) and (0, 0) mm. Class ``c``, trace ``j`` draws from
    ``rng.child(c).child(j)``.
    '''
    if n_per_class<1:
        raise ValueError('n_per_class must be >= 1')
    (traces,labels) = _traces(n_per_class,noise,rng)
    return InsertionPolicy().fit(traces,labels)

def predict_error_direction(policy,trace,exclude=()):
    return policy.predict(trace,exclude)

@dataclass(frozen=True)
class PolicyEvaluation(object):
    accuracy:   float
    confusion:  tuple       # rows true class, columns predicted, DIRECTIONS order

    def toDict(self):
        return {
            'accuracy':  self.accuracy,
            'classes':   [str(d) for d in DIRECTIONS],
            'confusion': [list(row) for row in self.confusion],
        }

def evaluate_policy(policy,n_per_class,noise=ForceTrace.DEFAULT_FORCE_SIGMA,rng=None):
    '''
    Held-out accuracy and confusion counts on fresh traces.
    '''
    (traces,labels) = _traces(n_per_class,noise,rng)
    predicted       = [policy.predict(t) for t in traces]
    truth           = [DIRECTIONS.index(d) for d in labels]
    guess           = [DIRECTIONS.index(d) for d in predicted]
    matrix          = confusion_matrix(truth,guess,labels=list(range(len(DIRECTIONS))))
    return PolicyEvaluation(
        accuracy  = float(accuracy_score(truth,guess)),
        confusion = tuple(tuple(int(v) for v in row) for row in matrix),
    )

#============================ insertion loop ==================================

@dataclass(frozen=True)
class GearInsertionResult(object):
    success:        bool
    iterations:     int         # corrections made
    residual:       tuple       # mm
    directions:     tuple = ()  # predicted ErrorDirection per correction
    lost:           bool  = False

def insert_gear_loop(true_error,policy,step_mm=DEFAULT_STEP,clearance=DEFAULT_CLEARANCE,
                     max_iters=DEFAULT_MAX_ITERS,noise=ForceTrace.DEFAULT_FORCE_SIGMA,rng=None):
    '''
    Iterative gear insertion.

    While the radial residual exceeds ``clearance``, the attempt fails and
    its trace is classified among the four directional classes; the gear
    then moves ``step_mm`` against the predicted direction. The step on an
    axis is halved each time the move on that axis reverses. Correction
    ``k`` draws its trace noise from ``rng.child(k)``.

    Fails after ``max_iters`` corrections, or as soon as the residual
    exceeds 5 mm on an axis (the gear slid off the peg).
    '''
    if max_iters<1:
        raise ValueError('max_iters must be >= 1')

    residual   = np.array([float(true_error[0]),float(true_error[1])])
    steps      = np.array([step_mm,step_mm],dtype=float)
    lastMove   = np.zeros(2)
    directions = []
    while True:
        k = len(directions)
        if math.hypot(*residual)<=clearance:
            log.info('gear inserted after {0} corrections'.format(k))
            return GearInsertionResult(True,k,tuple(residual),tuple(directions))
        if np.abs(residual).max()>LOST_RESIDUAL:
            log.info('gear lost the peg at residual {0}'.format(tuple(residual)))
            return GearInsertionResult(False,k,tuple(residual),tuple(directions),lost=True)
        if k>=max_iters:
            log.info('gear not inserted after {0} corrections'.format(k))
            return GearInsertionResult(False,k,tuple(residual),tuple(directions))

        trace     = ForceTrace.synth_force_trace(residual,noise,rng.child(k) if rng is not None else None)
        direction = policy.predict(trace,exclude=(ErrorDirection.CENTERED,))
        move      = -np.array(direction.unit)
        for axis in (0,1):
            if move[axis]*lastMove[axis]<0:
                steps[axis] /= 2
            if move[axis]!=0:
                lastMove[axis] = move[axis]
        residual  = residual+move*steps
        directions.append(direction)

        if log.isEnabledFor(logging.DEBUG):
            log.debug('correction {0}: predicted {1}, residual now {2}'.format(k+1,direction,tuple(residual)))
