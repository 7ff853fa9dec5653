# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Meshing the small gear with the large gear.

A compliant force controller presses the small gear down and rotates it.
Friction at the tooth tips drags the large gear along by a fraction rho of
the rotation, so the relative tooth offset advances by (1-rho) times the
small gear's rotation. The gears mesh as soon as the offset comes within
``tol_angle`` of alignment.
'''
import logging
log = logging.getLogger('Meshing')
log.setLevel(logging.INFO)
log.addHandler(logging.NullHandler())

import math
from dataclasses import dataclass

from openassembly.openType.typePart     import PartClass, geometry

MAX_ATTEMPTS        = 5
DEFAULT_RHO         = 0.7
NOMINAL_FORCE       = 10.0      # N
NOMINAL_RADIUS      = 20.0      # mm
FORCE_SCALE         = 5.0       # N
JAMMING_FORCE       = 30.0      # N
SWEEP_PITCHES       = 1.2       # small gear rotation per attempt at nominal, in tooth pitches
TOLERANCE_PITCHES   = 0.05

def pitch_angle():
    '''Tooth pitch angle of the meshing interface, rad.'''
    return geometry(PartClass.GEAR_SMALL).tooth_pitch_angle

def default_tolerance():
    return TOLERANCE_PITCHES*pitch_angle()

@dataclass(frozen=True)
class MeshController(object):
    '''
    Compliant controller ``u(f, r_d)``: downward force ``f`` and rotation
    radius ``r_d`` of the small gear's rotation.
    '''

    force:      float = NOMINAL_FORCE   # N
    radius:     float = NOMINAL_RADIUS  # mm

    def __post_init__(self):
        if not (self.force>0 and self.radius>0):
            raise ValueError('controller force and radius must be positive')

    @staticmethod
    def _gain(force):
        return 1.0-math.exp(-force/FORCE_SCALE)

    def sweep_angle(self,pitch=None):
        '''Small gear rotation per attempt, rad.'''
        pitch = pitch_angle() if pitch is None else pitch
        scale = (self._gain(self.force)/self._gain(NOMINAL_FORCE))*(self.radius/NOMINAL_RADIUS)
        return SWEEP_PITCHES*pitch*scale

    def transmission(self,rho):
        '''
        Friction transmission under this controller: ``rho`` up to the
        nominal force, then rising linearly to 1 at the jamming force.
        '''
        if self.force<=NOMINAL_FORCE:
            return rho
        load = min(1.0,(self.force-NOMINAL_FORCE)/(JAMMING_FORCE-NOMINAL_FORCE))
        return rho+(1.0-rho)*load

DEFAULT_CONTROLLER = MeshController()

@dataclass(frozen=True)
class MeshState(object):
    theta:      float   # rad, relative tooth offset
    attempts:   int = 0

    def __post_init__(self):
        if not 0<=self.theta<pitch_angle():
            raise ValueError('tooth offset {0} outside [0, pitch)'.format(self.theta))
        if not 0<=self.attempts<=MAX_ATTEMPTS:
            raise ValueError('{0} attempts, at most {1}'.format(self.attempts,MAX_ATTEMPTS))

@dataclass(frozen=True)
class MeshResult(object):
    success:        bool
    attempts:       int
    final_state:    MeshState
    rotation:       float   # rad, total small gear rotation

def _aligned(theta,pitch,tol):
    return theta<=tol or theta>=pitch-tol

def meshing_success_region(theta0,relative_sweep,pitch=None,tol_angle=None,max_attempts=MAX_ATTEMPTS):
    '''
    Closed form of :func:`mesh_gears`: the gears mesh within
    ``max_attempts`` iff the offset starts aligned or the accumulated
    relative sweep reaches the far edge of the alignment window.
    '''
    pitch     = pitch_angle() if pitch is None else pitch
    tol_angle = default_tolerance() if tol_angle is None else tol_angle
    return _aligned(theta0,pitch,tol_angle) or theta0+max_attempts*relative_sweep>=pitch-tol_angle

def draw_initial_offset(rng,pitch=None):
    pitch = pitch_angle() if pitch is None else pitch
    return float(rng.uniform(0.0,pitch))%pitch

def mesh_gears(theta0,controller=DEFAULT_CONTROLLER,rho=DEFAULT_RHO,tol_angle=None,rng=None,
               sweep_jitter=0.0,max_attempts=MAX_ATTEMPTS):
    '''
    Rotates the small gear attempt by attempt until the teeth align.

    Alignment is checked continuously during each sweep, so the first
    attempt whose sweep carries the offset to ``pitch - tol_angle`` succeeds
    and the gear stops there. An offset that starts aligned meshes on the
    first attempt without rotation.

    With ``rng`` and a positive ``sweep_jitter`` each attempt's sweep is
    scaled by ``1 + sweep_jitter*N(0,1)``, floored at zero; attempt ``k``
    draws from ``rng.child(k)``.
    '''
    pitch     = pitch_angle()
    tol_angle = default_tolerance() if tol_angle is None else tol_angle
    if not 0<=theta0<pitch:
        raise ValueError('theta0 {0} outside [0, pitch)'.format(theta0))
    if not 0<rho<1:
        raise ValueError('rho must lie in (0, 1)')

    if _aligned(theta0,pitch,tol_angle):
        return MeshResult(True,1,MeshState(0.0,1),0.0)

    sweep     = controller.sweep_angle(pitch)
    relative  = 1.0-controller.transmission(rho)
    theta     = theta0
    rotation  = 0.0
    for attempt in range(1,max_attempts+1):
        s = sweep
        if rng is not None and sweep_jitter>0:
            s = max(0.0,sweep*(1.0+sweep_jitter*float(rng.child(attempt).normal())))
        needed = pitch-tol_angle-theta
        if relative*s>=needed:
            rotation += needed/relative
            if log.isEnabledFor(logging.DEBUG):
                log.debug('meshed at attempt {0} after {1:.4f} rad'.format(attempt,rotation))
            return MeshResult(True,attempt,MeshState(0.0,attempt),rotation)
        theta     = (theta+relative*s)%pitch
        rotation += s

    log.info('gears not meshed after {0} attempts, offset {1:.4f} rad'.format(max_attempts,theta))
    return MeshResult(False,max_attempts,MeshState(theta,max_attempts),rotation)
