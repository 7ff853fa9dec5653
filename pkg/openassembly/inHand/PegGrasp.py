# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Peg grasping, in-hand reorientation and peg insertion.

The peg is grasped off its center of mass, so gravity pivots it to hang
vertically between the fingers. The pivot is quasi-static: the peg turns
iff the gravity torque about the grip line exceeds the friction torque the
pads can hold.
'''
import logging
log = logging.getLogger('PegGrasp')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

from dataclasses import dataclass, replace

from openassembly.openType.typePart      import PartClass, PEG_LENGTH, PEG_DIAMETER, geometry
from openassembly.openType.typePose      import Pose2D
from openassembly.openType.typeScene     import WorkspaceConfig
from openassembly.inHand.GraspException  import GraspException

GRAVITY             = 9.81  # m/s^2
MAX_GRASP_ERROR     = 10.0  # mm

@dataclass(frozen=True)
class GraspConfig(object):
    '''
    The configured grasp and the peg's physical constants.
    '''

    x_p:        float = 20.0    # mm along the peg axis from the center of mass
    z_p:        float = 7.0     # mm height on the peg
    f_p:        float = 8.0     # N
    mass:       float = 0.1     # kg
    friction:   float = 0.5
    pad_radius: float = 5.0     # mm

    def __post_init__(self):
        if self.x_p==0:
            raise GraspException(GraspException.BAD_GRASP_CONFIG,'x_p=0 gives no moment arm')
        if abs(self.x_p)>PEG_LENGTH/2:
            raise GraspException(GraspException.BAD_GRASP_CONFIG,'x_p={0} beyond the peg end'.format(self.x_p))
        if not 0<=self.z_p<=PEG_DIAMETER:
            raise GraspException(GraspException.BAD_GRASP_CONFIG,'z_p={0} off the peg'.format(self.z_p))
        for name in ('f_p','mass','friction','pad_radius'):
            if not getattr(self,name)>0:
                raise GraspException(GraspException.BAD_GRASP_CONFIG,'{0} must be positive'.format(name))

DEFAULT_GRASP_CONFIG = GraspConfig()

@dataclass(frozen=True)
class PegGrasp(object):
    '''
    Grasp ``l_p = (x_p, z_p)`` with force ``f_p``, expressed in the frame
    ``peg_pose`` of the estimated peg.
    '''

    x_p:        float
    z_p:        float
    f_p:        float
    peg_pose:   Pose2D = Pose2D(0.0,0.0,0.0)

    def __post_init__(self):
        if abs(self.x_p)>PEG_LENGTH/2:
            raise GraspException(GraspException.BAD_GRASP_CONFIG,'|x_p| > peg_length/2')
        if not self.f_p>0:
            raise GraspException(GraspException.BAD_GRASP_CONFIG,'f_p must be positive')

    @property
    def grasp_point(self):
        '''Grasp point on the table, the peg axis being the local y axis.'''
        return self.peg_pose.transform_point((0.0,self.x_p))

@dataclass(frozen=True)
class GraspState(object):
    '''
    A grasped peg: the in-hand offset ``dx`` along the gripper x axis, the
    correction applied against it and whether it hangs vertically.
    '''

    grasped_part:   PartClass
    in_hand_offset: float
    reoriented:     bool
    correction_mm:  float = 0.0

    def __post_init__(self):
        if abs(self.in_hand_offset)>MAX_GRASP_ERROR:
            raise ValueError('in-hand offset {0} beyond {1} mm'.format(self.in_hand_offset,MAX_GRASP_ERROR))

    @property
    def residual(self):
        return self.in_hand_offset-self.correction_mm

    def corrected(self,correction):
        return replace(self,correction_mm=float(correction))

#============================ grasp ===========================================

def plan_peg_grasp(estimate,peg_geometry=None,config=DEFAULT_GRASP_CONFIG):
    '''
    The configured grasp placed in the estimated peg frame.

    :raises: GraspException ``NOT_A_PEG`` for gear or degenerate estimates.
    '''
    if not estimate.label.isPeg or estimate.degenerate:
        raise GraspException(GraspException.NOT_A_PEG,str(estimate.label))
    peg_geometry = peg_geometry or geometry(estimate.label)
    if abs(config.x_p)>peg_geometry.peg_length/2:
        raise GraspException(GraspException.BAD_GRASP_CONFIG,'x_p beyond the peg end')
    return PegGrasp(config.x_p,config.z_p,config.f_p,estimate.pose)

def gravity_torque(grasp,mass):
    '''N*mm'''
    return mass*GRAVITY*abs(grasp.x_p)

def holding_torque(grasp,friction,pad_radius):
    '''
    Friction torque of a uniformly loaded circular pad, N*mm.
    '''
    return friction*grasp.f_p*(2.0/3.0)*pad_radius

def simulate_reorientation(grasp,peg=None,friction=DEFAULT_GRASP_CONFIG.friction,
                           mass=DEFAULT_GRASP_CONFIG.mass,pad_radius=DEFAULT_GRASP_CONFIG.pad_radius):
    '''
    Quasi-static pivot: the peg swings to vertical iff gravity torque about
    the grip line exceeds the holding torque.
    '''
    if not (friction>0 and mass>0 and pad_radius>0):
        raise GraspException(GraspException.BAD_GRASP_CONFIG,'friction, mass and pad radius must be positive')
    if peg is not None and abs(grasp.x_p)>peg.peg_length/2:
        raise GraspException(GraspException.BAD_GRASP_CONFIG,'x_p beyond the peg end')
    tg = gravity_torque(grasp,mass)
    th = holding_torque(grasp,friction,pad_radius)
    if log.isEnabledFor(logging.DEBUG):
        log.debug('gravity torque {0:.3f} N*mm, holding torque {1:.3f} N*mm'.format(tg,th))
    return tg>th

def inject_grasp_error(rng,max_error=MAX_GRASP_ERROR):
    '''
    In-hand offset along the gripper x axis, uniform on [-10, 10] mm.
    '''
    return float(rng.uniform(-max_error,max_error))

#============================ insertion =======================================

def radial_clearance(workspace=None,peg_diameter=PEG_DIAMETER):
    workspace = workspace or WorkspaceConfig()
    return (workspace.hole_diameter-peg_diameter)/2

def insert_peg(grasp_state,hole=None,clearance=None):
    '''
    Single corrected placement over ``hole``: succeeds iff the residual
    offset is within the radial clearance, boundary included.
    '''
    if not grasp_state.reoriented:
        raise GraspException(GraspException.NOT_REORIENTED,str(grasp_state.grasped_part))
    if clearance is None:
        clearance = radial_clearance()
    success = abs(grasp_state.residual)<=clearance
    if log.isEnabledFor(logging.DEBUG):
        log.debug('{0} into hole {1}: residual {2:.3f} mm -> {3}'.format(
            grasp_state.grasped_part,hole,grasp_state.residual,'ok' if success else 'fail'))
    return success
