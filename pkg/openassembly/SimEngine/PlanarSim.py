# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Planar kinematic simulator of the manipulation surface.

Parts are represented by their circumscribed footprint discs. A slide moves
one part along a straight segment; the path is checked for contact at
regular interpolation steps, the execution may slip and stop early, and
parts contacted at the end of the slide are pushed out of the way.
'''
import logging
log = logging.getLogger('PlanarSim')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import functools
import math
from dataclasses import dataclass

import numpy as np

from openassembly.openType.typePart    import PartClass, PEGS, footprint_radius, geometry
from openassembly.openType.typePose    import Pose2D
from openassembly.openType.typeScene   import CONTACT_EPSILON

MAX_SLIDE           = 300.0     # mm, per axis
DEFAULT_STEP        = 1.0       # mm
DEFAULT_P_SLIP      = 0.15
NUM_GRASP_ANGLES    = 16

@dataclass(frozen=True)
class SlideAction(object):
    '''
    Slide part ``o`` by ``(dx, dy)`` mm.
    '''

    o:      PartClass
    dx:     float
    dy:     float

    def __post_init__(self):
        object.__setattr__(self,'o',PartClass(self.o))
        if not (abs(self.dx)<=MAX_SLIDE and abs(self.dy)<=MAX_SLIDE):
            raise ValueError('slide ({0}, {1}) exceeds {2} mm'.format(self.dx,self.dy,MAX_SLIDE))

    def __str__(self):
        return '{0} by ({1:.1f}, {2:.1f}) mm'.format(self.o,self.dx,self.dy)

    @property
    def length(self):
        return math.hypot(self.dx,self.dy)

@dataclass(frozen=True)
class SlideOutcome(object):
    '''
    Result of executing a slide.

    ``blocked`` is set when the contacted parts could not be pushed clear and
    the moved part was stopped at its last contact-free position instead.
    ``executed_fraction`` is 1 iff the slide was neither slipped, off the
    table nor blocked.
    '''

    final_scene:        object
    collided:           bool
    slipped:            bool
    off_table:          bool
    executed_fraction:  float
    blocked:            bool  = False
    pushed:             tuple = ()

@dataclass(frozen=True)
class SlipModel(object):
    '''
    With probability ``p_slip`` the contact slips at a fraction of the path
    drawn uniformly from (0, 1) and the part stops there.
    '''

    p_slip:     float = DEFAULT_P_SLIP

    def __post_init__(self):
        if not 0.0<=self.p_slip<=1.0:
            raise ValueError('p_slip {0} outside [0,1]'.format(self.p_slip))

    def draw(self,rng):
        '''
        :returns: ``None`` if the slide executes fully, else the fraction at
                  which it stops. Consumes two draws unless ``p_slip`` is 0,
                  in which case ``rng`` may be ``None``.
        '''
        if self.p_slip<=0.0:
            return None
        u        = rng.random()
        fraction = rng.uniform(0.0,1.0)
        if u<self.p_slip and fraction>0.0:
            return float(fraction)
        return None

NO_SLIP = SlipModel(0.0)

@dataclass(frozen=True)
class GripperFootprint(object):
    '''
    Two finger discs of radius ``finger_radius`` placed at
    +/- ``opening``/2 along the closing direction.
    '''

    finger_radius:  float = 10.0
    opening:        float = 70.0

    def __post_init__(self):
        if self.finger_radius<=0:
            raise ValueError('finger radius must be positive')
        if self.opening<=0:
            raise ValueError('opening must be positive')

    @property
    def half_opening(self):
        return self.opening/2

    def fits(self,part):
        return self.opening>=geometry(part).grasp_width

    def fingers(self,center,angle):
        (cx,cy) = center
        ox      = self.half_opening*math.cos(angle)
        oy      = self.half_opening*math.sin(angle)
        return ((cx+ox,cy+oy),(cx-ox,cy-oy))

DEFAULT_GRIPPER = GripperFootprint()

#============================ helpers =========================================

@functools.lru_cache(maxsize=256)
def _obstacles(scene,part):
    '''
    Centers and footprint radii of every part but ``part``.
    '''
    others  = scene.others(part)
    centers = np.array([p.position for (_,p) in others],dtype=float).reshape(-1,2)
    radii   = np.array([footprint_radius(c) for (c,_) in others],dtype=float)
    return (centers,radii)

def _path(start,action,step_mm):
    '''
    Interpolation points k/n of the path, k = 1..n, spacing <= step_mm.
    '''
    n  = max(1,int(math.ceil(action.length/step_mm)))
    ks = np.arange(1,n+1)/n
    return (ks,np.column_stack((start.x+ks*action.dx,start.y+ks*action.dy)))

def _contacts(points,centers,rsum):
    '''
    Boolean (n,m) matrix of contact between path points and obstacles.
    '''
    if not len(centers):
        return np.zeros((len(points),0),dtype=bool)
    dist = np.linalg.norm(points[:,None,:]-centers[None,:,:],axis=2)
    return dist<=rsum[None,:]+CONTACT_EPSILON

def min_clearance(scene,part,position=None):
    '''
    Smallest center distance from ``part`` (or ``position``) to any other
    part, ``inf`` if the part is alone.
    '''
    (centers,_) = _obstacles(scene,part)
    if not len(centers):
        return math.inf
    if position is None:
        position = scene.pose(part).position
    return float(np.min(np.linalg.norm(centers-np.asarray(position,dtype=float),axis=1)))

#============================ public ==========================================

def sweep_collides(scene,action,step_mm=DEFAULT_STEP):
    '''
    True iff the moved part's footprint touches another footprint at any
    interpolation step of the slide (start excluded). Tangency counts as
    collision.
    '''
    if step_mm<=0:
        raise ValueError('step_mm must be positive')
    start = scene.pose(action.o)
    if action.length==0:
        return False
    (centers,radii) = _obstacles(scene,action.o)
    (_,points)      = _path(start,action,step_mm)
    return bool(_contacts(points,centers,radii+footprint_radius(action.o)).any())

def _exit_fraction(start,action,workspace):
    '''
    Fraction of the path at which the center crosses the workspace edge.
    '''
    t = 1.0
    for (p,d,hi) in ((start.x,action.dx,workspace.width),(start.y,action.dy,workspace.height)):
        if d>0 and p+d>hi:
            t = min(t,(hi-p)/d)
        elif d<0 and p+d<0:
            t = min(t,-p/d)
    return max(0.0,t)

def _push_apart(scene,moved,positions):
    '''
    Pushes parts overlapping at ``positions`` along the contact normal by the
    penetration depth, cascading over at most ``len(positions)`` passes. The
    moved part never moves.

    :returns: the set of pushed parts, or ``None`` if overlaps remain or a
              pushed part left the table.
    '''
    order  = list(positions)
    pushed = set()
    for _ in range(len(order)):
        clean = True
        for (i,a) in enumerate(order):
            for b in order[i+1:]:
                (ax,ay) = positions[a]
                (bx,by) = positions[b]
                rsum    = footprint_radius(a)+footprint_radius(b)
                dist    = math.hypot(bx-ax,by-ay)
                if dist>=rsum-CONTACT_EPSILON:
                    continue
                clean   = False
                # the moved part, then an already pushed part, stays put
                if b==moved or (b in pushed and a!=moved and a not in pushed):
                    (anchor,target) = ((bx,by),a)
                else:
                    (anchor,target) = ((ax,ay),b)
                (tx,ty)  = positions[target]
                if dist>0:
                    (nx,ny) = ((tx-anchor[0])/dist,(ty-anchor[1])/dist)
                else:
                    (nx,ny) = (1.0,0.0)
                depth    = rsum-dist
                positions[target] = (tx+nx*depth,ty+ny*depth)
                pushed.add(target)
        if clean:
            break
    for part in pushed:
        if not scene.workspace.contains(*positions[part]):
            return None
    for (i,a) in enumerate(order):
        for b in order[i+1:]:
            if math.dist(positions[a],positions[b])<footprint_radius(a)+footprint_radius(b)-CONTACT_EPSILON:
                return None
    return pushed

def apply_slide(scene,action,slip_model,rng,step_mm=DEFAULT_STEP):
    '''
    Executes a slide.

    The slip draw is made first. A part whose center leaves the workspace is
    off the table and stays in the returned scene at its end position.
    Otherwise parts overlapping the moved part at its end position are
    pushed clear; if that fails the moved part stops at its last
    contact-free interpolation step.
    '''
    start     = scene.pose(action.o)
    collided  = sweep_collides(scene,action,step_mm)
    stop      = slip_model.draw(rng)
    slipped   = stop is not None
    fraction  = stop if slipped else 1.0

    exitAt    = _exit_fraction(start,action,scene.workspace)
    offTable  = exitAt<fraction
    if offTable:
        endPose = start.translated(fraction*action.dx,fraction*action.dy)
        outcome = SlideOutcome(
            final_scene       = scene.with_pose(action.o,endPose),
            collided          = collided,
            slipped           = slipped,
            off_table         = True,
            executed_fraction = exitAt,
        )
        if log.isEnabledFor(logging.DEBUG):
            log.debug('{0}: off the table at fraction {1:.3f}'.format(action,exitAt))
        return outcome

    endPose   = start.translated(fraction*action.dx,fraction*action.dy)
    positions = {c: p.position for (c,p) in scene.parts}
    positions[action.o] = endPose.position
    pushed    = _push_apart(scene,action.o,positions)

    if pushed is None:
        # stop at the last contact-free step
        (centers,radii) = _obstacles(scene,action.o)
        (ks,points)     = _path(start,action,step_mm)
        hits            = _contacts(points,centers,radii+footprint_radius(action.o)).any(axis=1)
        clear           = np.logical_and.accumulate(~hits) & (ks<=fraction)
        fraction        = float(ks[clear][-1]) if clear.any() else 0.0
        outcome         = SlideOutcome(
            final_scene       = scene.with_pose(action.o,start.translated(fraction*action.dx,fraction*action.dy)),
            collided          = collided,
            slipped           = slipped,
            off_table         = False,
            executed_fraction = fraction,
            blocked           = True,
        )
    else:
        poses   = {c: Pose2D(positions[c][0],positions[c][1],p.yaw) for (c,p) in scene.parts if c in pushed}
        poses[action.o] = endPose
        outcome = SlideOutcome(
            final_scene       = scene.with_poses(poses),
            collided          = collided,
            slipped           = slipped,
            off_table         = False,
            executed_fraction = fraction,
            pushed            = tuple(sorted(pushed,key=lambda c: scene.classes.index(c))),
        )

    if log.isEnabledFor(logging.DEBUG):
        log.debug('{0}: fraction={1:.3f} collided={2} slipped={3} pushed={4} blocked={5}'.format(
            action,outcome.executed_fraction,collided,slipped,
            [str(c) for c in outcome.pushed],outcome.blocked))
    return outcome

def grasp_angles(scene,part):
    '''
    Closing directions tried for ``part``: the peg's minor axis, or 16
    uniform angles over a half turn for gears (finger pairs are symmetric).
    '''
    pose = scene.pose(part)
    if part.isPeg:
        return (pose.yaw,)
    return tuple(k*math.pi/NUM_GRASP_ANGLES for k in range(NUM_GRASP_ANGLES))

def graspable(scene,part,gripper=DEFAULT_GRIPPER):
    '''
    True iff some grasp angle puts both finger discs in bounds and clear of
    every other part's footprint. Pegs are grasped across their axis, gears
    at their hub.
    '''
    pose = scene.pose(part)
    if not gripper.fits(part):
        return False
    (centers,radii) = _obstacles(scene,part)
    rsum            = radii+gripper.finger_radius
    for angle in grasp_angles(scene,part):
        fingers = gripper.fingers(pose.position,angle)
        if not all(scene.workspace.contains(x,y) for (x,y) in fingers):
            continue
        if _contacts(np.array(fingers),centers,rsum).any():
            continue
        return True
    return False

def all_pegs_graspable(scene,gripper=DEFAULT_GRIPPER):
    '''
    Conjunction of :func:`graspable` over the pegs still on the table.
    '''
    return all(graspable(scene,peg,gripper) for peg in PEGS if scene.has(peg))
