# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Random-shooting singulation planner.

Each interaction samples slide actions, rolls every sample out on the
planar simulator without slip, and executes the cheapest one. Singulation
ends when both pegs can be grasped.
'''
import logging
log = logging.getLogger('Planner')
log.setLevel(logging.INFO)
log.addHandler(logging.NullHandler())

import math
from dataclasses import dataclass, asdict

from openassembly.openType                import rngStream
from openassembly.SimEngine               import PlanarSim
from openassembly.openType.typePart       import PEGS
from openassembly.SimEngine.PlanarSim     import SlideAction, NO_SLIP, DEFAULT_GRIPPER, MAX_SLIDE
from openassembly.perception              import pcaPose

DEFAULT_NUM_SAMPLES         = 100
DEFAULT_MAX_INTERACTIONS    = 10
TABLE_MARGIN                = 10.0     # mm

@dataclass(frozen=True)
class CostWeights(object):
    '''
    Weights of the slide cost

        c = collision*I_coll - gear*I_gear - separation*dd + center*d_center
            + off_table*I_off - singulation*dn

    ``separation`` and ``center`` are per mm. ``dn`` is the number of target
    pegs the slide makes graspable, less those it makes ungraspable.
    '''

    collision:   float = 10.0
    gear:        float = 1.0
    separation:  float = 0.02
    center:      float = 0.005
    off_table:   float = 10.0
    singulation: float = 8.0

    def __post_init__(self):
        for (name,value) in asdict(self).items():
            if not value>=0:
                raise ValueError('weight {0}={1} must be >= 0'.format(name,value))

DEFAULT_WEIGHTS = CostWeights()

@dataclass(frozen=True)
class CostTerms(object):
    '''
    ``off_table`` also holds when the rollout leaves the part within
    :data:`TABLE_MARGIN` of an edge.
    '''

    collision:          bool
    gear:               bool
    separation_gain:    float   # mm
    center_distance:    float   # mm
    off_table:          bool
    graspable_gain:     int = 0

@dataclass(frozen=True)
class PlanResult(object):
    best_action:        SlideAction
    best_cost:          float
    samples_evaluated:  int
    per_sample_costs:   tuple
    best_index:         int = 0

@dataclass(frozen=True)
class Interaction(object):
    '''
    One planned and executed slide.
    '''

    interaction:        int
    chosen_part:        str
    dx:                 float
    dy:                 float
    cost:               float
    collided:           bool
    slipped:            bool
    off_table:          bool
    pegs_graspable:     bool

    def toDict(self):
        return asdict(self)

@dataclass(frozen=True)
class SingulationResult(object):
    final_scene:        object
    interactions:       int
    success:            bool
    records:            tuple = ()
    off_table:          bool  = False

#============================ cost ============================================

def sample_action(scene,rng):
    '''
    Part uniform over the parts in the scene, then dx and dy uniform over
    [-300, 300] mm.
    '''
    part = scene.classes[int(rng.integers(len(scene.classes)))]
    dx   = float(rng.uniform(-MAX_SLIDE,MAX_SLIDE))
    dy   = float(rng.uniform(-MAX_SLIDE,MAX_SLIDE))
    return SlideAction(part,dx,dy)

def _separationGain(before,after,part):
    d0 = PlanarSim.min_clearance(before,part)
    d1 = PlanarSim.min_clearance(after,part)
    if math.isinf(d0) or math.isinf(d1):
        return 0.0
    return d1-d0

def graspable_count(scene,targets=None,gripper=DEFAULT_GRIPPER):
    '''
    Number of ``targets``, the pegs by default, on the table and graspable.
    '''
    return sum(1 for t in (targets or PEGS) if scene.has(t) and PlanarSim.graspable(scene,t,gripper))

def _nearEdge(scene,pose,margin):
    w = scene.workspace
    return not (margin<=pose.x<=w.width-margin and margin<=pose.y<=w.height-margin)

def cost_terms(scene,action,step_mm=PlanarSim.DEFAULT_STEP,targets=None,gripper=DEFAULT_GRIPPER,graspable_before=None):
    '''
    Evaluates the cost terms of ``action`` on a zero-slip rollout.

    ``graspable_before`` is :func:`graspable_count` on ``scene``, computed
    here when not given.
    '''
    outcome = PlanarSim.apply_slide(scene,action,NO_SLIP,None,step_mm)
    final   = outcome.final_scene.pose(action.o)
    (cx,cy) = scene.workspace.center
    offEdge = outcome.off_table or _nearEdge(scene,final,TABLE_MARGIN)
    if offEdge:
        gain = 0
    else:
        if graspable_before is None:
            graspable_before = graspable_count(scene,targets,gripper)
        gain = graspable_count(outcome.final_scene,targets,gripper)-graspable_before
    return CostTerms(
        collision       = outcome.collided,
        gear            = action.o.isGear,
        separation_gain = _separationGain(scene,outcome.final_scene,action.o),
        center_distance = math.hypot(final.x-cx,final.y-cy),
        off_table       = offEdge,
        graspable_gain  = gain,
    )

def cost_from_terms(terms,weights=DEFAULT_WEIGHTS):
    return (
          weights.collision*terms.collision
        - weights.gear*terms.gear
        - weights.separation*terms.separation_gain
        + weights.center*terms.center_distance
        + weights.off_table*terms.off_table
        - weights.singulation*terms.graspable_gain
    )

def action_cost(scene,action,weights=DEFAULT_WEIGHTS,step_mm=PlanarSim.DEFAULT_STEP,targets=None,gripper=DEFAULT_GRIPPER):
    return cost_from_terms(cost_terms(scene,action,step_mm,targets,gripper),weights)

#============================ planning ========================================

def plan(scene,weights=DEFAULT_WEIGHTS,n_samples=DEFAULT_NUM_SAMPLES,rng=None,step_mm=PlanarSim.DEFAULT_STEP,
         targets=None,gripper=DEFAULT_GRIPPER):
    '''
    Random shooting: evaluates ``n_samples`` sampled actions in sample order
    and returns the cheapest, the earliest on ties.
    '''
    if n_samples<1:
        raise ValueError('n_samples must be >= 1')

    before    = graspable_count(scene,targets,gripper)
    bestIndex = 0
    bestCost  = math.inf
    actions   = []
    costs     = []
    for i in range(n_samples):
        action = sample_action(scene,rng)
        cost   = cost_from_terms(cost_terms(scene,action,step_mm,targets,gripper,before),weights)
        actions.append(action)
        costs.append(cost)
        if cost<bestCost:
            (bestIndex,bestCost) = (i,cost)

    if log.isEnabledFor(logging.DEBUG):
        log.debug('best of {0}: #{1} {2} cost={3:.4f}'.format(n_samples,bestIndex,actions[bestIndex],bestCost))

    return PlanResult(
        best_action       = actions[bestIndex],
        best_cost         = bestCost,
        samples_evaluated = n_samples,
        per_sample_costs  = tuple(costs),
        best_index        = bestIndex,
    )

def singulate(scene,weights=DEFAULT_WEIGHTS,n_samples=DEFAULT_NUM_SAMPLES,
              max_interactions=DEFAULT_MAX_INTERACTIONS,gripper=DEFAULT_GRIPPER,
              slip_model=None,rng=None,perceive=False,
              n_points=pcaPose.DEFAULT_NUM_POINTS,noise_sigma=pcaPose.DEFAULT_NOISE_SIGMA,
              step_mm=PlanarSim.DEFAULT_STEP,targets=None):
    '''
    Slides parts apart until both pegs are graspable, or every part of
    ``targets`` when given.

    Planning and the graspability check run on the observed scene, which is
    the true scene itself or, with ``perceive``, its re-perceived estimate.
    The chosen slide is executed on the true scene with slip.

    ``rng`` is the root stream; interaction ``k`` plans from the
    ``planner`` stream, slips from the ``slip`` stream and perceives from
    the ``perception`` stream, all with child index ``k``.

    Fails when ``max_interactions`` slides did not singulate the pegs or a
    part left the table.
    '''
    if max_interactions<0:
        raise ValueError('max_interactions must be >= 0')
    slip_model = slip_model or PlanarSim.SlipModel()

    planner    = rng.sibling(rngStream.PLANNER)
    slip       = rng.sibling(rngStream.SLIP)
    perception = rng.sibling(rngStream.PERCEPTION)

    def singulated(observed):
        if targets is None:
            return PlanarSim.all_pegs_graspable(observed,gripper)
        return all(PlanarSim.graspable(observed,t,gripper) for t in targets if observed.has(t))

    def observe(truth,k):
        if not perceive:
            return truth
        return pcaPose.perceive_scene(truth,perception.child(k),n_points,noise_sigma)[0]

    truth      = scene
    observed   = observe(truth,0)
    records    = []
    while True:
        k = len(records)
        if singulated(observed):
            log.info('singulated after {0} interactions'.format(k))
            return SingulationResult(truth,k,True,tuple(records))
        if k>=max_interactions:
            log.info('not singulated after {0} interactions'.format(k))
            return SingulationResult(truth,k,False,tuple(records))

        result   = plan(observed,weights,n_samples,planner.child(k),step_mm,targets,gripper)
        action   = result.best_action
        outcome  = PlanarSim.apply_slide(truth,action,slip_model,slip.child(k),step_mm)
        truth    = outcome.final_scene

        if not outcome.off_table:
            observed = observe(truth,k+1)
        records.append(Interaction(
            interaction     = k+1,
            chosen_part     = action.o.value,
            dx              = action.dx,
            dy              = action.dy,
            cost            = result.best_cost,
            collided        = outcome.collided,
            slipped         = outcome.slipped,
            off_table       = outcome.off_table,
            pegs_graspable  = (not outcome.off_table) and singulated(observed),
        ))

        if log.isEnabledFor(logging.DEBUG):
            log.debug('interaction {0}: {1} cost={2:.4f} slipped={3}'.format(k+1,action,result.best_cost,outcome.slipped))

        if outcome.off_table:
            log.warning('{0} left the table at interaction {1}'.format(action.o,k+1))
            return SingulationResult(truth,k+1,False,tuple(records),off_table=True)
