# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
The closed-loop assembly controller.

A run perceives the table, singulates the parts, then grasps, reorients,
corrects and inserts each peg, grasps and inserts each gear and finally
meshes the gears. Every stage reports success or failure; failed grasps and
insertions are retried after re-perceiving the table, until the part's retry
budget runs out.

Each executed stage advances the simulated clock by its configured duration
and is published as a PipelineEvent on the ``pipelineEvent`` signal.
'''
import logging
log = logging.getLogger('assemblyState')
log.setLevel(logging.INFO)
log.addHandler(logging.NullHandler())

import enum
import json
from dataclasses import dataclass, field, replace

from openassembly.eventBus                  import eventBusClient
from openassembly.openType                  import rngStream
from openassembly.openType.rngStream        import RngStream
from openassembly.openType.typePart         import PEGS, GEARS, geometry
from openassembly.openType.typeScene        import Scene, validate_scene
from openassembly.SimEngine.SimEngine       import SimEngine
from openassembly.SimEngine.PlanarSim       import SlipModel
from openassembly.perception                import pcaPose
from openassembly.singulation               import Planner
from openassembly.inHand                    import PegGrasp, OffsetEstimator
from openassembly.inHand.GraspException     import GraspException
from openassembly.insertion                 import InsertionPolicy, Meshing
from openassembly.assemblyState.PipelineConfig import PipelineConfig

SIGNAL_PIPELINE_EVENT = 'pipelineEvent'

OUTCOME_OK    = 'ok'
OUTCOME_RETRY = 'retry'
OUTCOME_FAIL  = 'fail'

class StageKind(enum.Enum):
    PERCEIVE        = 'Perceive'
    SINGULATE       = 'Singulate'
    GRASP_PEG       = 'GraspPeg'
    REORIENT        = 'Reorient'
    ESTIMATE_OFFSET = 'EstimateOffset'
    INSERT_PEG      = 'InsertPeg'
    GRASP_GEAR      = 'GraspGear'
    INSERT_GEAR     = 'InsertGear'
    MESH_GEARS      = 'MeshGears'
    DONE            = 'Done'
    FAILED          = 'Failed'

@dataclass(frozen=True)
class Stage(object):
    '''
    A pipeline stage. ``part`` names the peg or gear of per-part stages, or
    the gear a singulation is run for. ``cause`` names the failed stage of
    a Failed state.
    '''

    kind:   StageKind
    part:   object = None
    cause:  str    = None

    def __str__(self):
        if self.kind==StageKind.FAILED:
            return 'Failed({0})'.format(self.cause)
        if self.part is None:
            return self.kind.value
        return '{0}({1})'.format(self.kind.value,self.part)

    @property
    def terminal(self):
        return self.kind in (StageKind.DONE,StageKind.FAILED)

DONE = Stage(StageKind.DONE)

@dataclass(frozen=True)
class PipelineEvent(object):
    seq:            int
    stage:          str
    outcome:        str
    sim_time_s:     float
    wall_time_s:    float
    detail:         dict = field(default_factory=dict)

    def toDict(self):
        return {
            'seq':          self.seq,
            'stage':        self.stage,
            'outcome':      self.outcome,
            'sim_time_s':   self.sim_time_s,
            'wall_time_s':  self.wall_time_s,
            'detail':       self.detail,
        }

    def replay_key(self):
        '''
        The event without its wall time, which differs from run to run.
        '''
        content = self.toDict()
        del content['wall_time_s']
        return json.dumps(content,sort_keys=True)

@dataclass(frozen=True)
class PipelineState(object):
    '''
    Everything a run carries between stages. ``truth`` holds the parts still
    on the table; ``held`` is the part in the gripper with the pose it was
    picked from; ``resume`` is the stage a re-perception leads back to.
    '''

    stage:          Stage
    truth:          object
    resume:         Stage  = None
    observed:       object = None
    estimates:      dict   = field(default_factory=dict)
    inserted:       tuple  = ()
    failures:       dict   = field(default_factory=dict)
    held:           tuple  = None
    planned_grasp:  object = None
    peg_grasp:      object = None
    gear_error:     tuple  = None
    steps:          int    = 0
    failure:        tuple  = None   # (failed stage, cause)

    @property
    def terminal(self):
        return self.stage.terminal

class assemblyState(eventBusClient.eventBusClient):
    '''
    Runs the assembly pipeline on one scene.

    :param estimator: A fitted OffsetEstimator; fitted from the config when
                      omitted.
    :param policy:    A fitted InsertionPolicy; fitted from the config when
                      omitted.
    :param mesher:    Replaces :func:`Meshing.mesh_gears`.
    :param graspConfig: The peg grasp, :data:`PegGrasp.DEFAULT_GRASP_CONFIG`
                      when omitted.
    '''

    def __init__(self,config=None,estimator=None,policy=None,mesher=None,runId=None,graspConfig=None,
                 loghandler=logging.NullHandler()):

        # log
        log.info("create instance")

        # store params
        self.config          = config or PipelineConfig()
        self.mesher          = mesher or Meshing.mesh_gears

        # local variables
        self.engine          = SimEngine(
            slip_model       = SlipModel(self.config.p_slip if self.config.slip else 0.0),
            loghandler       = loghandler,
        )
        self.graspConfig     = graspConfig or PegGrasp.DEFAULT_GRASP_CONFIG
        self.meshController  = Meshing.MeshController(self.config.mesh_force,self.config.mesh_radius)
        self.estimator       = estimator
        self.policy          = policy
        self.events          = []

        if self.estimator is None and self.config.use_offset_estimator and self.config.offset_train_size>0:
            self.estimator   = OffsetEstimator.fit_offset_estimator(
                self.config.offset_train_size,
                self.config.tactile_sigma,
                RngStream(self.config.seed,'offset-training'),
            )
        if self.policy is None:
            self.policy      = InsertionPolicy.fit_insertion_policy(
                max(1,self.config.policy_per_class),
                self.config.force_sigma,
                RngStream(self.config.seed,'policy-training'),
            )

        self.handlers = {
            StageKind.PERCEIVE:        self._perceive,
            StageKind.SINGULATE:       self._singulate,
            StageKind.GRASP_PEG:       self._graspPeg,
            StageKind.REORIENT:        self._reorient,
            StageKind.ESTIMATE_OFFSET: self._estimateOffset,
            StageKind.INSERT_PEG:      self._insertPeg,
            StageKind.GRASP_GEAR:      self._graspGear,
            StageKind.INSERT_GEAR:     self._insertGear,
            StageKind.MESH_GEARS:      self._meshGears,
        }

        # initialize parent class
        eventBusClient.eventBusClient.__init__(
            self,
            name             = 'assemblyState@{0}'.format(self.config.seed if runId is None else runId),
            registrations    = [],
        )

    #======================== public ==========================================

    def initialState(self,scene):
        validate_scene(scene)
        return PipelineState(
            stage     = Stage(StageKind.PERCEIVE),
            truth     = scene,
            resume    = Stage(StageKind.SINGULATE),
        )

    def step(self,state):
        '''
        Executes the current stage of ``state``.

        :returns: A tuple ``(nextState, events)``.
        '''
        if state.terminal:
            raise ValueError('{0} is terminal'.format(state.stage))

        self.engine.getStats().indicateStart()
        (nextState,outcome,duration,detail) = self.handlers[state.stage.kind](state)
        wallTime = self.engine.getStats().indicateStop()

        simTime  = self.engine.charge(duration,state.stage.kind.value,str(state.stage))
        event    = PipelineEvent(
            seq          = len(self.events),
            stage        = str(state.stage),
            outcome      = outcome,
            sim_time_s   = simTime,
            wall_time_s  = wallTime,
            detail       = detail,
        )
        self.events.append(event)
        self.dispatch(
            signal       = SIGNAL_PIPELINE_EVENT,
            data         = event.toDict(),
        )

        if log.isEnabledFor(logging.DEBUG):
            log.debug('{0} -> {1} ({2}) at {3:.1f} s'.format(state.stage,nextState.stage,outcome,simTime))

        return (replace(nextState,steps=state.steps+1),[event])

    def run(self,scene):
        '''
        Steps from ``scene`` to a terminal state.

        :returns: A tuple ``(terminalState, events)``.
        '''
        state = self.initialState(scene)
        while not state.terminal:
            (state,_) = self.step(state)
        if state.stage.kind==StageKind.DONE:
            log.info('{0}: assembled in {1:.1f} s'.format(self.name,self.engine.getCurrentTime()))
        else:
            log.warning('{0}: {1}, {2}'.format(self.name,state.stage,state.failure[1]))
        return (state,list(self.events))

    def getEvents(self):
        return list(self.events)

    def getTimingReport(self):
        '''
        Simulated seconds spent per stage kind.
        '''
        return self.engine.getTimeline().getDurationsByStage()

    #======================== private =========================================

    #=== helpers

    def _stream(self,name,state):
        return RngStream(self.config.seed,name,(state.steps,))

    def _nextTarget(self,inserted):
        for peg in PEGS:
            if peg not in inserted:
                return Stage(StageKind.GRASP_PEG,peg)
        for gear in GEARS:
            if gear not in inserted:
                return Stage(StageKind.GRASP_GEAR,gear)
        return Stage(StageKind.MESH_GEARS)

    def _retry(self,state,cause,via,resume,detail=None):
        '''
        Charges a failure to the stage's part and goes to ``via``, or fails
        the run once the part's retry budget is exhausted.
        '''
        part     = state.stage.part
        failures = dict(state.failures)
        failures[part] = failures.get(part,0)+1
        budget   = self.config.peg_retries if part in PEGS else self.config.gear_retries
        detail   = dict(detail or {},cause=cause,failures=failures[part])

        truth    = state.truth
        if state.held is not None:
            # the part goes back where it was picked from
            truth = Scene(truth.parts+(state.held,),truth.workspace)
        base     = replace(state,truth=truth,failures=failures,held=None,planned_grasp=None,peg_grasp=None,gear_error=None)

        if failures[part]>budget:
            return self._fail(base,cause,detail)
        return (replace(base,stage=via,resume=resume),OUTCOME_RETRY,detail)

    def _fail(self,state,cause,detail=None):
        failed = Stage(StageKind.FAILED,cause=state.stage.kind.value)
        return (replace(state,stage=failed,failure=(str(state.stage),cause)),OUTCOME_FAIL,dict(detail or {},cause=cause))

    def _duration(self,kind):
        return self.config.duration(kind.value)

    #=== stages

    def _perceive(self,state):
        sigma = self.config.noise_sigma if self.config.perception_noise else 0.0
        (observed,estimates) = pcaPose.perceive_scene(
            state.truth,
            self._stream(rngStream.PERCEPTION,state),
            self.config.n_points,
            sigma,
        )
        detail = {'degenerate': sorted(str(p) for (p,e) in estimates.items() if e.degenerate and p.isPeg)}
        return (
            replace(state,stage=state.resume,observed=observed,estimates=estimates),
            OUTCOME_OK,
            self._duration(StageKind.PERCEIVE),
            detail,
        )

    def _singulate(self,state):
        target  = state.stage.part
        result  = Planner.singulate(
            state.truth,
            n_samples        = self.config.n_samples,
            max_interactions = self.config.max_interactions,
            gripper          = self.engine.gripper,
            slip_model       = self.engine.slip_model,
            rng              = self._stream('singulate',state),
            perceive         = self.config.perception_noise,
            n_points         = self.config.n_points,
            noise_sigma      = self.config.noise_sigma,
            targets          = None if target is None else (target,),
        )
        duration = self._duration(StageKind.SINGULATE)*result.interactions
        detail   = {
            'interactions': result.interactions,
            'records':      [r.toDict() for r in result.records],
        }
        state    = replace(state,truth=result.final_scene)
        resume   = state.resume if target is not None else self._nextTarget(state.inserted)
        if not result.success:
            cause = 'part left the table' if result.off_table else 'not singulated after {0} interactions'.format(result.interactions)
            (failed,outcome,detail) = self._fail(state,cause,detail)
            return (failed,outcome,duration,detail)
        if result.interactions==0:
            return (replace(state,stage=resume),OUTCOME_OK,duration,detail)
        return (replace(state,stage=Stage(StageKind.PERCEIVE),resume=resume),OUTCOME_OK,duration,detail)

    def _graspPeg(self,state):
        peg      = state.stage.part
        duration = self._duration(StageKind.GRASP_PEG)
        if not self.engine.graspable(state.observed,peg):
            (s,o,d) = self._retry(state,'not graspable',Stage(StageKind.SINGULATE),state.stage)
            return (s,o,duration,d)
        try:
            planned = PegGrasp.plan_peg_grasp(state.estimates[peg],geometry(peg),self.graspConfig)
        except GraspException as err:
            (s,o,d) = self._retry(state,str(err),Stage(StageKind.PERCEIVE),state.stage)
            return (s,o,duration,d)
        if not self.engine.graspable(state.truth,peg):
            (s,o,d) = self._retry(state,'fingers collide',Stage(StageKind.PERCEIVE),state.stage)
            return (s,o,duration,d)

        dx   = PegGrasp.inject_grasp_error(self._stream(rngStream.GRASP,state))
        held = (peg,state.truth.pose(peg))
        return (
            replace(
                state,
                stage         = Stage(StageKind.REORIENT,peg),
                truth         = state.truth.without(peg),
                observed      = state.observed.without(peg) if state.observed.has(peg) else state.observed,
                held          = held,
                planned_grasp = planned,
                peg_grasp     = PegGrasp.GraspState(peg,dx,False),
            ),
            OUTCOME_OK,
            duration,
            {'offset_mm': dx,'grasp_point_mm': [float(v) for v in planned.grasp_point]},
        )

    def _reorient(self,state):
        peg      = state.stage.part
        duration = self._duration(StageKind.REORIENT)
        if not PegGrasp.simulate_reorientation(state.planned_grasp,geometry(peg),self.graspConfig.friction,
                                               self.graspConfig.mass,self.graspConfig.pad_radius):
            (s,o,d) = self._retry(state,'peg did not pivot',Stage(StageKind.PERCEIVE),Stage(StageKind.GRASP_PEG,peg))
            return (s,o,duration,d)
        return (
            replace(state,stage=Stage(StageKind.ESTIMATE_OFFSET,peg),peg_grasp=replace(state.peg_grasp,reoriented=True)),
            OUTCOME_OK,
            duration,
            {},
        )

    def _estimateOffset(self,state):
        peg        = state.stage.part
        correction = 0.0
        if self.estimator is not None:
            obs        = OffsetEstimator.observe_tactile(
                state.peg_grasp.in_hand_offset,
                self.config.tactile_sigma,
                self._stream(rngStream.TACTILE_NOISE,state),
            )
            correction = float(self.estimator.estimate(obs))
        return (
            replace(state,stage=Stage(StageKind.INSERT_PEG,peg),peg_grasp=state.peg_grasp.corrected(correction)),
            OUTCOME_OK,
            self._duration(StageKind.ESTIMATE_OFFSET),
            {'estimate_mm': correction},
        )

    def _insertPeg(self,state):
        peg      = state.stage.part
        duration = self._duration(StageKind.INSERT_PEG)
        detail   = {'residual_mm': state.peg_grasp.residual}
        if not PegGrasp.insert_peg(state.peg_grasp,PEGS.index(peg)):
            (s,o,d) = self._retry(state,'peg missed the hole',Stage(StageKind.PERCEIVE),Stage(StageKind.GRASP_PEG,peg),detail)
            return (s,o,duration,d)
        inserted = state.inserted+(peg,)
        return (
            replace(state,stage=self._nextTarget(inserted),inserted=inserted,held=None,planned_grasp=None,peg_grasp=None),
            OUTCOME_OK,
            duration,
            detail,
        )

    def _graspGear(self,state):
        gear     = state.stage.part
        duration = self._duration(StageKind.GRASP_GEAR)
        if not self.engine.graspable(state.observed,gear):
            (s,o,d) = self._retry(state,'not graspable',Stage(StageKind.SINGULATE,gear),state.stage)
            return (s,o,duration,d)
        if not self.engine.graspable(state.truth,gear):
            (s,o,d) = self._retry(state,'fingers collide',Stage(StageKind.PERCEIVE),state.stage)
            return (s,o,duration,d)

        # the jaw centers the gear across its closing direction
        limit    = InsertionPolicy.LOST_RESIDUAL
        slip     = float(self._stream(rngStream.GRASP,state).uniform(-self.config.gear_slip_mm,self.config.gear_slip_mm))
        error    = state.estimates[gear].position[0]-state.truth.pose(gear).x+slip
        error    = min(limit,max(-limit,error))
        return (
            replace(
                state,
                stage      = Stage(StageKind.INSERT_GEAR,gear),
                truth      = state.truth.without(gear),
                observed   = state.observed.without(gear) if state.observed.has(gear) else state.observed,
                held       = (gear,state.truth.pose(gear)),
                gear_error = (error,0.0),
            ),
            OUTCOME_OK,
            duration,
            {'offset_mm': error},
        )

    def _insertGear(self,state):
        gear   = state.stage.part
        result = InsertionPolicy.insert_gear_loop(
            state.gear_error,
            self.policy,
            step_mm   = self.config.gear_step_mm,
            max_iters = max(1,self.config.gear_max_iters),
            noise     = self.config.force_sigma,
            rng       = self._stream(rngStream.FORCE_NOISE,state),
        )
        duration = self._duration(StageKind.INSERT_GEAR)+self.config.duration('InsertGearCorrection')*result.iterations
        detail   = {
            'corrections': result.iterations,
            'directions':  [str(d) for d in result.directions],
        }
        if not result.success:
            (s,o,d) = self._retry(state,'gear not inserted',Stage(StageKind.PERCEIVE),Stage(StageKind.GRASP_GEAR,gear),detail)
            return (s,o,duration,d)
        inserted = state.inserted+(gear,)
        return (
            replace(state,stage=self._nextTarget(inserted),inserted=inserted,held=None,gear_error=None),
            OUTCOME_OK,
            duration,
            detail,
        )

    def _meshGears(self,state):
        stream = self._stream(rngStream.MESHING,state)
        theta0 = Meshing.draw_initial_offset(stream)
        result = self.mesher(
            theta0,
            controller   = self.meshController,
            rho          = self.config.mesh_rho,
            rng          = stream,
            max_attempts = self.config.mesh_attempts,
        )
        duration = self._duration(StageKind.MESH_GEARS)*result.attempts
        detail   = {'theta0_rad': float(theta0),'attempts': result.attempts}
        if not result.success:
            (failed,outcome,detail) = self._fail(state,'not meshed after {0} attempts'.format(result.attempts),detail)
            return (failed,outcome,duration,detail)
        return (replace(state,stage=DONE),OUTCOME_OK,duration,detail)

#============================ helpers =========================================

def run_pipeline(scene,config=None,**kwargs):
    '''
    Runs one pipeline and disconnects it from the event bus.

    :returns: A tuple ``(terminalState, events, timingReport)``.
    '''
    pipeline = assemblyState(config,**kwargs)
    try:
        (state,events) = pipeline.run(scene)
    finally:
        pipeline.disconnect()
    return (state,events,pipeline.getTimingReport())
