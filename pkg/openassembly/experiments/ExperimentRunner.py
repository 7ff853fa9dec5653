# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Monte Carlo experiments over the assembly stages.

An experiment runs ``trials`` seeded trials at every point of its parameter
grid. Trial ``i`` draws only from streams of ``(seed, i)``, so adding grid
points or workers never changes the outcome of existing trials. Trials may
run in a process pool; results are sorted by grid point and trial index
before they are aggregated into report rows.
'''
import logging
log = logging.getLogger('ExperimentRunner')
log.setLevel(logging.INFO)
log.addHandler(logging.NullHandler())

import collections
import concurrent.futures
import functools
import itertools
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from openassembly.AssemblyException              import AssemblyException
from openassembly.openType                       import rngStream
from openassembly.openType.rngStream             import RngStream
from openassembly.SimEngine.PlanarSim            import SlipModel
from openassembly.singulation                    import Planner
from openassembly.inHand                         import OffsetEstimator
from openassembly.insertion                      import ForceTrace, InsertionPolicy, Meshing
from openassembly.insertion.InsertionPolicy      import DIRECTIONS
from openassembly.assemblyState                  import assemblyState
from openassembly.assemblyState.assemblyState    import StageKind
from openassembly.assemblyState.PipelineConfig   import PipelineConfig
from openassembly.experiments                    import SceneGenerator, Report
from openassembly.experiments.ExperimentException import ExperimentException

SINGULATION_ABLATION = 'singulation-ablation'
OFFSET_ABLATION      = 'offset-ablation'
INSERTION_ACCURACY   = 'insertion-accuracy'
MESHING_SWEEP        = 'meshing-sweep'
END_TO_END           = 'end-to-end'

GEAR_LOOP_ERROR      = 4.0      # mm
HOLDOUT_SIZE         = 1000

def grid_points(**axes):
    '''
    The cartesian product of the given axes, as a tuple of dictionaries.
    '''
    names = list(axes)
    return tuple(dict(zip(names,values)) for values in itertools.product(*(axes[n] for n in names)))

#============================ cached fits =====================================

# a worker process fits each model once per (seed, parameters)

@functools.lru_cache(maxsize=None)
def _offsetEstimator(M,noise,seed):
    if M<1:
        return None
    return OffsetEstimator.fit_offset_estimator(M,noise,RngStream(seed,'offset-training'))

@functools.lru_cache(maxsize=None)
def _insertionPolicy(n_per_class,noise,seed):
    return InsertionPolicy.fit_insertion_policy(n_per_class,noise,RngStream(seed,rngStream.FORCE_NOISE))

#============================ trials ==========================================

def _singulationTrial(params,trial,seed):
    scene   = SceneGenerator.benchmark_scene(trial)
    budget  = params.get('max_interactions',Planner.DEFAULT_MAX_INTERACTIONS)
    start   = time.perf_counter()
    result  = Planner.singulate(
        scene,
        n_samples        = params['n_samples'],
        max_interactions = budget,
        slip_model       = SlipModel(params.get('p_slip',0.15)),
        rng              = RngStream(seed,'singulate',(trial,)),
        perceive         = params.get('perceive',False),
    )
    wall    = time.perf_counter()-start
    return {
        'success':        result.success,
        # a failed run counts the whole budget
        'interactions':   result.interactions if result.success else budget,
        'executed':       result.interactions,
        'slips':          sum(r.slipped for r in result.records),
        'off_table':      result.off_table,
        'wall_time_s':    wall,
        'plan_time_s':    wall/result.interactions if result.interactions else None,
    }

def _offsetTrial(params,trial,seed):
    noise     = params.get('tactile_sigma',OffsetEstimator.DEFAULT_TACTILE_SIGMA)
    estimator = _offsetEstimator(params['M'],noise,seed)
    start     = time.perf_counter()
    outcome   = OffsetEstimator.peg_insertion_trials(estimator,1,noise,RngStream(seed,'offset-trial',(trial,)))[0]
    return {
        'success':        outcome.success,
        'error_mm':       abs(outcome.residual_mm),
        'offset_mm':      outcome.offset_mm,
        'estimate_mm':    outcome.estimate_mm,
        'wall_time_s':    time.perf_counter()-start,
    }

def _insertionTrial(params,trial,seed):
    noise   = params.get('force_sigma',ForceTrace.DEFAULT_FORCE_SIGMA)
    policy  = _insertionPolicy(params.get('per_class',50),noise,seed)
    start   = time.perf_counter()
    if params['mode']=='classify':
        direction = DIRECTIONS[trial%len(DIRECTIONS)]
        error     = InsertionPolicy.training_error(direction)
        trace     = ForceTrace.synth_force_trace(error,noise,RngStream(seed,'holdout',(trial,)))
        predicted = policy.predict(trace)
        return {
            'success':      predicted==direction,
            'true':         str(direction),
            'predicted':    str(predicted),
            'wall_time_s':  time.perf_counter()-start,
        }

    stream      = RngStream(seed,'gear-error',(trial,))
    error       = [0.0,0.0]
    axis        = int(stream.integers(2))
    error[axis] = GEAR_LOOP_ERROR if stream.random()<0.5 else -GEAR_LOOP_ERROR
    result      = InsertionPolicy.insert_gear_loop(
        tuple(error),
        policy,
        noise   = noise,
        rng     = RngStream(seed,'gear-loop',(trial,)),
    )
    return {
        'success':        result.success,
        'interactions':   result.iterations,
        'error_mm':       float(math.hypot(*result.residual)),
        'lost':           result.lost,
        'wall_time_s':    time.perf_counter()-start,
    }

def _meshingTrial(params,trial,seed):
    rho        = params['rho']
    controller = Meshing.MeshController(params.get('force',Meshing.NOMINAL_FORCE),params.get('radius',Meshing.NOMINAL_RADIUS))
    theta0     = Meshing.draw_initial_offset(RngStream(seed,rngStream.MESHING,(trial,)))
    start      = time.perf_counter()
    result     = Meshing.mesh_gears(theta0,controller,rho)
    relative   = (1.0-controller.transmission(rho))*controller.sweep_angle()
    return {
        'success':        result.success,
        'interactions':   result.attempts,
        'theta0_rad':     theta0,
        'predicted':      Meshing.meshing_success_region(theta0,relative),
        'wall_time_s':    time.perf_counter()-start,
    }

VARIANTS = {
    'nominal':          {},
    'no-estimator':     {'use_offset_estimator': False},
    'no-slip':          {'slip': False},
    'noiseless':        {'perception_noise': False,'tactile_sigma': 0.0,'force_sigma': 0.0},
}

def _pipelineTrial(params,trial,seed):
    options  = VARIANTS[params.get('variant','nominal')]
    config   = PipelineConfig(seed=int(RngStream(seed,'trial-seed',(trial,)).integers(2**31)),**options)
    scene    = SceneGenerator.generate_scene(RngStream(seed,rngStream.SCENE_GEN,(trial,)))
    start    = time.perf_counter()
    (state,events,timing) = assemblyState.run_pipeline(
        scene,
        config,
        estimator = _offsetEstimator(config.offset_train_size if config.use_offset_estimator else 0,config.tactile_sigma,seed),
        policy    = _insertionPolicy(config.policy_per_class,config.force_sigma,seed),
        runId     = 'trial{0}'.format(trial),
    )
    done     = state.stage.kind==StageKind.DONE
    return {
        'success':        done,
        'failed_stage':   None if done else state.failure[0],
        'cause':          None if done else state.failure[1],
        'interactions':   sum(e.detail.get('interactions',0) for e in events),
        'retries':        sum(e.outcome=='retry' for e in events),
        'sim_time_s':     events[-1].sim_time_s,
        'stage_time_s':   timing,
        'wall_time_s':    time.perf_counter()-start,
    }

def _meanStageTimes(records):
    totals = collections.OrderedDict()
    for r in records:
        for (stage,seconds) in r['stage_time_s'].items():
            totals[stage] = totals.get(stage,0.0)+seconds
    return [('mean_sim_time_s:'+stage,total/len(records)) for (stage,total) in totals.items()]

def _holdoutMae(params,seed,records):
    noise     = params.get('tactile_sigma',OffsetEstimator.DEFAULT_TACTILE_SIGMA)
    estimator = _offsetEstimator(params['M'],noise,seed)
    if estimator is None:
        return []
    return [('holdout_mae_mm',OffsetEstimator.holdout_mae(estimator,HOLDOUT_SIZE,noise,RngStream(seed,'offset-holdout')))]

def _planTime(params,seed,records):
    times = [r['plan_time_s'] for r in records if r['plan_time_s'] is not None]
    return [('mean_plan_wall_time_s',float(np.mean(times)) if times else None)]

def _closedFormAgreement(params,seed,records):
    return [('closed_form_agreement',float(np.mean([r['success']==r['predicted'] for r in records])))]

def _stageTimes(params,seed,records):
    return _meanStageTimes(records)

@dataclass(frozen=True)
class Experiment(object):
    trial:          object          # (params, trial, seed) -> record
    trials:         int
    grid:           tuple
    parameters:     frozenset
    histogram:      tuple = ()      # record fields binned in the histogram
    extras:         object = None   # (params, seed, records) -> [(measure, value)]

EXPERIMENTS = {
    SINGULATION_ABLATION: Experiment(
        trial       = _singulationTrial,
        trials      = SceneGenerator.BENCHMARK_SIZE,
        grid        = grid_points(n_samples=(1,10,100,1000),perceive=(False,))+({'n_samples': 100,'perceive': True},),
        parameters  = frozenset(['n_samples','perceive','max_interactions','p_slip']),
        histogram   = ('interactions','slips'),
        extras      = _planTime,
    ),
    OFFSET_ABLATION: Experiment(
        trial       = _offsetTrial,
        trials      = 20,
        grid        = grid_points(M=(0,10,100,1000)),
        parameters  = frozenset(['M','tactile_sigma']),
        extras      = _holdoutMae,
    ),
    INSERTION_ACCURACY: Experiment(
        trial       = _insertionTrial,
        trials      = 200,
        grid        = grid_points(mode=('classify','loop')),
        parameters  = frozenset(['mode','force_sigma','per_class']),
        histogram   = ('interactions',),
    ),
    MESHING_SWEEP: Experiment(
        trial       = _meshingTrial,
        trials      = 1000,
        grid        = grid_points(rho=(0.5,0.6,0.7,0.8,0.9,0.95,0.99)),
        parameters  = frozenset(['rho','force','radius']),
        histogram   = ('interactions',),
        extras      = _closedFormAgreement,
    ),
    END_TO_END: Experiment(
        trial       = _pipelineTrial,
        trials      = 225,
        grid        = grid_points(variant=('nominal',)),
        parameters  = frozenset(['variant']),
        histogram   = ('interactions','failed_stage'),
        extras      = _stageTimes,
    ),
}

#============================ spec ============================================

@dataclass(frozen=True)
class ExperimentSpec(object):
    experiment_id:  str
    trials:         int
    grid:           tuple
    seed:           int = 0
    out:            str = None
    fmt:            str = 'csv'

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENTS:
            raise ExperimentException(ExperimentException.BAD_SPEC,'unknown experiment {0}'.format(self.experiment_id))
        if self.trials<1:
            raise ExperimentException(ExperimentException.BAD_SPEC,'trials must be >= 1')
        if not self.grid:
            raise ExperimentException(ExperimentException.BAD_SPEC,'empty parameter grid')
        known = EXPERIMENTS[self.experiment_id].parameters
        for point in self.grid:
            unknown = set(point)-known
            if unknown:
                raise ExperimentException(
                    ExperimentException.BAD_SPEC,
                    '{0} takes no parameter(s) {1}'.format(self.experiment_id,sorted(unknown)),
                )
        if self.fmt not in Report.DELIMITERS:
            raise ExperimentException(ExperimentException.BAD_SPEC,'unknown report format {0}'.format(self.fmt))
        object.__setattr__(self,'grid',tuple(dict(p) for p in self.grid))

    @property
    def report_path(self):
        directory = self.out or '.'
        return os.path.join(directory,'{0}.{1}'.format(self.experiment_id,self.fmt))

    def toDict(self):
        return {
            'experiment_id':  self.experiment_id,
            'trials':         self.trials,
            'grid':           [dict(p) for p in self.grid],
            'seed':           self.seed,
            'fmt':            self.fmt,
        }

def default_spec(experiment_id,seed=0,trials=None,grid=None,out=None,fmt='csv'):
    if experiment_id not in EXPERIMENTS:
        raise ExperimentException(ExperimentException.BAD_SPEC,'unknown experiment {0}'.format(experiment_id))
    experiment = EXPERIMENTS[experiment_id]
    return ExperimentSpec(
        experiment_id = experiment_id,
        trials        = experiment.trials if trials is None else trials,
        grid          = experiment.grid if grid is None else grid,
        seed          = seed,
        out           = out,
        fmt           = fmt,
    )

#============================ runner ==========================================

def _executeTrial(task):
    (experimentId,point,params,trial,seed) = task
    try:
        record = EXPERIMENTS[experimentId].trial(params,trial,seed)
    except (AssemblyException,ValueError,ArithmeticError) as err:
        raise ExperimentException(
            ExperimentException.TRIAL_FAILED,
            '{0} trial {1} at {2}: {3}'.format(experimentId,trial,params,err),
        )
    return dict(record,point=point,trial=trial)

def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None

class ExperimentRunner(object):
    '''
    Runs one experiment and keeps its raw trial records.

    :param workers: Size of the process pool; 1 runs the trials in this
                    process.
    '''

    def __init__(self,spec,workers=1):

        # store params
        self.spec            = spec
        self.workers         = max(1,int(workers))

        # local variables
        self.experiment      = EXPERIMENTS[spec.experiment_id]
        self.records         = []
        self.rows            = []
        self.timing          = []

    #======================== public ==========================================

    def run(self):
        '''
        :returns: One ReportRow per grid point, in grid order.
        '''
        tasks   = [
            (self.spec.experiment_id,point,params,trial,self.spec.seed)
            for (point,params) in enumerate(self.spec.grid)
            for trial in range(self.spec.trials)
        ]
        log.info('{0}: {1} trials on {2} worker(s)'.format(self.spec.experiment_id,len(tasks),self.workers))

        if self.workers==1:
            records = [_executeTrial(t) for t in tasks]
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=self.workers) as pool:
                records = list(pool.map(_executeTrial,tasks,chunksize=max(1,len(tasks)//(4*self.workers))))
        self.records = sorted(records,key=lambda r: (r['point'],r['trial']))

        self.rows    = []
        self.timing  = []
        for (point,params) in enumerate(self.spec.grid):
            records  = [r for r in self.records if r['point']==point]
            row      = Report.ReportRow(
                parameters        = dict(params),
                trials            = len(records),
                success_rate      = _mean([float(r['success']) for r in records]),
                mean_interactions = _mean([r.get('interactions') for r in records]),
                mean_error_mm     = _mean([r.get('error_mm') for r in records]),
                mean_wall_time_s  = _mean([r['wall_time_s'] for r in records]),
            )
            self.rows.append(row)
            if self.experiment.extras is not None:
                for (measure,value) in self.experiment.extras(params,self.spec.seed,records):
                    self.timing.append((row.label,measure,value))

            if log.isEnabledFor(logging.DEBUG):
                log.debug('{0}: success {1:.3f}'.format(row.label,row.success_rate))

        return list(self.rows)

    def getRecords(self):
        return list(self.records)

    def getHistogram(self):
        '''
        ``(parameters, bin, count)`` triples of the binned record fields,
        bins in ascending order.
        '''
        returnVal = []
        for (point,row) in enumerate(self.rows):
            records = [r for r in self.records if r['point']==point]
            for name in self.experiment.histogram:
                counts = collections.Counter(r.get(name) for r in records if r.get(name) is not None)
                for value in sorted(counts):
                    returnVal.append((row.label,'{0}={1}'.format(name,value),counts[value]))
        return returnVal

    def getTiming(self):
        return list(self.timing)

    def report(self,path=None):
        '''
        Writes the rows, records, histogram and timing table.
        '''
        records = [{k: v for (k,v) in r.items() if k!='wall_time_s'} for r in self.records]
        return Report.emit_report(
            self.rows,
            path or self.spec.report_path,
            fmt       = self.spec.fmt,
            spec      = self.spec,
            records   = records,
            histogram = self.getHistogram(),
            timing    = self.getTiming(),
        )

def run_experiment(spec,workers=1):
    return ExperimentRunner(spec,workers).run()
