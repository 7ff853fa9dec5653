# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Application model for openAssembly, shared by the command line and the
interactive shell. See main() for startup use.
'''
import logging
import logging.config
import os
import sys
from argparse import ArgumentParser, SUPPRESS

import appdirs

import openassembly.openassembly_utils as u
from openassembly                               import oaVersion
from openassembly.AssemblyException             import AssemblyException
from openassembly.OAtracer                      import OAtracer
from openassembly.assemblyState                 import assemblyState, PipelineConfig
from openassembly.eventBus                      import eventBusMonitor
from openassembly.eventLogger                   import eventLogger
from openassembly.experiments                   import ExperimentRunner, SceneGenerator
from openassembly.inHand                        import OffsetEstimator
from openassembly.insertion                     import ForceTrace, InsertionPolicy
from openassembly.openType                      import rngStream
from openassembly.openType.rngStream            import RngStream
from openassembly.openType.typeScene            import load_scene
from openassembly.singulation                   import Planner
from openassembly.SimEngine.PlanarSim           import SlipModel

log = logging.getLogger('openAssemblyApp')
log.addHandler(logging.NullHandler())

APP_NAME      = 'openassembly'
APP_AUTHOR    = 'OpenAssembly'
OUTDIR_ENV    = 'OPENASSEMBLY_OUTDIR'
CONF_FILES    = ('logging.conf','pipeline.json')

class OpenAssemblyApp(object):
    '''
    Provides an application model for openAssembly: the directories, the
    default pipeline configuration, the event bus monitor and optional
    tracing, plus one method per command.
    '''

    def __init__(self,conf_dir,data_dir,log_dir,out_dir,trace=False,debug=False,workers=1):

        # store params
        self.conf_dir      = conf_dir
        self.data_dir      = data_dir
        self.log_dir       = log_dir
        self.out_dir       = out_dir
        self.trace         = trace
        self.debug         = debug
        self.workers       = workers

        # local variables
        self.eventBusMonitor = eventBusMonitor.eventBusMonitor()
        self.tracer        = OAtracer() if self.trace else None
        self.runs          = 0

    #======================== public ==========================================

    def close(self):
        '''Stops tracing, if on.'''
        log.info('Closing openAssembly')
        if self.tracer is not None:
            self.tracer.close()
            self.tracer = None

    def loadConfig(self,path=None,seed=None):
        '''
        Reads a pipeline configuration, by default the one shipped in the
        data directory, and overrides its seed when ``seed`` is given.
        '''
        config = PipelineConfig.load_config(path or os.path.join(self.data_dir,'pipeline.json'))
        if seed is not None:
            config = config.with_seed(seed)
        return config

    def loadScene(self,path=None,index=0):
        '''
        Reads a scene file, or returns benchmark scene ``index``.
        '''
        if path:
            return load_scene(path)[0]
        return SceneGenerator.benchmark_scene(index)

    def generateScenes(self,count=SceneGenerator.BENCHMARK_SIZE,seed=SceneGenerator.BENCHMARK_SEED,directory=None):
        directory = directory or os.path.join(self.out_dir,'scenes')
        return SceneGenerator.write_scenes(directory,count,seed)

    def runPipeline(self,scene,config,events_path=None):
        '''
        Runs one assembly on ``scene``; the events go to ``events_path`` as
        JSON lines when given.

        :returns: A tuple ``(terminalState, events, timingReport)``.
        '''
        self.runs += 1
        runId      = 'run{0}'.format(self.runs)
        sender     = 'assemblyState@{0}'.format(runId)
        if events_path is None:
            return assemblyState.run_pipeline(scene,config,runId=runId)
        with eventLogger.eventLogger(events_path,sender=sender) as logger:
            returnVal = assemblyState.run_pipeline(scene,config,runId=runId)
        log.info('logged {0} events to {1}'.format(logger.getNumLogged(),events_path))
        return returnVal

    def singulate(self,scene,seed=0,n_samples=Planner.DEFAULT_NUM_SAMPLES,
                  max_interactions=Planner.DEFAULT_MAX_INTERACTIONS,p_slip=0.15,perceive=False):
        return Planner.singulate(
            scene,
            n_samples        = n_samples,
            max_interactions = max_interactions,
            slip_model       = SlipModel(p_slip),
            rng              = RngStream(seed,'singulate'),
            perceive         = perceive,
        )

    def fitOffset(self,M,seed=0,noise=OffsetEstimator.DEFAULT_TACTILE_SIGMA,trials=20):
        '''
        Fits an offset estimator on ``M`` pairs and scores it on held-out
        pairs and on ``trials`` peg insertions.
        '''
        estimator = OffsetEstimator.fit_offset_estimator(M,noise,RngStream(seed,'offset-training'))
        results   = OffsetEstimator.peg_insertion_trials(estimator,trials,noise,RngStream(seed,'offset-trial'))
        return {
            'M':                M,
            'holdout_mae_mm':   OffsetEstimator.holdout_mae(estimator,1000,noise,RngStream(seed,'offset-holdout')),
            'success_rate':     sum(t.success for t in results)/float(trials) if trials else None,
        }

    def fitInsertion(self,n_per_class,seed=0,noise=ForceTrace.DEFAULT_FORCE_SIGMA,holdout=50):
        '''
        Fits the insertion policy and evaluates it on ``holdout`` fresh
        traces per class.
        '''
        policy = InsertionPolicy.fit_insertion_policy(n_per_class,noise,RngStream(seed,rngStream.FORCE_NOISE))
        return InsertionPolicy.evaluate_policy(policy,holdout,noise,RngStream(seed,'holdout'))

    def runExperiment(self,experimentId,seed=0,trials=None,fmt='csv',out=None):
        '''
        Runs an experiment and writes its report.

        :returns: A tuple ``(rows, paths)``, paths keyed by artifact.
        '''
        spec   = ExperimentRunner.default_spec(
            experimentId,
            seed   = seed,
            trials = trials,
            out    = out or self.out_dir,
            fmt    = fmt,
        )
        runner = ExperimentRunner.ExperimentRunner(spec,self.workers)
        rows   = runner.run()
        paths  = runner.report()
        paths['report'] = spec.report_path
        return (rows,paths)

    def getEventBusStats(self):
        return self.eventBusMonitor.getStats()

#============================ commands ========================================

def _cmdGenScenes(app,args):
    paths = app.generateScenes(args.count,args.seed,args.dir)
    print('wrote {0} scenes to {1}'.format(len(paths),os.path.dirname(paths[0]) if paths else args.dir))

def _cmdExperiment(app,args):
    (rows,paths) = app.runExperiment(args.experiment_id,args.seed,args.trials,args.fmt,args.out)
    print(u.formatRows(rows))
    print('report: {0}'.format(paths['report']))

def _cmdPipeline(app,args):
    scene  = app.loadScene(args.scene,args.index)
    config = app.loadConfig(args.config,args.seed)
    (state,events,timing) = app.runPipeline(scene,config,args.events)
    for event in events:
        print(u.formatEvent(event))
    print(u.formatTiming(timing))
    print('result: {0}'.format(state.stage))

def _cmdSingulate(app,args):
    scene  = app.loadScene(args.scene,args.index)
    result = app.singulate(scene,args.seed,args.n_samples,args.max_interactions,args.p_slip,args.perceive)
    for record in result.records:
        print(record.toDict())
    print('success={0} interactions={1}'.format(result.success,result.interactions))
    print(u.formatScene(result.final_scene))

def _cmdFitOffset(app,args):
    result = app.fitOffset(args.M,args.seed,args.noise,args.trials)
    print('M={M} holdout MAE={holdout_mae_mm:.3f} mm insertion success={success_rate}'.format(**result))

def _cmdFitInsertion(app,args):
    evaluation = app.fitInsertion(args.per_class,args.seed,args.noise,args.holdout)
    print('accuracy={0:.3f}'.format(evaluation.accuracy))
    for row in evaluation.confusion:
        print(' '.join('{0:>4}'.format(v) for v in row))

#============================ main ============================================

def main(argv=None,parser=None):
    '''
    Entry point for the command line.

    :param parser: Optional ArgumentParser passed in from an enclosing UI
                   module.
    :returns: The process exit code, 0 if every requested trial executed.
    '''
    if parser is None:
        parser = ArgumentParser(prog='openassembly')

    _add_parser_args(parser)
    _add_commands(parser)
    arg_space = parser.parse_args(argv)

    app = build_app(arg_space)
    try:
        arg_space.func(app,arg_space)
    except (AssemblyException,ValueError,OSError) as err:
        log.error('{0} failed: {1}'.format(arg_space.command,err))
        return 1
    finally:
        app.close()
    return 0

def build_app(arg_space):
    '''
    Sets up the directories and logging, then creates the application.
    '''
    conf_dir, data_dir, log_dir = _init_external_dirs(arg_space.appdir, arg_space.debug)
    out_dir = _init_out_dir(arg_space.out)

    # Must use a '/'-separated path for log dir, even on Windows.
    logging.config.fileConfig(
        os.path.join(conf_dir,'logging.conf'),
        {'logDir': u.forceSlashSep(log_dir)},
        disable_existing_loggers=False,
    )
    if arg_space.debug:
        logging.getLogger().setLevel(logging.DEBUG)

    log.info('Initializing openAssembly {0} with options:\n\t{1}'.format(
        '.'.join(str(v) for v in oaVersion.VERSION),
        '\n    '.join(['appdir      = {0}'.format(arg_space.appdir),
                       'command     = {0}'.format(getattr(arg_space,'command','shell')),
                       'trace       = {0}'.format(arg_space.trace),
                       'debug       = {0}'.format(arg_space.debug),
                       'workers     = {0}'.format(arg_space.workers)],
                      )))
    log.info('Using external dirs:\n\t{0}'.format(
        '\n    '.join(['conf     = {0}'.format(conf_dir),
                       'data     = {0}'.format(data_dir),
                       'log      = {0}'.format(log_dir),
                       'out      = {0}'.format(out_dir)],
                      )))
    if arg_space.debug:
        log.debug('sys.path:\n\t{0}'.format('\n\t'.join(str(p) for p in sys.path)))

    return OpenAssemblyApp(
        conf_dir = conf_dir,
        data_dir = data_dir,
        log_dir  = log_dir,
        out_dir  = out_dir,
        trace    = arg_space.trace,
        debug    = arg_space.debug,
        workers  = arg_space.workers,
    )

def _add_parser_args(parser):
    parser.add_argument('-a', '--appDir',
                        dest='appdir',
                        default='.',
                        action='store',
                        help='working directory holding logging.conf and pipeline.json')

    parser.add_argument('-t', '--trace',
                        dest='trace',
                        default=False,
                        action='store_true',
                        help='profile with yappi and log the hot spots')

    parser.add_argument('-d', '--debug',
                        dest='debug',
                        default=False,
                        action='store_true',
                        help='log at DEBUG level')

    parser.add_argument('-w', '--workers',
                        dest='workers',
                        type=int,
                        default=1,
                        action='store',
                        help='worker processes for experiments')

    parser.add_argument('-o', '--out',
                        dest='out',
                        default=None,
                        action='store',
                        help='output directory (default ${0} or the user data dir)'.format(OUTDIR_ENV))

def _add_commands(parser):
    commands = parser.add_subparsers(dest='command',metavar='command')
    commands.required = True

    gen = commands.add_parser('gen-scenes',help='write freshly generated scene files')
    gen.add_argument('--count',type=int,default=SceneGenerator.BENCHMARK_SIZE)
    gen.add_argument('--seed',type=int,default=SceneGenerator.BENCHMARK_SEED)
    gen.add_argument('--dir',default=None,help='target directory (default <out>/scenes)')
    _add_out_arg(gen)
    gen.set_defaults(func=_cmdGenScenes)

    experiment = commands.add_parser('experiment',help='run an experiment and write its report')
    experiment.add_argument('experiment_id',choices=sorted(ExperimentRunner.EXPERIMENTS))
    experiment.add_argument('--seed',type=int,default=0)
    experiment.add_argument('--trials',type=int,default=None,help='trials per grid point')
    experiment.add_argument('--format',dest='fmt',default='csv',choices=('csv','tsv'))
    _add_out_arg(experiment)
    experiment.set_defaults(func=_cmdExperiment)

    pipeline = commands.add_parser('pipeline',help='assembly pipeline')
    actions  = pipeline.add_subparsers(dest='action',metavar='action')
    actions.required = True
    run      = actions.add_parser('run',help='assemble one scene')
    _add_scene_args(run)
    run.add_argument('--seed',type=int,default=None,help='overrides the configured seed')
    run.add_argument('--config',default=None,help='pipeline configuration file')
    run.add_argument('--events',default=None,help='JSON-lines event log file')
    _add_out_arg(run)
    run.set_defaults(func=_cmdPipeline)

    singulate = commands.add_parser('singulate',help='singulate the pegs of one scene')
    _add_scene_args(singulate)
    singulate.add_argument('--seed',type=int,default=0)
    singulate.add_argument('--samples','--n-samples',dest='n_samples',type=int,default=Planner.DEFAULT_NUM_SAMPLES)
    singulate.add_argument('--max-interactions',dest='max_interactions',type=int,default=Planner.DEFAULT_MAX_INTERACTIONS)
    singulate.add_argument('--p-slip',dest='p_slip',type=float,default=0.15)
    singulate.add_argument('--perceive',default=False,action='store_true',help='plan on re-perceived scenes')
    _add_out_arg(singulate)
    singulate.set_defaults(func=_cmdSingulate)

    offset = commands.add_parser('fit-offset',help='fit and score the in-hand offset estimator')
    offset.add_argument('--train-size','-M',dest='M',type=int,default=100,help='training pairs')
    offset.add_argument('--seed',type=int,default=0)
    offset.add_argument('--sigma','--noise',dest='noise',type=float,default=OffsetEstimator.DEFAULT_TACTILE_SIGMA,help='tactile noise (feature units)')
    offset.add_argument('--trials',type=int,default=20)
    _add_out_arg(offset)
    offset.set_defaults(func=_cmdFitOffset)

    insertion = commands.add_parser('fit-insertion',help='fit and score the gear insertion policy')
    insertion.add_argument('--per-class',dest='per_class',type=int,default=50)
    insertion.add_argument('--seed',type=int,default=0)
    insertion.add_argument('--sigma','--noise',dest='noise',type=float,default=ForceTrace.DEFAULT_FORCE_SIGMA,help='force noise (N)')
    insertion.add_argument('--holdout',type=int,default=50,help='held-out traces per class')
    _add_out_arg(insertion)
    insertion.set_defaults(func=_cmdFitInsertion)

def _add_scene_args(parser):
    parser.add_argument('--scene',default=None,help='scene file (default a benchmark scene)')
    parser.add_argument('--index',type=int,default=0,help='benchmark scene index')

def _add_out_arg(parser):
    # absent unless given, so the global --out is kept
    parser.add_argument('--out',dest='out',default=SUPPRESS,help='output directory')

def _init_out_dir(out):
    '''
    Output directory: ``--out``, else $OPENASSEMBLY_OUTDIR, else the user
    data directory. Created if missing.
    '''
    out_dir = out or os.environ.get(OUTDIR_ENV) or appdirs.user_data_dir(APP_NAME,APP_AUTHOR)
    os.makedirs(out_dir,exist_ok=True)
    return out_dir

def _init_external_dirs(appdir, debug):
    '''
    Find and define conf_dir for config files and data_dir for static data.
    Also return log_dir for logs. Searched in order:

    1. Provided from command line, appdir parameter
    2. In the openassembly package data directory

    :param debug: If true, print extra logging info
    :returns: 3-Tuple with config dir, data dir, and log dir
    :raises: RuntimeError if files/directories not found as expected
    '''
    if not appdir == '.':
        if not _verify_conf_path(appdir):
            raise RuntimeError('Config files not in expected directory: {0}'.format(appdir))
        if debug:
            print('App data found via appdir')
        return appdir, appdir, appdir

    data_dir = os.path.join(os.path.dirname(u.__file__), 'data')
    if _verify_conf_path(data_dir):
        log_dir = appdirs.user_log_dir(APP_NAME, APP_AUTHOR)
        # Must make intermediate directories on Windows
        os.makedirs(log_dir, exist_ok=True)
        if debug:
            print('App data found via openassembly package')
        return data_dir, data_dir, log_dir
    else:
        raise RuntimeError('Cannot find expected data directory: {0}'.format(data_dir))

def _verify_conf_path(conf_dir):
    ''' Returns True if the openAssembly conf files exist in the provided directory. '''
    return all(os.path.isfile(os.path.join(conf_dir,f)) for f in CONF_FILES)

if __name__=='__main__':
    sys.exit(main())
