#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..'))                             # root/

import logging
import logging.handlers
import shutil
from argparse import ArgumentParser

import pytest

from openassembly                                   import openAssemblyApp
from openassembly                                   import openassembly_utils as u
from openassembly.eventLogger.eventLogger           import read_event_log
from openassembly.experiments                       import Report
from openassembly.assemblyState.PipelineConfig      import PipelineConfig, save_config

#============================ logging =========================================

LOGFILE_NAME = 'test_openAssemblyApp.log'

log = logging.getLogger('test_openAssemblyApp')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_openAssemblyApp',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ defines =========================================

DATA_DIR = os.path.join(os.path.dirname(openAssemblyApp.__file__),'data')

#============================ fixtures ========================================

@pytest.fixture
def appdir(tmp_path):
    for name in openAssemblyApp.CONF_FILES:
        shutil.copy(os.path.join(DATA_DIR,name),str(tmp_path))
    return str(tmp_path)

#============================ helpers =========================================

def run(appdir,*args):
    return openAssemblyApp.main(['--appDir',appdir,'--out',os.path.join(appdir,'out')]+list(args))

def parse(*args):
    parser = ArgumentParser(prog='openassembly')
    openAssemblyApp._add_parser_args(parser)
    openAssemblyApp._add_commands(parser)
    return parser.parse_args(list(args))

#============================ tests ===========================================

def test_conf_files_shipped():
    assert openAssemblyApp._verify_conf_path(DATA_DIR)

def test_bad_appdir(tmp_path):
    with pytest.raises(RuntimeError):
        openAssemblyApp._init_external_dirs(str(tmp_path),False)

def test_out_dir_from_environment(tmp_path,monkeypatch):
    monkeypatch.setenv(openAssemblyApp.OUTDIR_ENV,str(tmp_path/'env'))
    assert openAssemblyApp._init_out_dir(None)==str(tmp_path/'env')
    assert os.path.isdir(str(tmp_path/'env'))
    assert openAssemblyApp._init_out_dir(str(tmp_path/'flag'))==str(tmp_path/'flag')

def test_command_required(appdir):
    with pytest.raises(SystemExit):
        run(appdir)

def test_cli_experiment_flags():
    args = parse('experiment','meshing-sweep','--seed','1','--out','/tmp/x')
    assert (args.command,args.experiment_id,args.seed,args.out)==('experiment','meshing-sweep',1,'/tmp/x')

def test_cli_singulate_flags():
    args = parse('singulate','--scene','f.json','--samples','10','--seed','1','--max-interactions','3')
    assert (args.scene,args.n_samples,args.seed,args.max_interactions)==('f.json',10,1,3)
    assert args.out is None
    assert parse('singulate','--n-samples','4').n_samples==4

def test_cli_fit_flags():
    args = parse('fit-offset','--train-size','50','--seed','2')
    assert (args.M,args.seed)==(50,2)
    args = parse('fit-offset','-M','7','--sigma','0.1')
    assert (args.M,args.noise)==(7,0.1)
    args = parse('fit-insertion','--per-class','20','--sigma','0.5','--seed','3')
    assert (args.per_class,args.noise,args.seed)==(20,0.5,3)

def test_cli_pipeline_flags():
    args = parse('pipeline','run','--scene','f.json','--seed','4','--config','c.json')
    assert (args.command,args.action,args.scene,args.seed,args.config)==('pipeline','run','f.json',4,'c.json')

def test_cli_out_per_command():
    assert parse('--out','a','gen-scenes').out=='a'
    assert parse('--out','a','gen-scenes','--out','b').out=='b'
    assert parse('fit-insertion','--out','c').out=='c'

def test_experiment_out_after_command(appdir):
    target = os.path.join(appdir,'elsewhere')
    assert run(appdir,'experiment','meshing-sweep','--trials','3','--seed','1','--out',target)==0
    assert Report.read_meta(os.path.join(target,'meshing-sweep.csv'))['seed']==1

def test_gen_scenes(appdir):
    target = os.path.join(appdir,'scenes')
    assert run(appdir,'gen-scenes','--count','3','--dir',target)==0
    assert sorted(os.listdir(target))==['scene_000.json','scene_001.json','scene_002.json']

def test_pipeline_run_logs_events(appdir):
    config = os.path.join(appdir,'noiseless.json')
    save_config(PipelineConfig(perception_noise=False,tactile_sigma=0.0,force_sigma=0.0,mesh_rho=0.5),config)
    events = os.path.join(appdir,'events.jsonl')
    assert run(appdir,'pipeline','run','--index','1','--seed','5','--config',config,'--events',events)==0
    logged = read_event_log(events)
    assert logged
    assert [e['seq'] for e in logged]==list(range(len(logged)))
    assert logged[-1]['stage']=='MeshGears' or logged[-1]['outcome']=='fail'

def test_experiment_writes_report(appdir):
    assert run(appdir,'experiment','meshing-sweep','--trials','5','--seed','2')==0
    path = os.path.join(appdir,'out','meshing-sweep.csv')
    rows = Report.read_report(path)
    assert [r.trials for r in rows]==[5]*len(rows)
    assert Report.read_meta(path)['seed']==2

def test_failed_command_exit_code(appdir):
    assert run(appdir,'singulate','--max-interactions','-1')==1

def test_fit_insertion(appdir):
    assert run(appdir,'fit-insertion','--per-class','10','--holdout','5')==0

def test_app_methods(appdir):
    app = openAssemblyApp.OpenAssemblyApp(appdir,appdir,appdir,appdir)
    try:
        assert app.loadConfig(seed=9).seed==9
        scene  = app.loadScene(index=4)
        result = app.singulate(scene,seed=1,n_samples=10,max_interactions=3)
        assert result.interactions<=3
        scores = app.fitOffset(100,seed=1,trials=5)
        assert 0.0<=scores['success_rate']<=1.0
        assert scores['holdout_mae_mm']<2.0
    finally:
        app.close()

def test_format_timing():
    text = u.formatTiming({'GraspPeg': 16.0,'InsertPeg': 4.0})
    assert text.splitlines()[0].split()==['GraspPeg','16.0','s','80.0%']
    assert text.splitlines()[-1].split()==['total','20.0','s']

def test_force_slash_sep():
    if os.sep=='/':
        assert u.forceSlashSep('/var/log/openassembly')=='/var/log/openassembly'
