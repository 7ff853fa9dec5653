#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..', '..'))                       # root/

import logging
import logging.handlers
import json

import pytest

from openassembly.assemblyState import PipelineConfig
from openassembly.assemblyState.PipelineConfig import DEFAULT_DURATIONS

#============================ logging =========================================

LOGFILE_NAME = 'test_PipelineConfig.log'

log = logging.getLogger('test_PipelineConfig')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_PipelineConfig',
                   'PipelineConfig',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ defines =========================================

DEFAULT_FILE = os.path.join(os.path.dirname(__file__),'..','..','data','pipeline.json')

#============================ fixtures ========================================

INVALID = [
    json.dumps({'p_slip': 1.5}),
    json.dumps({'p_slip': -0.1}),
    json.dumps({'noise_sigma': -1.0}),
    json.dumps({'peg_retries': -1}),
    json.dumps({'mesh_attempts': 6}),
    json.dumps({'durations': {'Perceive': -2.0}}),
    json.dumps({'durations': {'Teleport': 1.0}}),
]

@pytest.fixture(params=INVALID)
def invalidOptions(request):
    return json.loads(request.param)

#============================ tests ===========================================

def test_defaults():
    config = PipelineConfig.PipelineConfig()
    assert config.p_slip==0.15
    assert config.n_samples==100
    assert config.max_interactions==10
    assert config.mesh_attempts==5
    assert config.durations==DEFAULT_DURATIONS

def test_partial_durations_merged():
    config = PipelineConfig.PipelineConfig(durations={'Perceive': 1.0})
    assert config.duration('Perceive')==1.0
    assert config.duration('MeshGears')==4.0

def test_invalid(invalidOptions):
    with pytest.raises(ValueError):
        PipelineConfig.config_from_dict(invalidOptions)

def test_unknown_option():
    with pytest.raises(ValueError):
        PipelineConfig.config_from_dict({'warp_drive': True})

def test_with_seed():
    config = PipelineConfig.PipelineConfig(p_slip=0.3)
    seeded = config.with_seed(17)
    assert seeded.seed==17
    assert seeded.p_slip==0.3
    assert config.seed==0

def test_save_load(tmp_path):
    config = PipelineConfig.PipelineConfig(seed=3,slip=False,durations={'InsertPeg': 12.0})
    path   = str(tmp_path/'pipeline.json')
    PipelineConfig.save_config(config,path)
    assert PipelineConfig.load_config(path)==config

def test_shipped_file_is_default():
    assert PipelineConfig.load_config(DEFAULT_FILE)==PipelineConfig.PipelineConfig()
