#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..', '..'))                       # root/

import logging
import logging.handlers
import shutil

import pytest

from openassembly.openType                          import rngStream
from openassembly.openType.rngStream                import RngStream
from openassembly.openType.typeScene                import WorkspaceConfig, is_valid
from openassembly.SimEngine                         import PlanarSim
from openassembly.experiments                       import SceneGenerator
from openassembly.experiments.ExperimentException   import ExperimentException

#============================ logging =========================================

LOGFILE_NAME = 'test_SceneGenerator.log'

log = logging.getLogger('test_SceneGenerator')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_SceneGenerator',
                   'SceneGenerator',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ fixtures ========================================

@pytest.fixture(scope='module')
def benchmark():
    return SceneGenerator.benchmark_scenes()

#============================ tests ===========================================

def test_scenes_valid():
    for i in range(50):
        scene = SceneGenerator.generate_scene(RngStream(i,rngStream.SCENE_GEN))
        assert is_valid(scene)

def test_edge_margin():
    for i in range(50):
        scene = SceneGenerator.generate_scene(RngStream(i,rngStream.SCENE_GEN))
        for (_,pose) in scene.parts:
            assert 50.0<=pose.x<=550.0
            assert 50.0<=pose.y<=400.0

def test_generation_deterministic():
    first  = SceneGenerator.generate_scene(RngStream(3,rngStream.SCENE_GEN))
    second = SceneGenerator.generate_scene(RngStream(3,rngStream.SCENE_GEN))
    assert first==second

def test_always_cluttered_is_compact():
    for i in range(20):
        scene   = SceneGenerator.generate_scene(RngStream(i,rngStream.SCENE_GEN),clutter_probability=1.0)
        centers = [p.position for (_,p) in scene.parts]
        for (ax,ay) in centers:
            for (bx,by) in centers:
                assert ((ax-bx)**2+(ay-by)**2)**0.5<=2*SceneGenerator.CLUTTER_RADIUS+1e-9

def test_clutter_often_needs_singulation():
    scenes = SceneGenerator.generate_scenes(100,seed=5)
    assert all(is_valid(s) for s in scenes)
    assert sum(not PlanarSim.all_pegs_graspable(s) for s in scenes)>=30

def test_degenerate_workspace_times_out():
    with pytest.raises(ExperimentException) as exc:
        SceneGenerator.generate_scene(RngStream(0,rngStream.SCENE_GEN),WorkspaceConfig(width=100.0,height=100.0))
    assert exc.value.errorCode==ExperimentException.GENERATION_TIMEOUT

def test_generation_restarts_after_dead_end(monkeypatch):
    # every part gets a single draw before placement starts over
    monkeypatch.setattr(SceneGenerator,'RESTART_AFTER',1)
    for i in range(20):
        scene = SceneGenerator.generate_scene(RngStream(i,rngStream.SCENE_GEN),clutter_probability=1.0)
        assert is_valid(scene)

def test_restarts_share_one_budget(monkeypatch):
    monkeypatch.setattr(SceneGenerator,'RESTART_AFTER',1)
    with pytest.raises(ExperimentException) as exc:
        SceneGenerator.generate_scene(RngStream(0,rngStream.SCENE_GEN),WorkspaceConfig(width=100.0,height=100.0),max_rejections=50)
    assert exc.value.errorCode==ExperimentException.GENERATION_TIMEOUT
    assert '50 rejections' in str(exc.value)

def test_generation_seed_sweep():
    # streams of end-to-end trials and of the former generated benchmark
    streams = [RngStream(seed,rngStream.SCENE_GEN,(trial,)) for (seed,trial) in ((1,31),(1,152),(42,44),(20240101,65))]
    streams+= [RngStream(1,rngStream.SCENE_GEN,(trial,)) for trial in range(225)]
    for rng in streams:
        assert is_valid(SceneGenerator.generate_scene(rng))

def test_benchmark_frozen(benchmark):
    assert len(benchmark)==SceneGenerator.BENCHMARK_SIZE
    assert benchmark[7]==SceneGenerator.benchmark_scene(7)
    assert all(is_valid(s) for s in benchmark)
    assert all(s.workspace==WorkspaceConfig() for s in benchmark)

def test_benchmark_matches_manifest():
    manifest = SceneGenerator.verify_benchmark()
    assert manifest['version']==SceneGenerator.BENCHMARK_VERSION
    names    = sorted(n for n in os.listdir(SceneGenerator.BENCHMARK_DIR) if n.endswith('.json'))
    assert names==sorted(manifest['scenes'])
    assert names==[os.path.basename(SceneGenerator.scene_file('',i)) for i in range(SceneGenerator.BENCHMARK_SIZE)]

def test_benchmark_tampering_detected(tmp_path,monkeypatch):
    copy = tmp_path/'benchmark'
    shutil.copytree(SceneGenerator.BENCHMARK_DIR,str(copy))
    monkeypatch.setattr(SceneGenerator,'BENCHMARK_DIR',str(copy))
    SceneGenerator.verify_benchmark()
    with open(SceneGenerator.scene_file(str(copy),42),'a') as f:
        f.write('\n')
    with pytest.raises(ExperimentException) as exc:
        SceneGenerator.verify_benchmark()
    assert exc.value.errorCode==ExperimentException.BENCHMARK_MISMATCH
    assert 'scene_042.json' in str(exc.value)

def test_benchmark_index_range():
    with pytest.raises(ExperimentException):
        SceneGenerator.benchmark_scene(SceneGenerator.BENCHMARK_SIZE)

def test_benchmark_needs_singulation(benchmark):
    cluttered = sum(not PlanarSim.all_pegs_graspable(s) for s in benchmark)
    assert cluttered>=30
    assert cluttered==SceneGenerator.BENCHMARK_SIZE

def test_write_read_scenes(tmp_path):
    directory = str(tmp_path/'scenes')
    paths     = SceneGenerator.write_scenes(directory,count=5,seed=9)
    assert [os.path.basename(p) for p in paths]==['scene_{0:03d}.json'.format(i) for i in range(5)]
    assert SceneGenerator.read_scenes(directory)==SceneGenerator.generate_scenes(5,seed=9)
