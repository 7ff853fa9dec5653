# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Random initial scenes and the frozen singulation benchmark.

A scene is either spread, with every center uniform over the workspace
inset by the edge margin, or cluttered. In a cluttered scene the first part
is uniform over a disc of radius 100 mm and every later part is set down
next to a part already placed, a few millimetres from contact, so that the
pile stays inside the disc. Parts are placed one at a time in assembly order
and a draw that overlaps an already placed part is rejected. When one part
keeps being rejected, the partial scene is dropped and placement starts
over from the first part.

The benchmark is not regenerated: its 100 scene files ship with the package
under ``data/benchmark`` and are checked against the hashes in
``data/benchmark.json``.
'''
import logging
log = logging.getLogger('SceneGenerator')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import hashlib
import json
import math
import os

from openassembly.openType                      import rngStream
from openassembly.openType.rngStream            import RngStream
from openassembly.openType.typePart             import ALL_PARTS, footprint_radius
from openassembly.openType.typePose             import Pose2D
from openassembly.openType.typeScene            import Scene, WorkspaceConfig, CONTACT_EPSILON, save_scene, load_scene
from openassembly.experiments.ExperimentException import ExperimentException

EDGE_MARGIN         = 50.0      # mm
CLUTTER_PROBABILITY = 0.5
CLUTTER_RADIUS      = 100.0     # mm
CLUTTER_GAP         = 5.0       # mm, widest gap to the neighbour in a pile
MAX_REJECTIONS      = 10000
RESTART_AFTER       = 200       # rejections of one part before starting over

BENCHMARK_SEED      = 20240101
BENCHMARK_VERSION   = '2'
BENCHMARK_SIZE      = 100
BENCHMARK_DIR       = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),'data','benchmark')
BENCHMARK_MANIFEST  = os.path.join(os.path.dirname(BENCHMARK_DIR),'benchmark.json')

def _inBox(x,y,workspace,margin):
    return margin<=x<=workspace.width-margin and margin<=y<=workspace.height-margin

def _clutterCenter(rng,workspace,margin):
    # keep the whole disc inside the margin box when the workspace allows it
    inset = margin+CLUTTER_RADIUS
    if workspace.width-inset>inset and workspace.height-inset>inset:
        return (float(rng.uniform(inset,workspace.width-inset)),float(rng.uniform(inset,workspace.height-inset)))
    return (
        float(rng.uniform(margin,max(margin,workspace.width-margin))),
        float(rng.uniform(margin,max(margin,workspace.height-margin))),
    )

def _drawPosition(rng,part,placed,cluttered,center,workspace,margin):
    if not cluttered:
        return (
            rng.uniform(margin,max(margin,workspace.width-margin)),
            rng.uniform(margin,max(margin,workspace.height-margin)),
        )
    if not placed:
        r   = CLUTTER_RADIUS*math.sqrt(rng.random())
        phi = rng.uniform(-math.pi,math.pi)
        return (center[0]+r*math.cos(phi),center[1]+r*math.sin(phi))
    (other,pose) = placed[int(rng.integers(len(placed)))]
    phi  = rng.uniform(-math.pi,math.pi)
    dist = footprint_radius(part)+footprint_radius(other)+rng.uniform(0.0,CLUTTER_GAP)
    return (pose.x+dist*math.cos(phi),pose.y+dist*math.sin(phi))

def generate_scene(rng,workspace=None,clutter_probability=CLUTTER_PROBABILITY,
                   margin=EDGE_MARGIN,max_rejections=MAX_REJECTIONS):
    '''
    Rejection-samples a valid scene.

    :raises: ExperimentException ``GENERATION_TIMEOUT`` after
             ``max_rejections`` rejected draws in total, restarts included.
    '''
    workspace  = workspace or WorkspaceConfig()

    cluttered  = rng.random()<clutter_probability
    center     = _clutterCenter(rng,workspace,margin)

    rejections = 0
    restarts   = 0
    while True:
        placed = []
        for part in ALL_PARTS:
            for _ in range(RESTART_AFTER):
                (x,y) = _drawPosition(rng,part,placed,cluttered,center,workspace,margin)
                pose  = Pose2D(float(x),float(y),float(rng.uniform(-math.pi,math.pi)))

                if _inBox(pose.x,pose.y,workspace,margin) and (
                        not cluttered or math.hypot(pose.x-center[0],pose.y-center[1])<=CLUTTER_RADIUS
                    ) and all(
                        pose.distance_to(p)>=footprint_radius(part)+footprint_radius(c)-CONTACT_EPSILON
                        for (c,p) in placed
                    ):
                    placed.append((part,pose))
                    break

                rejections += 1
                if rejections>=max_rejections:
                    raise ExperimentException(
                        ExperimentException.GENERATION_TIMEOUT,
                        '{0} rejections placing {1}'.format(rejections,part),
                    )
            else:
                # dead end for this part
                break
        else:
            break
        restarts += 1

    if log.isEnabledFor(logging.DEBUG):
        log.debug('{0} scene after {1} rejections, {2} restarts'.format(
            'cluttered' if cluttered else 'spread',rejections,restarts))
    return Scene(tuple(placed),workspace)

def generate_scenes(count,seed=BENCHMARK_SEED,**kwargs):
    return [generate_scene(RngStream(seed,rngStream.SCENE_GEN,(i,)),**kwargs) for i in range(count)]

#============================ benchmark =======================================

def scene_file(directory,index):
    return os.path.join(directory,'scene_{0:03d}.json'.format(index))

def _sha256(path):
    with open(path,'rb') as f:
        return hashlib.sha256(f.read()).hexdigest()

def benchmark_manifest():
    with open(BENCHMARK_MANIFEST) as f:
        return json.load(f)

def verify_benchmark():
    '''
    Checks every committed benchmark file against its recorded hash.

    :raises: ExperimentException ``BENCHMARK_MISMATCH`` naming the first
             missing or altered file.
    '''
    manifest = benchmark_manifest()
    if manifest['version']!=BENCHMARK_VERSION or manifest['count']!=BENCHMARK_SIZE:
        raise ExperimentException(
            ExperimentException.BENCHMARK_MISMATCH,
            'manifest v{0} with {1} scenes'.format(manifest['version'],manifest['count']),
        )
    for (name,digest) in sorted(manifest['scenes'].items()):
        path = os.path.join(BENCHMARK_DIR,name)
        if not os.path.isfile(path) or _sha256(path)!=digest:
            raise ExperimentException(ExperimentException.BENCHMARK_MISMATCH,name)
    return manifest

def benchmark_scene(index):
    if not 0<=index<BENCHMARK_SIZE:
        raise ExperimentException(ExperimentException.BAD_SPEC,'benchmark index {0}'.format(index))
    return load_scene(scene_file(BENCHMARK_DIR,index))[0]

def benchmark_scenes(count=BENCHMARK_SIZE):
    return [benchmark_scene(i) for i in range(count)]

def write_scenes(directory,count=BENCHMARK_SIZE,seed=BENCHMARK_SEED):
    '''
    Writes freshly generated scenes as scene files.

    :returns: The written paths.
    '''
    try:
        os.makedirs(directory,exist_ok=True)
        paths = []
        for (i,scene) in enumerate(generate_scenes(count,seed)):
            path = scene_file(directory,i)
            save_scene(scene,path,seed=seed)
            paths.append(path)
    except OSError as err:
        raise ExperimentException(ExperimentException.IO_FAILURE,err)
    log.info('wrote {0} scenes (seed {1}) to {2}'.format(count,seed,directory))
    return paths

def read_scenes(directory):
    names = sorted(n for n in os.listdir(directory) if n.startswith('scene_') and n.endswith('.json'))
    return [load_scene(os.path.join(directory,n))[0] for n in names]
