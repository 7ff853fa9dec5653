# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Workspace, assembly order and scene types, the scene invariants and the
scene file format.
'''
import logging
log = logging.getLogger('typeScene')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import itertools
import json
import math
from dataclasses import dataclass, field, replace

from openassembly.openType.SceneException import SceneException
from openassembly.openType.typePart       import PartClass, ALL_PARTS, footprint_radius
from openassembly.openType.typePose       import Pose2D

CONTACT_EPSILON = 1e-6 # mm

@dataclass(frozen=True)
class WorkspaceConfig(object):
    '''
    The manipulation surface (origin at a corner) and the assembly plate
    holding the two holes. The plate is a separate frame next to the
    surface.
    '''

    width:              float = 600.0
    height:             float = 450.0
    hole_positions:     tuple = ((700.0,190.0),(770.0,190.0))
    hole_diameter:      float = 15.0

    @property
    def hole_spacing(self):
        ((x0,y0),(x1,y1)) = self.hole_positions
        return math.hypot(x1-x0,y1-y0)

    @property
    def center(self):
        return (self.width/2,self.height/2)

    def contains(self,x,y):
        return 0.0<=x<=self.width and 0.0<=y<=self.height

    def holes_off_surface(self):
        return not any(self.contains(x,y) for (x,y) in self.hole_positions)

@dataclass(frozen=True)
class AssemblyConfig(object):
    '''
    The fixed assembly order.
    '''

    PEG1        = 'peg1'
    PEG2        = 'peg2'
    GEAR_LARGE  = 'gear_large'
    GEAR_SMALL  = 'gear_small'
    MESH        = 'mesh'

    stages:     tuple = (PEG1,PEG2,GEAR_LARGE,GEAR_SMALL,MESH)

    def __post_init__(self):
        if tuple(self.stages)!=(self.PEG1,self.PEG2,self.GEAR_LARGE,self.GEAR_SMALL,self.MESH):
            raise ValueError('assembly order is fixed, got {0}'.format(self.stages))

    def index(self,stage):
        return self.stages.index(stage)

@dataclass(frozen=True)
class Scene(object):
    '''
    Poses of the parts lying on the manipulation surface.

    ``parts`` is a tuple of ``(PartClass, Pose2D)`` pairs in
    :data:`ALL_PARTS` order. Parts leave the scene once they are picked up.
    '''

    parts:      tuple
    workspace:  WorkspaceConfig = field(default_factory=WorkspaceConfig)

    def __post_init__(self):
        order = {p: i for (i,p) in enumerate(ALL_PARTS)}
        parts = tuple(sorted(((PartClass(c),p) for (c,p) in self.parts),key=lambda e: order[e[0]]))
        object.__setattr__(self,'parts',parts)

    def __str__(self):
        return ', '.join('{0}@{1}'.format(c,p) for (c,p) in self.parts)

    #======================== public ==========================================

    @property
    def classes(self):
        return tuple(c for (c,_) in self.parts)

    def has(self,part):
        return part in self.classes

    def pose(self,part):
        for (c,p) in self.parts:
            if c==part:
                return p
        raise SceneException(SceneException.UNKNOWN_PART,str(part),parts=(part,))

    def others(self,part):
        return tuple((c,p) for (c,p) in self.parts if c!=part)

    def with_pose(self,part,pose):
        self.pose(part)
        return replace(self,parts=tuple((c,pose if c==part else p) for (c,p) in self.parts))

    def with_poses(self,poses):
        return replace(self,parts=tuple((c,poses.get(c,p)) for (c,p) in self.parts))

    def without(self,part):
        self.pose(part)
        return replace(self,parts=self.others(part))

def validate_scene(scene,require_all=True):
    '''
    Checks the scene invariants.

    :param require_all: If true, each of the four parts must be present.

    :raises: SceneException naming the violated invariant and the
             offending part(s).
    '''

    classes = scene.classes
    if len(set(classes))!=len(classes):
        raise SceneException(SceneException.OVERLAP,'duplicate part entry',parts=classes)

    if require_all:
        for part in ALL_PARTS:
            if part not in classes:
                raise SceneException(SceneException.MISSING_PART,str(part),parts=(part,))

    for (part,pose) in scene.parts:
        if not scene.workspace.contains(pose.x,pose.y):
            raise SceneException(SceneException.OUT_OF_BOUNDS,'{0} at {1}'.format(part,pose),parts=(part,))

    for ((ca,pa),(cb,pb)) in itertools.combinations(scene.parts,2):
        if pa.distance_to(pb)<footprint_radius(ca)+footprint_radius(cb)-CONTACT_EPSILON:
            raise SceneException(SceneException.OVERLAP,'{0} and {1}'.format(ca,cb),parts=(ca,cb))

def is_valid(scene,require_all=True):
    try:
        validate_scene(scene,require_all)
    except SceneException:
        return False
    return True

#============================ scene files =====================================

def scene_to_dict(scene,seed=None):
    return {
        'seed':         seed,
        'workspace':    {
            'w':        scene.workspace.width,
            'h':        scene.workspace.height,
        },
        'parts':        [
            {
                'class':    c.value,
                'x_mm':     p.x,
                'y_mm':     p.y,
                'yaw_rad':  p.yaw,
            } for (c,p) in scene.parts
        ],
    }

def scene_from_dict(content):
    '''
    :returns: A tuple ``(scene, seed)``.
    '''
    try:
        workspace = WorkspaceConfig(
            width       = float(content['workspace']['w']),
            height      = float(content['workspace']['h']),
        )
        parts     = tuple(
            (
                PartClass.fromSymbol(e['class']),
                Pose2D(e['x_mm'],e['y_mm'],e['yaw_rad']),
            ) for e in content['parts']
        )
    except (KeyError,TypeError,ValueError) as err:
        raise SceneException(SceneException.BAD_SCENE_FILE,err)
    return (Scene(parts,workspace),content.get('seed'))

def save_scene(scene,path,seed=None):
    with open(path,'w') as f:
        json.dump(scene_to_dict(scene,seed),f,indent=4)
        f.write('\n')

def load_scene(path):
    '''
    :returns: A tuple ``(scene, seed)``.
    '''
    try:
        with open(path) as f:
            content = json.load(f)
    except ValueError as err:
        raise SceneException(SceneException.BAD_SCENE_FILE,'{0}: {1}'.format(path,err))
    return scene_from_dict(content)
