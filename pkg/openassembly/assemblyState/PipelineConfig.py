# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Configuration of one assembly pipeline run: noise switches and magnitudes,
retry budgets, the simulated duration of each stage and the master seed.
'''
import logging
log = logging.getLogger('PipelineConfig')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import json
from dataclasses import dataclass, field, asdict, fields, replace

from openassembly.insertion import Meshing

# simulated robot-motion seconds
DEFAULT_DURATIONS = {
    'Perceive':             2.0,
    'Singulate':            6.0,    # per interaction
    'GraspPeg':             8.0,
    'Reorient':             6.0,
    'EstimateOffset':       3.0,
    'InsertPeg':           10.0,
    'GraspGear':            8.0,
    'InsertGear':           5.0,
    'InsertGearCorrection': 2.0,    # per correction
    'MeshGears':            4.0,    # per attempt
}

@dataclass(frozen=True)
class PipelineConfig(object):

    seed:                   int   = 0

    # perception
    perception_noise:       bool  = True
    noise_sigma:            float = 1.0     # mm
    n_points:               int   = 2000

    # singulation
    slip:                   bool  = True
    p_slip:                 float = 0.15
    n_samples:              int   = 100
    max_interactions:       int   = 10

    # pegs
    use_offset_estimator:   bool  = True
    offset_train_size:      int   = 100
    tactile_sigma:          float = 0.2
    peg_retries:            int   = 3

    # gears
    policy_per_class:       int   = 50
    force_sigma:            float = 0.3     # N
    gear_step_mm:           float = 1.5
    gear_max_iters:         int   = 6
    gear_slip_mm:           float = 4.0
    gear_retries:           int   = 3

    # meshing
    mesh_rho:               float = 0.7
    mesh_force:             float = 10.0    # N
    mesh_radius:            float = 20.0    # mm
    mesh_attempts:          int   = 5

    durations:              dict  = field(default_factory=lambda: dict(DEFAULT_DURATIONS))

    def __post_init__(self):
        for name in ('n_samples','max_interactions','offset_train_size','peg_retries','policy_per_class',
                     'gear_max_iters','gear_retries','mesh_attempts','n_points'):
            if getattr(self,name)<0:
                raise ValueError('{0} must be >= 0'.format(name))
        for name in ('noise_sigma','tactile_sigma','force_sigma','gear_slip_mm'):
            if getattr(self,name)<0:
                raise ValueError('{0} must be >= 0'.format(name))
        if not 0<=self.p_slip<=1:
            raise ValueError('p_slip must lie in [0, 1]')
        if self.mesh_attempts>Meshing.MAX_ATTEMPTS:
            raise ValueError('mesh_attempts must be <= {0}'.format(Meshing.MAX_ATTEMPTS))
        durations = dict(DEFAULT_DURATIONS)
        durations.update(self.durations)
        unknown   = set(durations)-set(DEFAULT_DURATIONS)
        if unknown:
            raise ValueError('unknown stage duration(s) {0}'.format(sorted(unknown)))
        for (stage,seconds) in durations.items():
            if seconds<0:
                raise ValueError('duration of {0} must be >= 0'.format(stage))
        object.__setattr__(self,'durations',durations)

    def with_seed(self,seed):
        return replace(self,seed=int(seed))

    def duration(self,stage):
        return self.durations[stage]

    def toDict(self):
        return asdict(self)

#============================ files ===========================================

def config_from_dict(content):
    known   = {f.name for f in fields(PipelineConfig)}
    unknown = set(content)-known
    if unknown:
        raise ValueError('unknown pipeline option(s) {0}'.format(sorted(unknown)))
    return PipelineConfig(**content)

def load_config(path):
    with open(path) as f:
        content = json.load(f)
    if log.isEnabledFor(logging.DEBUG):
        log.debug('loaded pipeline config from {0}'.format(path))
    return config_from_dict(content)

def save_config(config,path):
    with open(path,'w') as f:
        json.dump(config.toDict(),f,indent=4,sort_keys=True)
