# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Named, seeded random streams.

One master seed is split into named streams (``scene-gen``, ``planner``,
``slip``, ``tactile-noise``, ``force-noise``, ...) so that the draws of one
module do not depend on how many draws another module made before it.
Streams are further split into index-partitioned children for trials and
training samples.
'''
import logging
log = logging.getLogger('rngStream')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import zlib

import numpy as np

SCENE_GEN       = 'scene-gen'
PLANNER         = 'planner'
SLIP            = 'slip'
TACTILE_NOISE   = 'tactile-noise'
FORCE_NOISE     = 'force-noise'
PERCEPTION      = 'perception'
GRASP           = 'grasp'
MESHING         = 'meshing'

SEED_MASK       = 0xFFFFFFFFFFFFFFFF

class RngStream(object):
    '''
    A reproducible draw sequence identified by ``(seed, stream_id)`` and an
    optional child path.

    The underlying generator is PCG64 seeded through a numpy SeedSequence
    whose spawn key is the CRC32 of the stream name followed by the child
    path, so sequences are identical across runs and platforms.
    '''

    def __init__(self,seed,stream_id,path=()):

        # store params
        self.seed           = int(seed) & SEED_MASK
        self.stream_id      = str(stream_id)
        self.path           = tuple(int(i) for i in path)

        # local variables
        spawnKey            = (zlib.crc32(self.stream_id.encode('utf-8')),)+self.path
        self._generator     = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed,spawn_key=spawnKey))
        )

    def __repr__(self):
        return 'RngStream(seed={0}, stream_id={1!r}, path={2})'.format(self.seed,self.stream_id,self.path)

    #======================== public ==========================================

    @property
    def generator(self):
        return self._generator

    def child(self,index):
        '''
        Returns the independent sub-stream number ``index``; the parent's own
        draw position does not affect it.
        '''
        return RngStream(self.seed,self.stream_id,self.path+(index,))

    def sibling(self,stream_id):
        '''
        Returns the stream of the same seed and child path under another name.
        '''
        return RngStream(self.seed,stream_id,self.path)

    def uniform(self,low=0.0,high=1.0,size=None):
        return self._generator.uniform(low,high,size)

    def normal(self,loc=0.0,scale=1.0,size=None):
        return self._generator.normal(loc,scale,size)

    def random(self,size=None):
        return self._generator.random(size)

    def integers(self,low,high=None,size=None):
        return self._generator.integers(low,high,size)
