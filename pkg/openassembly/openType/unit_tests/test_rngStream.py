#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..', '..'))                       # root/

import numpy as np
import pytest

from openassembly.openType           import rngStream
from openassembly.openType.rngStream import RngStream

#============================ tests ===========================================

def test_same_seed_same_draws():
    first  = RngStream(7,rngStream.PLANNER).uniform(size=20)
    second = RngStream(7,rngStream.PLANNER).uniform(size=20)
    assert np.array_equal(first,second)

def test_streams_independent():
    planner = RngStream(7,rngStream.PLANNER).uniform(size=20)
    slip    = RngStream(7,rngStream.SLIP).uniform(size=20)
    other   = RngStream(8,rngStream.PLANNER).uniform(size=20)
    assert not np.array_equal(planner,slip)
    assert not np.array_equal(planner,other)

def test_child_ignores_parent_position():
    parent = RngStream(3,rngStream.GRASP)
    before = parent.child(4).normal(size=5)
    parent.normal(size=100)
    after  = parent.child(4).normal(size=5)
    assert np.array_equal(before,after)
    assert not np.array_equal(parent.child(4).normal(size=5),parent.child(5).normal(size=5))

def test_sibling_keeps_path():
    stream  = RngStream(3,rngStream.PLANNER).child(2)
    sibling = stream.sibling(rngStream.SLIP)
    assert sibling.path==(2,)
    assert np.array_equal(sibling.random(size=3),RngStream(3,rngStream.SLIP,(2,)).random(size=3))

def test_large_and_negative_seeds():
    assert RngStream(-1,'x').seed==rngStream.SEED_MASK
    assert np.array_equal(RngStream(2**64+5,'x').random(size=3),RngStream(5,'x').random(size=3))

def test_integers_range():
    draws = RngStream(1,'x').integers(4,size=1000)
    assert draws.min()==0
    assert draws.max()==3

def test_repr():
    assert repr(RngStream(1,'planner',(2,3)))=="RngStream(seed=1, stream_id='planner', path=(2, 3))"
