#!/usr/bin/env python

import os
import sys
here = sys.path[0]
sys.path.insert(0, os.path.join(here, '..', '..', '..'))                       # root/

import logging
import logging.handlers

import pytest

from openassembly.SimEngine.TimeLine  import TimeLine
from openassembly.SimEngine.SimEngine import SimEngine, SimEngineStats

#============================ logging =========================================

LOGFILE_NAME = 'test_TimeLine.log'

log = logging.getLogger('test_TimeLine')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

logHandler = logging.handlers.RotatingFileHandler(LOGFILE_NAME,
                                                  backupCount=5,
                                                  mode='w')
logHandler.setFormatter(logging.Formatter("%(asctime)s [%(name)s:%(levelname)s] %(message)s"))
for loggerName in ['test_TimeLine',
                   'TimeLine',
                   'SimEngine',]:
    temp = logging.getLogger(loggerName)
    temp.setLevel(logging.DEBUG)
    temp.addHandler(logHandler)

#============================ tests ===========================================

def test_advance():
    timeline = TimeLine()
    assert timeline.getCurrentTime()==0.0
    assert timeline.advance(2.0,'Perceive')==2.0
    assert timeline.advance(6.0,'Singulate','interaction 1')==8.0
    assert timeline.advance(6.0,'Singulate','interaction 2')==14.0
    assert timeline.getEvents()==[
        [2.0, 'Perceive', ''],
        [8.0, 'Singulate','interaction 1'],
        [14.0,'Singulate','interaction 2'],
    ]
    assert timeline.getDurationsByStage()=={'Perceive': 2.0, 'Singulate': 12.0}
    assert timeline.getStats().getNumEvents()==3

def test_time_never_goes_back():
    timeline = TimeLine()
    with pytest.raises(AssertionError):
        timeline.advance(-1.0,'Perceive')

def test_engines_do_not_share_clocks():
    first  = SimEngine()
    second = SimEngine()
    first.charge(3.0,'Perceive')
    assert first.getCurrentTime()==3.0
    assert second.getCurrentTime()==0.0

def test_wall_time_stats():
    stats = SimEngineStats()
    assert stats.indicateStop()==0.0
    stats.indicateStart()
    delta = stats.indicateStop()
    assert delta>=0.0
    assert stats.getDurationRunning()==delta
