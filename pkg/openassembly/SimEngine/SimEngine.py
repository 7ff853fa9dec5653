# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

import logging
import time

from openassembly.SimEngine          import TimeLine
from openassembly.SimEngine          import PlanarSim
from openassembly.openType.typeScene import WorkspaceConfig

class SimEngineStats(object):
    '''
    Wall-clock computation time, kept apart from simulated time.
    '''

    def __init__(self):
        self.durationRunning = 0.0
        self.running         = False
        self.txStart         = None

    def indicateStart(self):
        self.txStart = time.perf_counter()
        self.running = True

    def indicateStop(self):
        '''
        :returns: The wall time of the interval just closed.
        '''
        if self.running:
            delta                 = time.perf_counter()-self.txStart
            self.durationRunning += delta
            self.running          = False
            return delta
        return 0.0

    def getDurationRunning(self):
        if self.running:
            return self.durationRunning+(time.perf_counter()-self.txStart)
        else:
            return self.durationRunning

class SimEngine(object):
    '''
    The simulation context of one pipeline run: the workspace, the gripper
    and slip models, the simulated clock and the wall-time statistics.

    One engine is created per run, so runs executed side by side in a
    worker pool never share a clock.
    '''

    def __init__(self,workspace=None,gripper=None,slip_model=None,step_mm=PlanarSim.DEFAULT_STEP,
                 loghandler=logging.NullHandler()):

        # store params
        self.workspace            = workspace or WorkspaceConfig()
        self.gripper              = gripper or PlanarSim.DEFAULT_GRIPPER
        self.slip_model           = slip_model or PlanarSim.SlipModel()
        self.step_mm              = step_mm
        self.loghandler           = loghandler

        # local variables
        self.timeline             = TimeLine.TimeLine()
        self.stats                = SimEngineStats()

        # logging this module
        self.log                  = logging.getLogger('SimEngine')
        self.log.setLevel(logging.INFO)
        self.log.addHandler(logging.NullHandler())

        # logging core modules
        for loggerName in [
                'SimEngine',
                'TimeLine',
                'PlanarSim',
            ]:
            temp = logging.getLogger(loggerName)
            if loghandler not in temp.handlers:
                temp.addHandler(loghandler)

    #======================== public ==========================================

    def getCurrentTime(self):
        return self.timeline.getCurrentTime()

    def charge(self,duration,stage,desc=''):
        return self.timeline.advance(duration,stage,desc)

    def slide(self,scene,action,rng):
        return PlanarSim.apply_slide(scene,action,self.slip_model,rng,self.step_mm)

    def graspable(self,scene,part):
        return PlanarSim.graspable(scene,part,self.gripper)

    def all_pegs_graspable(self,scene):
        return PlanarSim.all_pegs_graspable(scene,self.gripper)

    def getTimeline(self):
        return self.timeline

    def getStats(self):
        return self.stats
