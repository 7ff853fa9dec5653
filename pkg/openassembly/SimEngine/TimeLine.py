# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

import logging

class TimeLineStats(object):

    def __init__(self):
        self.numEvents  = 0

    def incrementEvents(self):
        self.numEvents += 1

    def getNumEvents(self):
        return self.numEvents

class TimeLineEvent(object):

    def __init__(self,atTime,duration,stage,desc):
        self.atTime     = atTime
        self.duration   = duration
        self.stage      = stage
        self.desc       = desc

    def __str__(self):
        return '{0:.3f} {1}: {2}'.format(self.atTime,self.stage,self.desc)

class TimeLine(object):
    '''
    The simulated clock of one pipeline run.

    Stages advance the clock by their configured robot-motion durations;
    the clock never moves backwards.
    '''

    def __init__(self):

        # local variables
        self.currentTime          = 0.0 # current time, s
        self.timeline             = []  # list of past events
        self.stats                = TimeLineStats()

        # logging
        self.log                  = logging.getLogger('TimeLine')
        self.log.setLevel(logging.ERROR)
        self.log.addHandler(logging.NullHandler())

    #======================== public ==========================================

    def getCurrentTime(self):
        return self.currentTime

    def advance(self,duration,stage,desc=''):
        '''
        Moves the clock forward.

        :param duration: Simulated seconds spent, >= 0.
        :param stage:    The stage the time is charged to.
        :param desc:     A description of what took the time.

        :returns: The new current time.
        '''

        # make sure time does not go backwards
        assert duration>=0,'negative duration {0} for {1}'.format(duration,stage)

        self.currentTime += duration
        self.timeline.append(TimeLineEvent(self.currentTime,duration,stage,desc))

        # log
        if self.log.isEnabledFor(logging.DEBUG):
            self.log.debug('now {0:.3f}, {1} took {2:.3f}s ({3})'.format(self.currentTime,stage,duration,desc))

        # update statistics
        self.stats.incrementEvents()

        return self.currentTime

    def getEvents(self):
        return [[ev.atTime,ev.stage,ev.desc] for ev in self.timeline]

    def getDurationsByStage(self):
        '''
        :returns: A dictionary of the simulated seconds charged to each stage,
                  in order of first appearance.
        '''
        returnVal = {}
        for ev in self.timeline:
            returnVal[ev.stage] = returnVal.get(ev.stage,0.0)+ev.duration
        return returnVal

    def getStats(self):
        return self.stats

    #======================== private =========================================

    def _printTimeline(self):
        output  = ''
        for event in self.timeline:
            output += '\n'+str(event)
        return output
