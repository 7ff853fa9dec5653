# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
import logging
log = logging.getLogger('OAtracer')
log.setLevel(logging.DEBUG)
log.addHandler(logging.NullHandler())

import threading

import yappi

class OAtracer(object):
    '''
    Profiles the application with yappi and logs the most expensive
    functions every ``TRACING_INTERVAL`` seconds, and once more on close.
    '''

    TRACING_INTERVAL = 30
    NUM_FUNCTIONS    = 20

    def __init__(self):
        yappi.set_clock_type('cpu')
        yappi.start()
        self.timer = None
        self._schedule()

    #======================== public ==========================================

    def close(self):
        if self.timer is not None:
            self.timer.cancel()
        self._logTracingStats(reschedule=False)
        yappi.stop()

    #======================== private =========================================

    def _schedule(self):
        self.timer        = threading.Timer(self.TRACING_INTERVAL,self._logTracingStats)
        self.timer.daemon = True
        self.timer.start()

    def _logTracingStats(self,reschedule=True):
        stats = yappi.get_func_stats()
        stats.sort('ttot','desc')
        for stat in list(stats)[:self.NUM_FUNCTIONS]:
            self._logFunctionStat(stat)
        for stat in yappi.get_thread_stats():
            self._logThreadStat(stat)
        if reschedule:
            self._schedule()

    def _logThreadStat(self,stat):
        log.info("Thread Trace: {0} {1:.3f}s".format(stat.name,stat.ttot))

    def _logFunctionStat(self,stat):
        log.info("Function Trace: {0} calls={1} ttot={2:.3f}s".format(stat.full_name,stat.ncall,stat.ttot))
