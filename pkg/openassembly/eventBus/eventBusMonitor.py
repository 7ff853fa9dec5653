# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
import logging
log = logging.getLogger('eventBusMonitor')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import threading
import copy
import json

from pydispatch import dispatcher

class eventBusMonitor(object):
    '''
    Counts every signal crossing the bus, per (sender, signal).
    '''

    def __init__(self):

        # log
        log.info("create instance")

        # local variables
        self.dataLock                  = threading.Lock()
        self.stats                     = {}

        # give this instance a name
        self.name                      = 'eventBusMonitor'

        # connect to dispatcher
        dispatcher.connect(
            self._eventBusNotification,
        )

    #======================== public ==========================================

    def getStats(self):

        # get a copy of stats
        with self.dataLock:
            tempStats = copy.deepcopy(self.stats)

        # format as a list of dictionaries
        returnVal = [
            {
                'sender': k[0],
                'signal': k[1],
                'num':    v,
            } for (k,v) in sorted(tempStats.items())
        ]

        # send back JSON string
        return json.dumps(returnVal)

    def getCount(self,sender,signal):
        with self.dataLock:
            return self.stats.get((sender,signal),0)

    def disconnect(self):
        dispatcher.disconnect(self._eventBusNotification)

    #======================== private =========================================

    def _eventBusNotification(self,signal,sender,data):
        '''
        Adds the signal to the stats.
        '''

        with self.dataLock:
            key = (str(sender),str(signal))
            if key not in self.stats:
                self.stats[key] = 0
            self.stats[key] += 1
