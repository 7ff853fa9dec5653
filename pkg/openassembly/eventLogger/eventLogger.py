# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Writes the pipeline events published on the event bus to a JSON-lines file,
one event per line.
'''
import logging
log = logging.getLogger('eventLogger')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import json
import threading

from openassembly.eventBus                    import eventBusClient
from openassembly.assemblyState.assemblyState import SIGNAL_PIPELINE_EVENT

class eventLogger(eventBusClient.eventBusClient):

    def __init__(self,path,sender=eventBusClient.eventBusClient.WILDCARD):

        # log
        log.info("create instance")

        # store params
        self.path                 = path

        # local variables
        self.fileLock             = threading.Lock()
        self.numLogged            = 0
        self.logfile              = open(self.path,'w')

        # initialize parent class
        eventBusClient.eventBusClient.__init__(
            self,
            name                  = 'eventLogger@{0}'.format(path),
            registrations         = [
                {
                    'sender':     sender,
                    'signal':     SIGNAL_PIPELINE_EVENT,
                    'callback':   self._logEvent,
                },
            ]
        )

    #======================== public ==========================================

    def getNumLogged(self):
        return self.numLogged

    def close(self):
        self.disconnect()
        with self.fileLock:
            if not self.logfile.closed:
                self.logfile.close()

    def __enter__(self):
        return self

    def __exit__(self,*exc):
        self.close()

    #======================== private =========================================

    def _logEvent(self,sender,signal,data):
        line = dict(data,run=sender)
        with self.fileLock:
            if self.logfile.closed:
                log.warning('event {0} from {1} after close'.format(data.get('seq'),sender))
                return
            self.logfile.write(json.dumps(line,sort_keys=True)+'\n')
            self.logfile.flush()
            self.numLogged += 1

#============================ helpers =========================================

def read_event_log(path):
    '''
    :returns: The logged events as dictionaries, in file order.
    '''
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]

def replay_key(event):
    '''
    A logged event without its wall time: two runs of the same seed and
    config log identical keys.
    '''
    content = {k: v for (k,v) in event.items() if k!='wall_time_s'}
    return json.dumps(content,sort_keys=True)
