# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

class AssemblyException(Exception):
    '''
    Base class of all errors raised by the openassembly packages.

    Sub-classes define their error codes as class constants and a
    ``descriptions`` dictionary mapping each code to a human readable text.
    '''

    GENERIC          = 1

    descriptions = {
        GENERIC:        'generic error',
    }

    def __init__(self,errorCode,details=None):
        self.errorCode  = errorCode
        self.details    = details
        Exception.__init__(self,errorCode,details)

    def __str__(self):
        try:
            output = self.descriptions[self.errorCode]
            if self.details:
                output += ': ' + str(self.details)
            return output
        except KeyError:
            return "Unknown error: #" + str(self.errorCode)
