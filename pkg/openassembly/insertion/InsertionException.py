# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

from openassembly.AssemblyException import AssemblyException

class InsertionException(AssemblyException):

    WINDOW_TOO_LARGE   = 40
    NOT_FITTED         = 41
    ERROR_OUT_OF_RANGE = 42

    descriptions = {
        WINDOW_TOO_LARGE:   'averaging window does not fit the trace',
        NOT_FITTED:         'insertion policy not fitted',
        ERROR_OUT_OF_RANGE: 'injected error out of range',
    }
