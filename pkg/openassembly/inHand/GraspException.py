# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

from openassembly.AssemblyException import AssemblyException

class GraspException(AssemblyException):

    NOT_A_PEG        = 30
    BAD_GRASP_CONFIG = 31
    NOT_FITTED       = 32
    NOT_REORIENTED   = 33

    descriptions = {
        NOT_A_PEG:        'not a peg estimate',
        BAD_GRASP_CONFIG: 'invalid grasp configuration',
        NOT_FITTED:       'offset estimator not fitted',
        NOT_REORIENTED:   'peg not reoriented for insertion',
    }
