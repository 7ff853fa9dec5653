# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

from openassembly.AssemblyException import AssemblyException

class PerceptionException(AssemblyException):

    TOO_FEW_POINTS   = 20
    EMPTY_CLOUD      = 21
    SINGLE_POINT     = 22
    NOT_SYMMETRIC    = 23

    descriptions = {
        TOO_FEW_POINTS: 'too few points requested',
        EMPTY_CLOUD:    'empty point cloud',
        SINGLE_POINT:   'covariance needs at least two points',
        NOT_SYMMETRIC:  'matrix is not symmetric',
    }
