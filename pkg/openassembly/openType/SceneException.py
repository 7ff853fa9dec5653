# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

from openassembly.AssemblyException import AssemblyException

class SceneException(AssemblyException):

    OVERLAP          = 10
    OUT_OF_BOUNDS    = 11
    MISSING_PART     = 12
    UNKNOWN_PART     = 13
    BAD_SCENE_FILE   = 14

    descriptions = {
        OVERLAP:        'part footprints overlap',
        OUT_OF_BOUNDS:  'part outside the workspace',
        MISSING_PART:   'part missing from scene',
        UNKNOWN_PART:   'part not in scene',
        BAD_SCENE_FILE: 'malformed scene file',
    }

    def __init__(self,errorCode,details=None,parts=()):
        AssemblyException.__init__(self,errorCode,details)
        self.parts      = tuple(parts)

    def __reduce__(self):
        return (self.__class__,(self.errorCode,self.details,self.parts))
