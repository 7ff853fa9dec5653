# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

from openassembly.AssemblyException import AssemblyException

class ExperimentException(AssemblyException):

    GENERATION_TIMEOUT = 50
    BAD_SPEC           = 51
    EMPTY_REPORT       = 52
    IO_FAILURE         = 53
    TRIAL_FAILED       = 54
    BENCHMARK_MISMATCH = 55

    descriptions = {
        GENERATION_TIMEOUT: 'no valid scene within the rejection budget',
        BAD_SPEC:           'invalid experiment specification',
        EMPTY_REPORT:       'no report rows',
        IO_FAILURE:         'could not write report',
        TRIAL_FAILED:       'trial raised an error',
        BENCHMARK_MISMATCH: 'benchmark scene files do not match their manifest',
    }
