#!/usr/bin/env python
# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.

import sys

if __name__=="__main__":
    # Update pythonpath if running in in-tree development mode
    import pathHelper
    pathHelper.updatePath()

from openassembly import openAssemblyApp

#============================ main ============================================

if __name__=="__main__":
    sys.exit(openAssemblyApp.main())
