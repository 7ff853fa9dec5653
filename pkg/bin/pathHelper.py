# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Helper module to fix the Python path.

The launchers in bin/ can run from an installed package, or straight from a
source checkout. In the latter case the repository root must be on the path
so that the openassembly package imports.
'''

import sys
import os

def updatePath():
    '''
    Puts the repository root first on the path when this file sits in a
    source checkout.
    '''
    root = os.path.abspath(os.path.join(os.path.dirname(__file__),'..'))
    if os.path.isdir(os.path.join(root,'openassembly')) and root not in sys.path:
        sys.path.insert(0,root)
