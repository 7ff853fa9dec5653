from setuptools     import setup
import os
from openassembly import oaVersion

'''
This implementation of the traditional setup.py uses the root package's
package_data parameter to store data files, rather than the application-level
data_files parameter. This keeps openAssembly and its configuration files in
a single tree of directories, and so is more portable.

This implementation is based on setuptools, and builds the list of module
dependencies by reading 'requirements.txt'.
'''

VERSION   = '.'.join([str(v) for v in oaVersion.VERSION])
with open('README.md') as f:
    LONG_DESCRIPTION = f.read()

# Assumes requirements file contains only module lines and comments.
deplist = []
with open(os.path.join('requirements.txt')) as f:
    for line in f:
        if line.strip() and not line.startswith('#'):
            deplist.append(line.strip())

setup(
    name             = 'openAssembly',
    packages         = ['openassembly',
                        'openassembly.SimEngine', 'openassembly.assemblyState',
                        'openassembly.eventBus', 'openassembly.eventLogger',
                        'openassembly.experiments', 'openassembly.inHand',
                        'openassembly.insertion', 'openassembly.openType',
                        'openassembly.perception', 'openassembly.singulation'],
    scripts          = ['bin/openAssemblyApp.py', 'bin/openAssemblyCli.py', 'bin/pathHelper.py'],
    package_dir      = {'': '.', 'openassembly': 'openassembly'},
    package_data     = {'openassembly': [
                        'data/*.conf',
                        'data/*.json',
                        'data/benchmark/*.json',
                        ]},
    entry_points     = {'console_scripts': ['openassembly = openassembly.openAssemblyApp:main']},
    install_requires = deplist,
    # Must extract zip to edit conf files.
    zip_safe         = False,
    version          = VERSION,
    author           = 'openAssembly contributors',
    description      = 'Simulation and planning for robotic gearbox assembly from a cluttered table',
    long_description = LONG_DESCRIPTION,
    long_description_content_type = 'text/markdown',
    keywords         = ['robotics','assembly','singulation','in-hand manipulation','peg-in-hole','simulation'],
    platforms        = ['platform-independent'],
    license          = 'BSD 3-Clause',
    python_requires  = '>=3.8',
    classifiers      = [
                       'Development Status :: 3 - Alpha',
                       'Intended Audience :: Science/Research',
                       'License :: OSI Approved :: BSD License',
                       'Operating System :: OS Independent',
                       'Programming Language :: Python :: 3',
                       'Topic :: Scientific/Engineering',
                       ],
)
