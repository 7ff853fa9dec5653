# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Part classes of the gearbox and their geometry.

All lengths are in millimeters, angles in radians.
'''
import logging
log = logging.getLogger('typePart')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import enum
import math
from dataclasses import dataclass

class PartClass(enum.Enum):
    '''
    The four parts of the gearbox, valued by their short symbols.
    '''

    PEG1        = 'p1'
    PEG2        = 'p2'
    GEAR_LARGE  = 'g_l'
    GEAR_SMALL  = 'g_s'

    def __str__(self):
        return self.value

    @property
    def isPeg(self):
        return self in PEGS

    @property
    def isGear(self):
        return self in GEARS

    @classmethod
    def fromSymbol(cls,symbol):
        try:
            return cls(symbol)
        except ValueError:
            return cls[symbol]

PEGS        = (PartClass.PEG1, PartClass.PEG2)
GEARS       = (PartClass.GEAR_LARGE, PartClass.GEAR_SMALL)
ALL_PARTS   = PEGS+GEARS

@dataclass(frozen=True)
class PartGeometry(object):
    '''
    Dimensions of one part class. Peg fields are zero for gears and gear
    fields are zero for pegs.
    '''

    footprint_radius:       float
    peg_diameter:           float = 0.0
    peg_length:             float = 0.0
    gear_bore_diameter:     float = 0.0
    gear_pitch_radius:      float = 0.0
    tooth_count:            int   = 0
    hub_diameter:           float = 0.0
    top_height:             float = 0.0

    @property
    def tooth_pitch_angle(self):
        if not self.tooth_count:
            return 0.0
        return 2*math.pi/self.tooth_count

    @property
    def grasp_width(self):
        '''Width of the feature the gripper closes on.'''
        if self.peg_diameter:
            return self.peg_diameter
        return self.hub_diameter

PEG_DIAMETER        = 14.0
PEG_LENGTH          = 60.0
GEAR_BORE_DIAMETER  = 15.0
GEAR_TIP_MARGIN     = 2.0

_PEG_GEOMETRY = PartGeometry(
    footprint_radius        = PEG_LENGTH/2,
    peg_diameter            = PEG_DIAMETER,
    peg_length              = PEG_LENGTH,
    top_height              = PEG_DIAMETER,
)

PART_GEOMETRY = {
    PartClass.PEG1:         _PEG_GEOMETRY,
    PartClass.PEG2:         _PEG_GEOMETRY,
    PartClass.GEAR_LARGE:   PartGeometry(
        footprint_radius    = 45.0+GEAR_TIP_MARGIN,
        gear_bore_diameter  = GEAR_BORE_DIAMETER,
        gear_pitch_radius   = 45.0,
        tooth_count         = 45,
        hub_diameter        = 24.0,
        top_height          = 10.0,
    ),
    PartClass.GEAR_SMALL:   PartGeometry(
        footprint_radius    = 25.0+GEAR_TIP_MARGIN,
        gear_bore_diameter  = GEAR_BORE_DIAMETER,
        gear_pitch_radius   = 25.0,
        tooth_count         = 25,
        hub_diameter        = 24.0,
        top_height          = 10.0,
    ),
}

def geometry(part):
    return PART_GEOMETRY[part]

def footprint_radius(part):
    return PART_GEOMETRY[part].footprint_radius

def check_geometry(workspace,partGeometry=None):
    '''
    Verifies the cross-part invariants of the geometry table against a
    workspace.

    :returns: A list of violated invariants, empty when all hold.
    '''
    partGeometry = partGeometry or PART_GEOMETRY
    peg          = partGeometry[PartClass.PEG1]
    large        = partGeometry[PartClass.GEAR_LARGE]
    small        = partGeometry[PartClass.GEAR_SMALL]

    violations   = []
    if partGeometry[PartClass.PEG2]!=peg:
        violations += ['pegs are not identical']
    if not peg.peg_diameter<workspace.hole_diameter:
        violations += ['peg does not fit the hole']
    for gear in (large,small):
        if not gear.gear_bore_diameter>peg.peg_diameter:
            violations += ['gear bore does not fit the peg']
    if not math.isclose(large.gear_pitch_radius+small.gear_pitch_radius,workspace.hole_spacing):
        violations += ['pitch radii do not add up to the hole spacing']
    return violations
