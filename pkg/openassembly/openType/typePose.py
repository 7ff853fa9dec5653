# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
import logging
log = logging.getLogger('typePose')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import math
from dataclasses import dataclass

TWO_PI = 2*math.pi

def normalize_angle(angle):
    '''
    Wraps an angle into (-pi, pi]. Angles already in range are returned
    unchanged.
    '''
    if -math.pi<angle<=math.pi:
        return angle
    return math.pi-((math.pi-angle)%TWO_PI)

@dataclass(frozen=True)
class Pose2D(object):
    '''
    Planar pose: position in mm, yaw in radians normalized to (-pi, pi].
    '''

    x:      float
    y:      float
    yaw:    float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.yaw)):
            raise ValueError('non-finite pose ({0}, {1}, {2})'.format(self.x,self.y,self.yaw))
        object.__setattr__(self,'x',   float(self.x))
        object.__setattr__(self,'y',   float(self.y))
        object.__setattr__(self,'yaw', normalize_angle(float(self.yaw)))

    def __str__(self):
        return '({0:.2f} mm, {1:.2f} mm, {2:.3f} rad)'.format(self.x,self.y,self.yaw)

    #======================== public ==========================================

    @property
    def position(self):
        return (self.x,self.y)

    def transform_point(self,localPoint):
        (lx,ly) = localPoint
        c       = math.cos(self.yaw)
        s       = math.sin(self.yaw)
        return (
            self.x+c*lx-s*ly,
            self.y+s*lx+c*ly,
        )

    def compose(self,other):
        '''
        Returns the pose ``other`` (expressed in this pose's frame) in the
        parent frame.
        '''
        (x,y) = self.transform_point(other.position)
        return Pose2D(x,y,self.yaw+other.yaw)

    def inverse(self):
        c = math.cos(self.yaw)
        s = math.sin(self.yaw)
        return Pose2D(
            -c*self.x-s*self.y,
             s*self.x-c*self.y,
            -self.yaw,
        )

    def translated(self,dx,dy):
        return Pose2D(self.x+dx,self.y+dy,self.yaw)

    def distance_to(self,other):
        return math.hypot(self.x-other.x,self.y-other.y)

IDENTITY = Pose2D(0.0,0.0,0.0)

def transform_point(pose,localPoint):
    '''
    Rigid SE(2) transform of a point given in the local frame of ``pose``.
    '''
    return pose.transform_point(localPoint)
