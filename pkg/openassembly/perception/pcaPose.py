# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Synthetic perception: labeled point clouds of the parts lying on the table
and the principal-axes pose estimate computed from them.

The detector/segmenter is replaced by ground-truth segmentation: each cloud
is drawn from the top surface of one part and perturbed by isotropic
Gaussian noise. The pose estimate is the cloud centroid plus the yaw of the
in-plane minor principal axis.
'''
import logging
log = logging.getLogger('pcaPose')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import csv
import math
from dataclasses import dataclass

import numpy as np

from openassembly.openType.typePart                 import PartClass, geometry
from openassembly.openType.typePose                 import Pose2D
from openassembly.openType.typeScene                import Scene
from openassembly.perception.PerceptionException    import PerceptionException

MIN_POINTS              = 10
DEFAULT_NUM_POINTS      = 2000
DEFAULT_NOISE_SIGMA     = 1.0   # mm
DEGENERACY_RATIO        = 0.1
NOISE_TRUNCATION        = 3.0   # in sigmas
SYMMETRY_TOLERANCE      = 1e-9

@dataclass(frozen=True)
class LabeledCloud(object):
    points:     np.ndarray      # (n,3), mm
    label:      PartClass

    def __len__(self):
        return len(self.points)

@dataclass(frozen=True)
class PoseEstimate(object):
    position:       tuple       # (x,y,z), mm
    yaw:            float       # rad, folded to (-pi/2, pi/2]
    label:          PartClass
    degenerate:     bool
    eigenvalues:    tuple       # ascending
    eigenvectors:   tuple       # v0,v1,v2

    @property
    def pose(self):
        return Pose2D(self.position[0],self.position[1],self.yaw)

#============================ cloud generation ================================

def _surface_points(part,u):
    '''
    Maps unit-square samples onto the top surface of a part, in the part's
    local frame. Pegs lie with their axis along local y.
    '''
    geo = geometry(part)
    if part.isPeg:
        half  = geo.peg_diameter/2
        x     = (2*u[:,0]-1)*half
        y     = (u[:,1]-0.5)*geo.peg_length
        z     = half+np.sqrt(np.maximum(half**2-x**2,0.0))
    else:
        rIn   = geo.gear_bore_diameter/2
        rOut  = geo.gear_pitch_radius
        r     = np.sqrt(u[:,0]*(rOut**2-rIn**2)+rIn**2)
        a     = 2*math.pi*u[:,1]
        x     = r*np.cos(a)
        y     = r*np.sin(a)
        z     = np.full(len(u),geo.top_height)
    return np.column_stack((x,y,z))

def sample_cloud(part,pose,n,noise_sigma,rng):
    '''
    Draws ``n`` points uniformly from the top surface of ``part`` at ``pose``
    and adds isotropic Gaussian noise of standard deviation ``noise_sigma``,
    truncated to a norm of 3 sigma.

    Support points are drawn before the noise, so two clouds drawn from equal
    streams share their support points whatever the noise level.
    '''
    if n<MIN_POINTS:
        raise PerceptionException(PerceptionException.TOO_FEW_POINTS,'n={0} < {1}'.format(n,MIN_POINTS))

    local       = _surface_points(part,rng.random((n,2)))

    c           = math.cos(pose.yaw)
    s           = math.sin(pose.yaw)
    points      = np.empty_like(local)
    points[:,0] = pose.x+c*local[:,0]-s*local[:,1]
    points[:,1] = pose.y+s*local[:,0]+c*local[:,1]
    points[:,2] = local[:,2]

    noise       = rng.normal(0.0,1.0,(n,3))*noise_sigma
    if noise_sigma>0:
        norms   = np.linalg.norm(noise,axis=1)
        limit   = NOISE_TRUNCATION*noise_sigma
        scale   = np.minimum(1.0,limit/np.maximum(norms,1e-300))
        noise  *= scale[:,None]
    points     += noise

    points.setflags(write=False)
    return LabeledCloud(points,part)

#============================ principal axes ==================================

def _asPoints(cloud):
    points = cloud.points if isinstance(cloud,LabeledCloud) else cloud
    return np.atleast_2d(np.asarray(points,dtype=float))

def centroid(cloud):
    '''
    Arithmetic mean of the cloud points.
    '''
    points = _asPoints(cloud)
    if points.size==0:
        raise PerceptionException(PerceptionException.EMPTY_CLOUD)
    return points.mean(axis=0)

def covariance(cloud):
    '''
    Population covariance ``(1/n) sum (p_i - mean)(p_i - mean)^T``, computed
    in two passes.
    '''
    points = _asPoints(cloud)
    if points.size==0:
        raise PerceptionException(PerceptionException.EMPTY_CLOUD)
    if len(points)<2:
        raise PerceptionException(PerceptionException.SINGLE_POINT)
    diff   = points-points.mean(axis=0)
    cov    = diff.T@diff/len(points)
    return (cov+cov.T)/2

def principal_axes(C):
    '''
    Eigen-decomposition of a symmetric positive semidefinite matrix.

    :returns: ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
              ``eigenvectors[l]`` the unit eigenvector of ``eigenvalues[l]``.
              Each eigenvector is signed so that its largest-magnitude
              component is positive.
    '''
    C     = np.asarray(C,dtype=float)
    scale = max(1.0,float(np.abs(C).max())) if C.size else 1.0
    if C.shape!=(3,3) or not np.allclose(C,C.T,rtol=0.0,atol=SYMMETRY_TOLERANCE*scale):
        raise PerceptionException(PerceptionException.NOT_SYMMETRIC,'shape {0}'.format(C.shape))

    (values,columns) = np.linalg.eigh(C)
    vectors = columns.T.copy()
    for l in range(3):
        i = int(np.argmax(np.abs(vectors[l])))
        if vectors[l,i]<0:
            vectors[l] = -vectors[l]
    return (values,vectors)

def fold_half_turn(angle):
    '''
    Folds an axis direction into (-pi/2, pi/2] (axes are symmetric under a
    half turn).
    '''
    if -math.pi/2<angle<=math.pi/2:
        return angle
    return math.pi/2-((math.pi/2-angle)%math.pi)

def estimate_pose(cloud,degeneracy_ratio=DEGENERACY_RATIO):
    '''
    Centroid plus yaw of the in-plane minor principal axis.

    The smallest principal axis of a part lying on the table is its surface
    normal, so the in-plane minor axis is the middle one. Estimates whose two
    in-plane variances are within ``degeneracy_ratio`` of each other are
    flagged degenerate and report a yaw of 0.
    '''
    mean             = centroid(cloud)
    (values,vectors) = principal_axes(covariance(cloud))

    (l1,l2)          = (values[1],values[2])
    degenerate       = bool(l2<=0 or (l2-l1)/l2<degeneracy_ratio)
    if degenerate:
        yaw          = 0.0
    else:
        yaw          = fold_half_turn(math.atan2(vectors[1,1],vectors[1,0]))

    if log.isEnabledFor(logging.DEBUG):
        log.debug('{0}: centroid={1} yaw={2:.4f} eig={3} degenerate={4}'.format(
            cloud.label,mean,yaw,values,degenerate))

    return PoseEstimate(
        position     = tuple(float(v) for v in mean),
        yaw          = float(yaw),
        label        = cloud.label,
        degenerate   = degenerate,
        eigenvalues  = tuple(float(v) for v in values),
        eigenvectors = tuple(tuple(float(c) for c in v) for v in vectors),
    )

def perceive_scene(scene,rng,n=DEFAULT_NUM_POINTS,noise_sigma=DEFAULT_NOISE_SIGMA):
    '''
    Runs the perception channel over every part of the scene.

    Part ``i`` (in scene order) draws from ``rng.child(i)``.

    :returns: A tuple ``(estimatedScene, estimates)`` where ``estimates``
              maps each part to its PoseEstimate.
    '''
    estimates = {}
    for (i,(part,pose)) in enumerate(scene.parts):
        cloud           = sample_cloud(part,pose,n,noise_sigma,rng.child(i))
        estimates[part] = estimate_pose(cloud)
    estimated = Scene(
        tuple((part,estimates[part].pose) for part in scene.classes),
        scene.workspace,
    )
    return (estimated,estimates)

#============================ debug dump ======================================

CLOUD_COLUMNS = ['x','y','z','label']

def dump_cloud(clouds,path):
    '''
    Writes one record per point, all clouds concatenated.
    '''
    with open(path,'w',newline='') as f:
        writer = csv.writer(f)
        writer.writerow(CLOUD_COLUMNS)
        for cloud in clouds:
            for (x,y,z) in cloud.points:
                writer.writerow([repr(float(x)),repr(float(y)),repr(float(z)),cloud.label.value])

def load_cloud(path):
    '''
    :returns: A list of LabeledCloud, one per label, in order of first
              appearance.
    '''
    points = {}
    with open(path,newline='') as f:
        for row in csv.DictReader(f):
            label = PartClass.fromSymbol(row['label'])
            points.setdefault(label,[]).append((float(row['x']),float(row['y']),float(row['z'])))
    return [LabeledCloud(np.array(p),label) for (label,p) in points.items()]
