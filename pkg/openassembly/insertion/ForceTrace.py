# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Synthetic wrist force/torque traces recorded while a grasped gear is pressed
onto its peg, and the moving-average filter applied to them.

A trace holds 3 s of six-component readings at 280 Hz. Before contact all
channels read zero mean. From contact onward the lateral forces react against
the position error and the axial force steps up.
'''
import logging
log = logging.getLogger('ForceTrace')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import csv
from dataclasses import dataclass

import numpy as np

from openassembly.insertion.InsertionException import InsertionException

SAMPLE_RATE         = 280       # Hz
DURATION            = 3.0       # s
NUM_SAMPLES         = int(round(SAMPLE_RATE*DURATION))
CONTACT_SAMPLE      = 70        # 0.25 s
LATERAL_GAIN        = 0.5       # N/mm
AXIAL_STEP          = 5.0       # N
DEFAULT_FORCE_SIGMA = 0.3       # N
DEFAULT_WINDOW      = 70
MAX_ERROR           = 5.0       # mm

CHANNELS            = ('fx','fy','fz','tx','ty','tz')
FORCE_CHANNELS      = 3

@dataclass(frozen=True,eq=False)
class ForceTrace(object):
    '''
    ``samples`` is an array of shape (840, 6): forces in N then torques in
    N*mm. ``injected_error`` is the (dx, dy) position error in mm.
    '''

    samples:        np.ndarray
    injected_error: tuple

    def __post_init__(self):
        samples = np.asarray(self.samples,dtype=float)
        if samples.shape!=(NUM_SAMPLES,len(CHANNELS)):
            raise ValueError('trace shape {0}, expected {1}'.format(samples.shape,(NUM_SAMPLES,len(CHANNELS))))
        if not np.isfinite(samples).all():
            raise ValueError('non-finite force reading')
        object.__setattr__(self,'samples',samples)
        object.__setattr__(self,'injected_error',tuple(float(e) for e in self.injected_error))

    def __len__(self):
        return len(self.samples)

    @property
    def times(self):
        return np.arange(len(self.samples))/SAMPLE_RATE

def expected_forces(error):
    '''
    Noiseless (fx, fy, fz) after contact for a position error in mm.
    '''
    (dx,dy) = error
    return np.array([-LATERAL_GAIN*dx,-LATERAL_GAIN*dy,AXIAL_STEP])

def synth_force_trace(error,noise=DEFAULT_FORCE_SIGMA,rng=None):
    '''
    Synthesizes the trace of an insertion attempt at position ``error``.
    Torque channels carry noise only. Noise is drawn whenever ``rng`` is
    given.

    :raises: InsertionException ``ERROR_OUT_OF_RANGE`` beyond 5 mm per axis.
    '''
    (dx,dy) = (float(error[0]),float(error[1]))
    if abs(dx)>MAX_ERROR or abs(dy)>MAX_ERROR:
        raise InsertionException(InsertionException.ERROR_OUT_OF_RANGE,'({0}, {1}) mm'.format(dx,dy))

    samples = np.zeros((NUM_SAMPLES,len(CHANNELS)))
    samples[CONTACT_SAMPLE:,:FORCE_CHANNELS] = expected_forces((dx,dy))
    if rng is not None:
        samples = samples+rng.normal(0.0,1.0,samples.shape)*noise
    return ForceTrace(samples,(dx,dy))

def moving_average(trace,window=DEFAULT_WINDOW):
    '''
    Causal per-channel moving mean. Output sample ``j`` averages input samples
    ``j`` to ``j+window-1``, so the output is ``window-1`` samples shorter.

    :param trace: A ForceTrace or an array with time along the first axis.
    :raises: InsertionException ``WINDOW_TOO_LARGE``
    '''
    samples = trace.samples if isinstance(trace,ForceTrace) else np.asarray(trace,dtype=float)
    if window<1 or window>len(samples):
        raise InsertionException(InsertionException.WINDOW_TOO_LARGE,
                                 'window {0}, {1} samples'.format(window,len(samples)))
    windows = np.lib.stride_tricks.sliding_window_view(samples,window,axis=0)
    return windows.mean(axis=-1)

def trace_features(trace,window=DEFAULT_WINDOW):
    '''
    Per-channel means of the filtered forces over the outputs whose window
    lies entirely after contact onset.
    '''
    filtered = moving_average(trace,window)
    if len(filtered)<=CONTACT_SAMPLE:
        raise InsertionException(InsertionException.WINDOW_TOO_LARGE,'no window after contact')
    return filtered[CONTACT_SAMPLE:,:FORCE_CHANNELS].mean(axis=0)

#============================ debug dump ======================================

TRACE_COLUMNS = ['t_s']+list(CHANNELS)

def dump_trace(trace,path):
    with open(path,'w',newline='') as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_COLUMNS)
        for (t,row) in zip(trace.times,trace.samples):
            writer.writerow([repr(float(t))]+[repr(float(v)) for v in row])

def load_trace(path,injected_error=(0.0,0.0)):
    '''
    Reads a trace back. The dump does not carry the injected error.
    '''
    with open(path,newline='') as f:
        rows = [[float(r[c]) for c in CHANNELS] for r in csv.DictReader(f)]
    return ForceTrace(np.array(rows),injected_error)
