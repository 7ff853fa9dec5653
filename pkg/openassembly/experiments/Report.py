# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
'''
Experiment report files.

For a body ``<stem>.csv`` the writer also produces ``<stem>.meta.json``
(specification, seed, versions and creation time), ``<stem>.trials.jsonl``
(one raw record per trial), ``<stem>.histogram.csv`` (binned counts) and
``<stem>.timing.csv`` (measured wall times and simulated stage times).

The body holds no measured time, so reruns with the same specification
write identical bodies.
'''
import logging
log = logging.getLogger('Report')
log.setLevel(logging.ERROR)
log.addHandler(logging.NullHandler())

import csv
import json
import os
import time
from dataclasses import dataclass, field, fields

from openassembly                                import oaVersion
from openassembly.experiments                    import SceneGenerator
from openassembly.experiments.ExperimentException import ExperimentException

DELIMITERS = {
    'csv':  ',',
    'tsv':  '\t',
}

@dataclass(frozen=True)
class ReportRow(object):
    '''
    One aggregated grid point. Means are taken over the completed trials;
    fields that do not apply to an experiment stay None.
    '''

    parameters:         dict = field(default_factory=dict)
    trials:             int   = 0
    success_rate:       float = None
    mean_interactions:  float = None
    mean_error_mm:      float = None
    mean_wall_time_s:   float = None

    def __post_init__(self):
        if self.success_rate is not None and not 0.0<=self.success_rate<=1.0:
            raise ValueError('success_rate {0} outside [0, 1]'.format(self.success_rate))

    @property
    def label(self):
        return ' '.join('{0}={1}'.format(k,v) for (k,v) in sorted(self.parameters.items()))

COLUMNS = [f.name for f in fields(ReportRow)]

#============================ helpers =========================================

def _stem(path):
    return os.path.splitext(path)[0]

def companion_paths(path):
    stem = _stem(path)
    return {
        'meta':      stem+'.meta.json',
        'trials':    stem+'.trials.jsonl',
        'histogram': stem+'.histogram.csv',
        'timing':    stem+'.timing.csv',
    }

def _cell(value):
    if value is None:
        return ''
    if isinstance(value,float):
        return repr(value)
    return str(value)

def _parse(column,cell):
    if column=='parameters':
        return json.loads(cell)
    if cell=='':
        return None
    if column=='trials':
        return int(cell)
    return float(cell)

def _rowCells(row):
    cells = []
    for name in COLUMNS:
        value = getattr(row,name)
        if name=='parameters':
            cells.append(json.dumps(value,sort_keys=True))
        elif name=='mean_wall_time_s':
            cells.append('')
        else:
            cells.append(_cell(value))
    return cells

#============================ public ==========================================

def emit_report(rows,path,fmt='csv',spec=None,records=(),histogram=(),timing=()):
    '''
    Writes the report body and its companion files.

    :param records:   Raw per-trial records (dictionaries).
    :param histogram: ``(label, bin, count)`` triples.
    :param timing:    ``(label, measure, value)`` triples.

    :raises: ExperimentException ``EMPTY_REPORT`` or ``IO_FAILURE``.
    '''
    if not rows:
        raise ExperimentException(ExperimentException.EMPTY_REPORT,path)
    if fmt not in DELIMITERS:
        raise ExperimentException(ExperimentException.BAD_SPEC,'unknown report format {0}'.format(fmt))

    paths = companion_paths(path)
    meta  = {
        'spec':              spec.toDict() if spec is not None else None,
        'seed':              spec.seed if spec is not None else None,
        'artifact_version':  SceneGenerator.BENCHMARK_VERSION,
        'package_version':   '.'.join(str(v) for v in oaVersion.VERSION),
        'columns':           COLUMNS,
        'format':            fmt,
        'created':           time.strftime('%Y-%m-%dT%H:%M:%S'),
        'mean_wall_time_s':  {row.label: row.mean_wall_time_s for row in rows},
    }

    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory,exist_ok=True)

        with open(path,'w',newline='') as f:
            writer = csv.writer(f,delimiter=DELIMITERS[fmt],lineterminator='\n')
            writer.writerow(COLUMNS)
            for row in rows:
                writer.writerow(_rowCells(row))

        with open(paths['meta'],'w') as f:
            json.dump(meta,f,indent=4,sort_keys=True)
            f.write('\n')

        with open(paths['trials'],'w') as f:
            for record in records:
                f.write(json.dumps(record,sort_keys=True)+'\n')

        with open(paths['histogram'],'w',newline='') as f:
            writer = csv.writer(f,lineterminator='\n')
            writer.writerow(['parameters','bin','count'])
            for (label,b,count) in histogram:
                writer.writerow([label,b,count])

        with open(paths['timing'],'w',newline='') as f:
            writer = csv.writer(f,lineterminator='\n')
            writer.writerow(['parameters','measure','value'])
            for row in rows:
                writer.writerow([row.label,'mean_wall_time_s',_cell(row.mean_wall_time_s)])
            for (label,measure,value) in timing:
                writer.writerow([label,measure,_cell(value)])
    except OSError as err:
        raise ExperimentException(ExperimentException.IO_FAILURE,'{0}: {1}'.format(path,err))

    log.info('wrote {0} rows to {1}'.format(len(rows),path))
    return paths

def read_report(path,fmt='csv'):
    '''
    Reads a report body back. The wall-time column reads as None.
    '''
    with open(path,newline='') as f:
        reader = csv.reader(f,delimiter=DELIMITERS[fmt])
        header = next(reader)
        if header!=COLUMNS:
            raise ExperimentException(ExperimentException.IO_FAILURE,'unexpected header {0}'.format(header))
        return [
            ReportRow(**{c: _parse(c,cell) for (c,cell) in zip(COLUMNS,cells)})
            for cells in reader
        ]

def read_meta(path):
    with open(companion_paths(path)['meta']) as f:
        return json.load(f)

def read_trials(path):
    with open(companion_paths(path)['trials']) as f:
        return [json.loads(line) for line in f if line.strip()]
