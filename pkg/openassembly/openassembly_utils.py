# Copyright (c) 2024, the openAssembly contributors.
# All rights reserved.
#
# Released under the BSD 3-Clause license.
import os
import threading

#===== formatting

def formatScene(scene):
    '''
    One line per part, for example:

    ``p1     x= 100.00 mm  y= 225.00 mm  yaw= 0.000 rad``
    '''
    return '\n'.join(
        '{0:<6} x={1:>8.2f} mm  y={2:>8.2f} mm  yaw={3:>6.3f} rad'.format(str(c),p.x,p.y,p.yaw)
        for (c,p) in scene.parts
    )

def formatEvent(event):
    '''
    ``event`` is a PipelineEvent or its dictionary form.
    '''
    if not isinstance(event,dict):
        event = event.toDict()
    return '#{0:<3} {1:>8.1f} s  {2:<20} {3:<5}'.format(
        event['seq'],
        event['sim_time_s'],
        event['stage'],
        event['outcome'],
    ) + ('  {0}'.format(event['detail']['cause']) if 'cause' in event['detail'] else '')

def formatTiming(timing):
    total = sum(timing.values())
    lines = ['{0:<16} {1:>8.1f} s  {2:>5.1f}%'.format(stage,seconds,100.0*seconds/total if total else 0.0)
             for (stage,seconds) in timing.items()]
    lines += ['{0:<16} {1:>8.1f} s'.format('total',total)]
    return '\n'.join(lines)

def formatRows(rows):
    return '\n'.join(
        '{0:<36} success={1} interactions={2} error={3}'.format(
            row.label,
            _fmt(row.success_rate),
            _fmt(row.mean_interactions),
            _fmt(row.mean_error_mm),
        ) for row in rows
    )

def _fmt(value):
    return '-' if value is None else '{0:.3f}'.format(value)

def formatThreadList():
    return '\nActive threads ({0})\n   {1}'.format(
        threading.active_count(),
        '\n   '.join([t.name for t in threading.enumerate()]),
    )

#===== paths

def forceSlashSep(ospath):
    '''
    Converts a Windows-based path to use '/' as the path element separator,
    as logging.config requires.
    '''
    if os.sep=='/':
        return ospath

    head     = ospath
    pathList = []
    while True:
        (head,tail) = os.path.split(head)
        if tail=='':
            pathList.insert(0,head.rstrip('\\'))
            break
        pathList.insert(0,tail)
    return '/'.join(pathList)
