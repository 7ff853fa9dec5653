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

import logging
log = logging.getLogger('openAssemblyCli')

from   argparse    import ArgumentParser
from   cmd         import Cmd

from openassembly import openAssemblyApp
import openassembly.openassembly_utils as u


class OpenAssemblyCli(Cmd):
    '''
    Interactive shell working on one loaded scene.
    '''

    def __init__(self,app):
        log.info('Creating OpenAssemblyCli')

        # store params
        self.app                    = app

        # local variables
        self.scene                  = app.loadScene()
        self.seed                   = 0
        self.events                 = []
        self.timing                 = {}

        Cmd.__init__(self)
        self.doc_header = 'Commands (type "help all" or "help <topic>"):'
        self.prompt     = '> '
        self.intro      = '\nopenAssembly  (type "help" for commands)'

    #======================== private =========================================

    #===== callbacks

    def do_scene(self, arg):
        """
        Prints the loaded scene, or loads one.
        Usage: scene [scene-file | benchmark-index]
        """
        if arg:
            try:
                if arg.isdigit():
                    self.scene = self.app.loadScene(index=int(arg))
                else:
                    self.scene = self.app.loadScene(arg)
            except (OSError,ValueError) as err:
                self.stdout.write('{0}\n'.format(err))
                return
            self.events = []
        self.stdout.write(u.formatScene(self.scene)+'\n')

    def do_seed(self, arg):
        """
        Prints or sets the seed of the next singulate or run.
        Usage: seed [integer]
        """
        if arg:
            try:
                self.seed = int(arg)
            except ValueError:
                self.stdout.write('not an integer: {0}\n'.format(arg))
                return
        self.stdout.write('seed={0}\n'.format(self.seed))

    def do_singulate(self, arg):
        """
        Singulates the pegs of the loaded scene and keeps the result.
        Usage: singulate [n-samples]
        """
        try:
            n_samples = int(arg) if arg else 100
            result    = self.app.singulate(self.scene,self.seed,n_samples)
        except ValueError as err:
            self.stdout.write('{0}\n'.format(err))
            return
        self.stdout.write('success={0} interactions={1}\n'.format(result.success,result.interactions))
        if not result.off_table:
            self.scene = result.final_scene

    def do_run(self, arg):
        """
        Assembles the loaded scene with the default pipeline configuration.
        Usage: run [events-file]
        """
        config = self.app.loadConfig(seed=self.seed)
        (state,self.events,self.timing) = self.app.runPipeline(self.scene,config,arg or None)
        self.stdout.write('{0} after {1} stages\n'.format(state.stage,len(self.events)))

    def do_events(self, arg):
        """Lists the events of the last run."""
        if not self.events:
            self.stdout.write('no run yet\n')
            return
        for event in self.events:
            self.stdout.write(u.formatEvent(event)+'\n')

    def do_stats(self, arg):
        """Prints the simulated time per stage of the last run, and the event bus counters."""
        if self.timing:
            self.stdout.write(u.formatTiming(self.timing)+'\n')
        self.stdout.write(self.app.getEventBusStats()+'\n')

    def help_all(self):
        """Lists first line of help for all documented commands"""
        names = self.get_names()
        names.sort()
        maxlen = 65
        self.stdout.write('type "help <topic>" for topic details\n')
        for name in names:
            if name[:3] == 'do_':
                try:
                    doc = getattr(self, name).__doc__
                    if doc:
                        # Handle multi-line doc comments and format for length.
                        doclines = doc.splitlines()
                        doc      = doclines[0]
                        if len(doc) == 0 and len(doclines) > 0:
                            doc = doclines[1].strip()
                        if len(doc) > maxlen:
                            doc = doc[:maxlen] + '...'
                        self.stdout.write('{0} - {1}\n'.format(
                                                name[3:80-maxlen], doc))
                except AttributeError:
                    pass

    def do_quit(self, arg):
        self.app.close()
        return True

    def emptyline(self):
        return


#============================ main ============================================

if __name__=="__main__":
    parser = ArgumentParser(prog='openAssemblyCli')
    openAssemblyApp._add_parser_args(parser)
    app    = openAssemblyApp.build_app(parser.parse_args())
    cli    = OpenAssemblyCli(app)
    cli.cmdloop()
