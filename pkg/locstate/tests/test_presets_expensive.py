#!/usr/bin/env python

""" Shipped presets give the same bytes whatever the thread count

This suite is left out of the dev suite in run.py: it only gets run with
./run.py all, or ./test_presets_expensive.py.
"""

import os
import tempfile
from unittest import TestCase, main

from locstate.config import build_config
from locstate.experiment import run


class ExpensivePresetTest(TestCase):
    def setUp(self):
        self.tempdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tempdir.cleanup)

    def run_preset(self, name, threads):
        stem = os.path.join(self.tempdir.name, f"{name}-{threads}")
        config = build_config(preset=name, overrides={"output": {"path": stem}})
        return run(config, threads=threads)

    def test_threads_do_not_change_output(self):
        for name in ("fig2", "fig3", "fig4"):
            single = self.run_preset(name, 1)
            several = self.run_preset(name, 4)
            self.assertEqual(len(single), len(several))
            for first, second in zip(single, several):
                with open(first, "rb") as f, open(second, "rb") as g:
                    self.assertEqual(f.read(), g.read(), msg=(name, first.name))

    def test_period_preset_revives(self):
        written = self.run_preset("fig3-period", None)
        self.assertEqual(len(written), 12)
        with open(written[0], encoding="utf8") as f:
            start = [float(line.split(",")[1]) for line in f.read().splitlines()[1:]]
        with open(written[8], encoding="utf8") as f:
            revived = [float(line.split(",")[1]) for line in f.read().splitlines()[1:]]
        self.assertLess(max(abs(x - y) for x, y in zip(start, revived)), 1e-9)


if __name__ == "__main__":
    main()
