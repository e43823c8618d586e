#!/usr/bin/env python

""" Test the CSV, JSON and SVG writers
"""

import json
import os
import tempfile
import xml.etree.ElementTree as ET
from unittest import TestCase, main

import numpy as np

from locstate.diffraction import ComparisonReport, Regime
from locstate.emit import emit_csv, emit_fan_svg, emit_json, emit_rows_csv, emit_svg, format_float
from locstate.exceptions import OutputError
from locstate.log import LOGGER
from locstate.shared_types import SampledDensity

SVG = "{http://www.w3.org/2000/svg}"


class EmitTest(TestCase):
    def setUp(self):
        self.tempdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tempdir.cleanup)
        self.density = SampledDensity(
            grid_y=np.array([-1.0, 0.0, 1.0]),
            density=np.array([0.25, 1.0, 0.25]),
            time_t=0.001,
            normalized=False,
        )

    def path(self, name):
        return os.path.join(self.tempdir.name, name)

    def test_format_float(self):
        self.assertEqual(format_float(0.1), "0.10000000000000001")
        self.assertEqual(format_float(1), "1")
        self.assertEqual(float(format_float(1 / 3)), 1 / 3)

    def test_csv(self):
        with self.assertLogs(LOGGER, level="INFO") as cm:
            written = emit_csv(self.density, self.path("density.csv"))
        self.assertIn("Wrote", cm.output[0])
        with open(written, "rb") as f:
            data = f.read()
        self.assertNotIn(b"\r", data)
        lines = data.decode("utf8").splitlines()
        self.assertEqual(len(lines), 4)
        self.assertEqual(lines[0], "y,density")
        self.assertEqual(lines[1], "-1,0.25")
        self.assertEqual(lines[2], "0,1")
        momentum = emit_csv(self.density, self.path("momentum.csv"), x_label="p")
        with open(momentum, encoding="utf8") as f:
            self.assertEqual(f.readline().strip(), "p,density")

    def test_rows_csv(self):
        written = emit_rows_csv(("launch", "t", "y"), [(0.5, 0.0, 0.1)], self.path("rows.csv"))
        with open(written, encoding="utf8") as f:
            self.assertEqual(f.read(), "launch,t,y\n0.5,0,0.10000000000000001\n")

    def test_json_keeps_field_order(self):
        report = ComparisonReport(
            fresnel_number=0.04,
            l2_distance=0.001,
            linf_distance=0.002,
            peak_ratio=0.999,
            regime=Regime.fraunhofer,
        )
        written = emit_json(report, self.path("report.json"))
        with open(written, encoding="utf8") as f:
            text = f.read()
        data = json.loads(text)
        self.assertEqual(
            list(data.keys()),
            ["fresnel_number", "l2_distance", "linf_distance", "peak_ratio", "regime"],
        )
        self.assertEqual(data["regime"], "Fraunhofer")
        self.assertTrue(text.endswith("}\n"))

    def test_json_density(self):
        written = emit_json(self.density, self.path("density.json"))
        with open(written, encoding="utf8") as f:
            data = json.load(f)
        self.assertEqual(data["time"], 0.001)
        self.assertFalse(data["normalized"])
        self.assertEqual(data["y"], [-1.0, 0.0, 1.0])
        self.assertEqual(data["density"], [0.25, 1.0, 0.25])

    def test_svg(self):
        reference = SampledDensity(
            grid_y=self.density.grid_y,
            density=np.array([0.2, 1.0, 0.2]),
            time_t=0.001,
            normalized=False,
        )
        written = emit_svg(self.density, self.path("plot.svg"), reference=reference, title="t = 0.001")
        root = ET.parse(written).getroot()
        self.assertEqual(root.tag, SVG + "svg")
        polylines = root.findall(SVG + "polyline")
        self.assertEqual(len(polylines), 2)
        self.assertNotIn("stroke-dasharray", polylines[0].attrib)
        self.assertEqual(polylines[1].get("stroke-dasharray"), "4 3")
        self.assertEqual(len(polylines[0].get("points").split()), 3)
        labels = [text.text for text in root.iter(SVG + "text")]
        self.assertIn("y", labels)
        self.assertIn("|Ψ|²", labels)
        self.assertEqual(root.find(SVG + "title").text, "t = 0.001")

    def test_svg_is_deterministic(self):
        first = emit_svg(self.density, self.path("first.svg"))
        second = emit_svg(self.density, self.path("second.svg"))
        with open(first, "rb") as f, open(second, "rb") as g:
            self.assertEqual(f.read(), g.read())

    def test_fan_svg(self):
        times = np.linspace(0.0, 1.0, 5)
        paths = np.array([times, 2 * times, 3 * times])
        written = emit_fan_svg(times, paths, self.path("fan.svg"))
        root = ET.parse(written).getroot()
        self.assertEqual(len(root.findall(SVG + "polyline")), 3)
        labels = [text.text for text in root.iter(SVG + "text")]
        self.assertIn("t", labels)

    def test_unwritable_path(self):
        missing = self.path(os.path.join("no", "such", "dir", "out.csv"))
        with self.assertRaises(OutputError) as cm:
            emit_csv(self.density, missing)
        self.assertEqual(cm.exception.exit_code, 4)
        self.assertIn("out.csv", str(cm.exception))


if __name__ == "__main__":
    main()
