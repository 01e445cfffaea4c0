#!/usr/bin/env python3
"""End-to-end checks of the renormlab command-line tool."""

import json
import pathlib
import re
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI = None
ROOT = None


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = pathlib.Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text)
        return str(path)

    def run_config(self, text, out="out"):
        return run("run", "-c", self.write("cfg.yaml", text), "-o", str(self.tmp / out))

    def test_malformed_yaml_exits_2_with_position(self):
        res = self.run_config("kind: renormalize\nname: x\n  function: [re_z2\n")
        self.assertEqual(res.returncode, 2)
        self.assertRegex(res.stderr, r"cfg\.yaml:\d+:\d+: error")

    def test_unknown_key_exits_2(self):
        res = self.run_config("kind: renormalize\nname: x\nfunction: re_z2\npoint: [1,0]\nbogus: 1\n")
        self.assertEqual(res.returncode, 2)
        self.assertIn("5:1", res.stderr)
        self.assertIn("bogus", res.stderr)
        self.assertFalse((self.tmp / "out").exists() and any((self.tmp / "out").iterdir()))

    def test_bad_expression_exits_2(self):
        res = self.run_config("kind: renormalize\nname: x\nfunction: (const 1)\npoint: [1,0]\n")
        self.assertEqual(res.returncode, 2)

    def test_precondition_exits_3(self):
        res = self.run_config("kind: renormalize\nname: x\nfunction: (const 2 1)\npoint: [1,0]\n")
        self.assertEqual(res.returncode, 3)
        self.assertIn("precondition", res.stderr)

    def test_missing_config_file(self):
        res = run("run", "-c", str(self.tmp / "absent.yaml"))
        self.assertNotEqual(res.returncode, 0)

    def test_reports_match_schema_and_are_deterministic(self):
        schema = json.loads((ROOT / "docs/schema/report.schema.json").read_text())
        for cfg in ("renormalize_re_z2.yaml", "tube_strip.yaml", "tube_exp_cusp.yaml", "lie_synthetic.yaml"):
            with self.subTest(cfg=cfg):
                texts = []
                for out in ("a", "b"):
                    res = run("run", "-c", str(ROOT / "scenarios" / cfg), "-o", str(self.tmp / cfg / out))
                    self.assertEqual(res.returncode, 0, res.stderr)
                    reports = sorted((self.tmp / cfg / out).glob("*.json"))
                    self.assertEqual(len(reports), 1)
                    doc = json.loads(reports[0].read_text())
                    jsonschema.validate(doc, schema)
                    text = reports[0].read_text()
                    texts.append(re.sub(r'.*"wall_time_seconds".*\n', "", text))
                self.assertEqual(texts[0], texts[1])

    def test_seed_override_is_recorded(self):
        res = run("run", "-c", str(ROOT / "scenarios/tube_strip.yaml"), "--seed", "7", "-o", str(self.tmp / "s"))
        self.assertEqual(res.returncode, 0, res.stderr)
        doc = json.loads(next((self.tmp / "s").glob("*.json")).read_text())
        self.assertEqual(doc["provenance"]["seed"], 7)

    def test_list_contains_domains_and_round_trips(self):
        res = run("list", "--json")
        self.assertEqual(res.returncode, 0, res.stderr)
        entries = {e["name"]: e for e in json.loads(res.stdout)}
        for name in ("exp_cusp", "three_spike", "strip", "re_z2"):
            self.assertIn(name, entries)
        plain = run("list")
        self.assertEqual(plain.returncode, 0)
        for name in entries:
            self.assertIn(name, plain.stdout)

        for name in ("exp_cusp", "strip"):
            with self.subTest(domain=name):
                by_name = self.run_config(f"kind: tube_classify\nname: t\ndomain: {name}\n", out=f"{name}_n")
                by_text = self.run_config(
                    f"kind: tube_classify\nname: t\ndomain: \"{entries[name]['text']}\"\n", out=f"{name}_t")
                self.assertEqual(by_name.returncode, 0, by_name.stderr)
                self.assertEqual(by_text.returncode, 0, by_text.stderr)
                a = json.loads((self.tmp / f"{name}_n" / "t.json").read_text())
                b = json.loads((self.tmp / f"{name}_t" / "t.json").read_text())
                self.assertEqual(a["report"], b["report"])
                self.assertEqual(a["status"], b["status"])


if __name__ == "__main__":
    CLI = sys.argv.pop(1)
    ROOT = pathlib.Path(sys.argv.pop(1))
    unittest.main()
