from pathlib import Path
from tempfile import TemporaryDirectory

from django.test import TestCase

from lifescope import config
from main.manifest import RunManifest, config_echo, parse_manifest, replay_argv, sha256_bytes, sha256_file
from main.models import AnalysisRun, RunOutput
from main.spectral import AnalysisConfig

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


class ManifestTests(TestCase):

    def setUp(self):
        self._tmp = TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.output = self.tmp / "class_map.csv"
        self.output.write_bytes(b"")
        self.manifest = RunManifest("patterns/blinker.rle", "ab" * 32, AnalysisConfig(T=8, f_u=3))

    def tearDown(self):
        self._tmp.cleanup()

    def test_hashes(self):
        self.assertEqual(sha256_bytes(b""), EMPTY_SHA256)
        self.assertEqual(sha256_file(self.output), EMPTY_SHA256)

    def test_config_echo(self):
        echo = config_echo(AnalysisConfig(probe_periods=(30, 60)))
        self.assertEqual(echo["probe_periods"], [30, 60])
        self.assertIsNone(echo["roi"])

    def test_text(self):
        with self.manifest.stage("analyze"):
            pass
        self.manifest.add_output("class_map.csv", self.output)
        self.manifest.class_counts = {"Null": 1}
        text = self.manifest.to_text()
        self.assertTrue(text.startswith("pattern = patterns/blinker.rle\n"))
        self.assertIn(f"engine_version = {config.ENGINE_VERSION}\n", text)
        self.assertIn("config.roi = \n", text)
        self.assertIn("config.class_order = power_law,sharp_peaks\n", text)
        self.assertIn("count.Null = 1\n", text)
        self.assertIn("time.analyze = ", text)
        self.assertIn(f"output.class_map.csv = {self.output} sha256:{EMPTY_SHA256}\n", text)

        path = self.manifest.write(self.tmp / "manifest.txt")
        self.assertEqual(path.read_text(), text)

    def test_record(self):
        self.manifest.add_output("class_map.csv", self.output)
        self.manifest.changed_cells = 4
        run = self.manifest.record()
        self.assertEqual(AnalysisRun.objects.count(), 1)
        self.assertEqual(run.window, 8)
        self.assertEqual(run.config["f_u"], 3)
        (out,) = RunOutput.objects.filter(run=run)
        self.assertEqual((out.name, out.sha256), ("class_map.csv", EMPTY_SHA256))
        self.assertIn("T=8", str(run))

    def test_flags_and_replay(self):
        self.manifest.flags = {"pattern": "p.rle", "roi": (-8, -8, 50, 50), "margin": 64,
                               "distinct-dc": True, "skip-spectra-csv": False, "beta-max": -0.2}
        entries = parse_manifest(self.manifest.to_text())
        self.assertEqual(entries["flag.roi"], "-8,-8,50,50")
        self.assertEqual(entries["config.T"], "8")
        self.assertEqual(replay_argv(entries), ["--pattern=p.rle", "--roi=-8,-8,50,50", "--margin=64",
                                                "--distinct-dc", "--beta-max=-0.2"])
