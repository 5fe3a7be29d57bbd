"""Testes para o RunManifest e o RunLedger."""

import json
import os
import shutil
import sqlite3
import tempfile
import unittest

from src import __version__
from src.ledger import RunLedger, RunManifest, file_digest


class TestRunManifest(unittest.TestCase):
    """Testes para a classe RunManifest."""

    def setUp(self):
        self.manifest = RunManifest(
            command="prune",
            parameters={"k": 2, "net": "bundled:8"},
            input_digests={"net": "abc"},
            outputs=["selector.txt", "counts.json"],
        )

    def test_json_is_sorted_without_timestamp(self):
        data = json.loads(self.manifest.to_json())
        self.assertEqual(list(data), sorted(data))
        self.assertEqual(data["tool_version"], __version__)
        self.assertNotIn("timestamp", data)

    def test_digest_is_stable(self):
        again = RunManifest.model_validate_json(self.manifest.to_json())
        self.assertEqual(again, self.manifest)
        self.assertEqual(again.digest, self.manifest.digest)
        other = RunManifest(command="prune", parameters={"k": 3})
        self.assertNotEqual(other.digest, self.manifest.digest)

    def test_write(self):
        test_dir = tempfile.mkdtemp()
        try:
            path = self.manifest.write(test_dir)
            self.assertEqual(path.read_text(encoding="utf-8"), self.manifest.to_json())
            self.assertEqual(len(file_digest(path)), 64)
        finally:
            shutil.rmtree(test_dir)


class TestRunLedger(unittest.TestCase):
    """Testes para a classe RunLedger."""

    def setUp(self):
        """Configuração antes de cada teste."""
        self.test_dir = tempfile.mkdtemp()
        self.db_path = os.path.join(self.test_dir, "sub", "runs.db")
        self.ledger = RunLedger(db_path=self.db_path)

    def tearDown(self):
        """Limpeza após cada teste."""
        if os.path.exists(self.test_dir):
            shutil.rmtree(self.test_dir)

    def test_init_database(self):
        """Testa criação do banco (e do diretório)."""
        self.assertTrue(os.path.exists(self.db_path))

    def test_log_run(self):
        """Testa que o manifesto é gravado com o digest."""
        manifest = RunManifest(command="gen", seed=5, outputs=["sorter_bitonic_8.net"])
        self.ledger.log_run(manifest, 0)

        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()
        cursor.execute("SELECT COUNT(*), manifest, manifest_digest FROM runs")
        count, stored, digest = cursor.fetchone()
        conn.close()

        self.assertEqual(count, 1)
        self.assertEqual(stored, manifest.to_json())
        self.assertEqual(digest, manifest.digest)

    def test_get_report(self):
        """Testa agregação por comando e falhas."""
        for i in range(3):
            self.ledger.log_run(RunManifest(command="validate", parameters={"i": i}), i % 2,
                                timestamp=f"2026-01-0{i + 1}T00:00:00")
        self.ledger.log_run(RunManifest(command="cost"), 0, timestamp="2026-01-05T00:00:00")

        report = self.ledger.get_report(limit=10)
        self.assertEqual(report["total_runs"], 4)
        self.assertEqual(report["failures"], 1)
        self.assertEqual(report["by_command"]["validate"], {"runs": 3, "failures": 1})
        self.assertEqual(report["recent_runs"][0]["command"], "cost")

        recent = self.ledger.get_report(start_date="2026-01-03T00:00:00")
        self.assertEqual(recent["total_runs"], 2)


if __name__ == "__main__":
    unittest.main()
