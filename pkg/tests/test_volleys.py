"""Testes para leitura, escrita e geração de volleys."""

import unittest

import numpy as np

from src.errors import ToolkitError
from src.neuron import SpikeVolley
from src.volleys import dump_volleys, generate_volleys, load_volleys


class TestLoadVolleys(unittest.TestCase):
    """Formatos JSON e CSV."""

    def test_json_single(self):
        volleys = load_volleys('[{"input": 0, "t": 0}, {"input": 2, "t": 5}]', 4)
        self.assertEqual(volleys, [SpikeVolley(spikes=(0, None, 5, None))])

    def test_json_many(self):
        volleys = load_volleys('[[{"input": 1, "t": 3}], []]', 2)
        self.assertEqual(len(volleys), 2)
        self.assertEqual(volleys[0].spikes, (None, 3))
        self.assertEqual(volleys[1].spikes, (None, None))

    def test_json_empty_is_silent(self):
        self.assertEqual(load_volleys("[]", 3), [SpikeVolley.silent(3)])

    def test_csv(self):
        text = "input,t\n0,1\n3,0\n\n1,7\n"
        volleys = load_volleys(text, 4)
        self.assertEqual([v.spikes for v in volleys], [(1, None, None, 0), (None, 7, None, None)])

    def test_errors(self):
        """Testa entrada repetida, fora do intervalo e formatos inválidos."""
        bad = [
            '[{"input": 0, "t": 1}, {"input": 0, "t": 2}]',
            '[{"input": 4, "t": 1}]',
            '[{"input": 0}]',
            '[{"input": "a", "t": 1}]',
            "[{",
            "0,1,2\n",
            "x,y\n",
        ]
        for text in bad:
            with self.assertRaises(ValueError, msg=text):
                load_volleys(text, 4)

    def test_negative_time(self):
        with self.assertRaises(ValueError):
            load_volleys("0,-1\n", 2)

    def test_dump_round_trip(self):
        volleys = generate_volleys(6, 5, 0.5, seed=2)
        self.assertEqual(load_volleys(dump_volleys(volleys), 6), volleys)


class TestGenerateVolleys(unittest.TestCase):
    """Gerador determinístico."""

    def test_deterministic(self):
        first = generate_volleys(16, 50, 0.3, seed=1)
        self.assertEqual(first, generate_volleys(16, 50, 0.3, seed=1))
        self.assertNotEqual(first, generate_volleys(16, 50, 0.3, seed=2))

    def test_times_inside_window(self):
        for distribution in ("uniform", "early", "late"):
            for volley in generate_volleys(8, 100, 0.8, seed=3, window=5, distribution=distribution):
                for _, t in volley.events():
                    self.assertTrue(0 <= t < 5)

    def test_density_bounds(self):
        silent = generate_volleys(8, 10, 0.0, seed=0)
        self.assertTrue(all(not v.events() for v in silent))
        full = generate_volleys(8, 10, 1.0, seed=0)
        self.assertTrue(all(len(v.events()) == 8 for v in full))

    def test_max_spikes(self):
        volleys = generate_volleys(64, 500, 0.5, seed=7, max_spikes=2)
        counts = [len(v.events()) for v in volleys]
        self.assertLessEqual(max(counts), 2)
        self.assertEqual(min(counts), 2)

    def test_early_and_late(self):
        def mean_time(distribution):
            times = [t for v in generate_volleys(16, 200, 1.0, seed=5, distribution=distribution) for _, t in v.events()]
            return float(np.mean(times))

        self.assertLess(mean_time("early"), mean_time("uniform"))
        self.assertLess(mean_time("uniform"), mean_time("late"))

    def test_invalid_arguments(self):
        with self.assertRaises(ToolkitError):
            generate_volleys(4, 1, 1.5, seed=0)
        with self.assertRaises(ToolkitError):
            generate_volleys(4, 1, 0.5, seed=0, distribution="gaussian")


if __name__ == "__main__":
    unittest.main()
