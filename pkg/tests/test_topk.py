"""Testes para a poda top-k e os arquivos de seletor."""

import unittest

import numpy as np

from src.errors import SelectorParseError, ToolkitError, WidthMismatchError
from src.sortnet import (
    CompareSwap,
    SortingNetwork,
    all_binary_inputs,
    bits,
    eval_bits,
    gen_bitonic,
    load_bundled,
    monotone_stream,
    stream_values,
)
from src.topk import (
    counts_json,
    dump_selector,
    eval_topk,
    eval_topk_temporal,
    find_half_units,
    load_selector,
    prune_topk,
    selector_counts,
    sweep_counts,
)


class TestPruneCounts(unittest.TestCase):
    """Contagens (total, obrigatórias, meias) das redes de 8 fios."""

    def test_bitonic_8(self):
        self.assertEqual(selector_counts(prune_topk(gen_bitonic(8), 2)), (24, 19, 6))
        self.assertEqual(selector_counts(prune_topk(gen_bitonic(8), 4)), (24, 20, 4))

    def test_optimal_8(self):
        self.assertEqual(selector_counts(prune_topk(load_bundled(8), 2)), (19, 14, 6))
        self.assertEqual(selector_counts(prune_topk(load_bundled(8), 4)), (19, 18, 4))

    def test_sweep(self):
        """Testa todos os k para as duas redes de 8 fios."""
        bitonic = [(m, h) for _, _, m, h in sweep_counts(gen_bitonic(8), range(1, 9))]
        optimal = [(m, h) for _, _, m, h in sweep_counts(load_bundled(8), range(1, 9))]
        self.assertEqual(bitonic, [(19, 7), (19, 6), (20, 5), (20, 4), (23, 3), (23, 2), (24, 1), (24, 0)])
        self.assertEqual(optimal, [(7, 7), (14, 6), (14, 5), (18, 4), (18, 3), (19, 2), (19, 1), (19, 0)])

    def test_k_equals_n(self):
        for net in (gen_bitonic(16), load_bundled(16)):
            sel = prune_topk(net, 16)
            self.assertEqual(selector_counts(sel), (net.size, net.size, 0))
            self.assertEqual(sel.mandatory, net.units)

    def test_mandatory_keeps_source_order(self):
        net = load_bundled(16)
        sel = prune_topk(net, 3)
        positions = [net.units.index(unit) for unit in sel.mandatory]
        self.assertEqual(positions, sorted(positions))

    def test_k_out_of_range(self):
        for k in (0, 9):
            with self.assertRaises(ToolkitError):
                prune_topk(gen_bitonic(8), k)

    def test_counts_json(self):
        self.assertEqual(counts_json(prune_topk(load_bundled(8), 2)), '{"half": 6, "mandatory": 14, "total": 19}')

    def test_unvalidated_source_warns(self):
        net = SortingNetwork(n=4, units=(CompareSwap(0, 1), CompareSwap(2, 3), CompareSwap(1, 3)))
        with self.assertLogs("src.topk", level="WARNING"):
            sel = prune_topk(net, 1)
        self.assertTrue(any("não validada" in note for note in sel.provenance))

    def test_half_unit_dead_wire_is_never_read(self):
        sel = prune_topk(load_bundled(16), 2)
        for position, wire in sel.half:
            later = sel.mandatory[position + 1:]
            self.assertTrue(all(wire not in unit.wires for unit in later))
            self.assertNotIn(wire, sel.output_wires)


class TestSelectorSoundness(unittest.TestCase):
    """O seletor devolve os k fios de baixo do ordenador completo."""

    def _check(self, net: SortingNetwork, k: int, inputs: np.ndarray):
        expected = eval_bits(net, inputs)[net.n - k:]
        got = eval_topk(prune_topk(net, k), inputs)
        np.testing.assert_array_equal(got, expected)

    def test_exhaustive_small(self):
        for n in (4, 8):
            inputs = all_binary_inputs(n)
            for net in (gen_bitonic(n), load_bundled(n)):
                for k in range(1, n + 1):
                    self._check(net, k, inputs)

    def test_exhaustive_16(self):
        inputs = all_binary_inputs(16)
        for net in (gen_bitonic(16), load_bundled(16)):
            for k in (1, 2, 3, 4, 8, 16):
                self._check(net, k, inputs)

    def test_random_large(self):
        rng = np.random.default_rng(11)
        for n in (32, 64):
            inputs = (rng.random((n, 2000)) < 0.5).astype(np.uint8)
            for k in (1, 2, 4):
                self._check(load_bundled(n), k, inputs)
                self._check(gen_bitonic(n), k, inputs)

    def test_output_is_min_popcount_k(self):
        inputs = all_binary_inputs(8)
        popcount = inputs.sum(axis=0)
        for k in range(1, 9):
            out = eval_topk(prune_topk(load_bundled(8), k), inputs)
            np.testing.assert_array_equal(out.sum(axis=0), np.minimum(popcount, k))

    def test_half_unit_safety(self):
        """Testa que forçar os fios mortos em 0 ou 1 não muda as saídas."""
        inputs = all_binary_inputs(8)
        for net in (gen_bitonic(8), load_bundled(8)):
            for k in range(1, 9):
                sel = prune_topk(net, k)
                np.testing.assert_array_equal(
                    eval_topk(sel, inputs, dead_value=0),
                    eval_topk(sel, inputs, dead_value=1),
                )

    def test_temporal(self):
        values = [3, 0, 7, 5, 1, 6, 2, 4]
        out = eval_topk_temporal(prune_topk(load_bundled(8), 2), monotone_stream(values, 8))
        self.assertEqual(stream_values(out), [6, 7])

    def test_temporal_pulse_trains(self):
        """Testa dois trens de pulsos não monotônicos entre 16 fios, k = 2."""
        sel = prune_topk(load_bundled(16), 2)
        stream = np.zeros((16, 8), dtype=np.uint8)
        stream[3] = bits("01101100")
        stream[11] = bits("10011010")
        out = eval_topk_temporal(sel, stream)
        self.assertEqual(out.shape, (2, 8))
        np.testing.assert_array_equal(out.sum(axis=0), stream.sum(axis=0))
        self.assertEqual(int(out.sum()), 8)

        silent = eval_topk_temporal(sel, np.zeros((16, 8), dtype=np.uint8))
        self.assertFalse(silent.any())

    def test_temporal_truncation(self):
        """Testa que um ciclo com três uns sai com exatamente dois."""
        sel = prune_topk(load_bundled(16), 2)
        stream = np.zeros((16, 4), dtype=np.uint8)
        stream[[0, 5, 9], 2] = 1
        stream[7, 1] = 1
        out = eval_topk_temporal(sel, stream)
        self.assertEqual(out.sum(axis=0).tolist(), [0, 1, 2, 0])
        np.testing.assert_array_equal(out.sum(axis=0), np.minimum(stream.sum(axis=0), 2))

    def test_width_mismatch(self):
        with self.assertRaises(WidthMismatchError):
            eval_topk(prune_topk(load_bundled(8), 2), "0101")


class TestSelectorFiles(unittest.TestCase):
    """Testes para dump_selector / load_selector."""

    def setUp(self):
        self.sel = prune_topk(load_bundled(8), 2)
        self.text = dump_selector(self.sel)

    def test_round_trip(self):
        loaded = load_selector(self.text)
        self.assertEqual(loaded.mandatory, self.sel.mandatory)
        self.assertEqual(loaded.half, self.sel.half)
        self.assertEqual(selector_counts(loaded), (19, 14, 6))
        self.assertEqual(loaded.source_digest, self.sel.source_digest)
        self.assertEqual(dump_selector(loaded), self.text)

    def test_annotations(self):
        self.assertEqual(self.text.count(" H:"), 6)
        self.assertIn("n 8\nk 2\ntotal 19\n", self.text)

    def test_tampered_annotation(self):
        lines = self.text.splitlines()
        for index, line in enumerate(lines):
            if " H:" in line:
                lines[index] = line.split(" H:")[0]
                break
        with self.assertRaises(SelectorParseError):
            load_selector("\n".join(lines))

    def test_missing_header(self):
        with self.assertRaises(SelectorParseError):
            load_selector("n 8\n0 1\n")
        with self.assertRaises(SelectorParseError):
            load_selector("")

    def test_bad_unit(self):
        with self.assertRaises(SelectorParseError) as ctx:
            load_selector("n 4\nk 1\ntotal 3\n0 1\n3 2\n")
        self.assertEqual(ctx.exception.line, 5)

    def test_non_ascii_digits(self):
        cases = {
            "n 4\nk 1\ntotal ³\n": 3,
            "n 4\nk 1\ntotal 3\n0 ¹\n": 4,
            "n 2\nk 1\ntotal 1\n0 1 H:¹\n": 4,
        }
        for text, line in cases.items():
            with self.assertRaises(SelectorParseError) as ctx:
                load_selector(text)
            self.assertEqual(ctx.exception.line, line, text)

    def test_find_half_units_k1(self):
        """Com k = 1 o fio n-1 é sempre consumido."""
        units = (CompareSwap(0, 1), CompareSwap(1, 2))
        self.assertEqual(find_half_units(3, 1, units), frozenset({(1, 1), (0, 0)}))


if __name__ == "__main__":
    unittest.main()
