"""Testes para o modelo de custo em gate-equivalents."""

import csv
import io
import json
import unittest

from src.cost import (
    CELL_GE,
    GateReport,
    adder_tree_plan,
    compact_pc_plan,
    dendrite_gates,
    neuron_gates,
    plot_data,
    rank_designs,
    selector_gates,
    selector_sweep,
    soma_gates,
    to_csv,
    to_json,
)
from src.errors import ConfigurationError
from src.neuron import DendriteKind
from src.sortnet import gen_bitonic, load_bundled
from src.topk import prune_topk


class TestSelectorGates(unittest.TestCase):
    """Portas efetivas e removidas dos seletores."""

    def test_examples(self):
        optimal = selector_gates(prune_topk(load_bundled(8), 2))
        bitonic = selector_gates(prune_topk(gen_bitonic(8), 2))
        self.assertEqual(optimal.gates, 22)
        self.assertEqual(optimal.removed, 6)
        self.assertEqual(bitonic.gates, 32)
        self.assertLess(optimal.gates, bitonic.gates)

    def test_full_sorter(self):
        for net in (gen_bitonic(16), load_bundled(16)):
            report = selector_gates(prune_topk(net, 16))
            self.assertEqual(report.gates, 2 * net.size)
            self.assertEqual(report.and2, net.size)
            self.assertEqual(report.removed, 0)

    def test_gates_per_k(self):
        bitonic = [selector_gates(prune_topk(gen_bitonic(8), k)).gates for k in range(1, 9)]
        optimal = [selector_gates(prune_topk(load_bundled(8), k)).gates for k in range(1, 9)]
        self.assertEqual(bitonic, [31, 32, 35, 36, 43, 44, 47, 48])
        self.assertEqual(optimal, [7, 22, 23, 32, 33, 36, 37, 38])

    def test_non_decreasing_in_k(self):
        for net in (gen_bitonic(16), load_bundled(16), load_bundled(32)):
            gates = [selector_gates(prune_topk(net, k)).selector_ge for k in range(1, net.n + 1)]
            self.assertEqual(gates, sorted(gates))

    def test_sweep(self):
        rows = selector_sweep({8: load_bundled(8), 16: load_bundled(16)}, [1, 2, 4, 16])
        self.assertEqual(len(rows), 7)
        for row in rows:
            self.assertEqual(row["effective"] + row["removed"], 2 * row["mandatory"])
            self.assertEqual(row["removed"], row["half"])


class TestParallelCounters(unittest.TestCase):
    """Construções de PC."""

    def test_compact_pc_full_adders(self):
        for n in (2, 4, 8, 16, 32, 64):
            plan = compact_pc_plan(n)
            self.assertEqual(plan["FA"], n - 1, n)
            self.assertEqual(plan["HA"], 0)

    def test_small_pc(self):
        self.assertEqual(compact_pc_plan(1)["FA"], 0)
        self.assertEqual(compact_pc_plan(2)["FA"], 1)

    def test_adder_tree(self):
        self.assertEqual(adder_tree_plan(16), {"AND2": 0, "OR2": 0, "HA": 15, "FA": 11})
        self.assertEqual(adder_tree_plan(2), {"AND2": 0, "OR2": 0, "HA": 1, "FA": 0})


class TestDendriteGates(unittest.TestCase):
    """Custo dos quatro tipos de dendrito."""

    def test_pc_compact(self):
        report = dendrite_gates(DendriteKind.PC_COMPACT, 16)
        self.assertEqual(report.fa, 15)
        self.assertEqual(report.ge_total, 75)

    def test_topk_pc(self):
        report = dendrite_gates(DendriteKind.TOPK_PC, 8, 2, load_bundled(8))
        self.assertEqual(report.gates, 22)
        self.assertEqual(report.fa, 1)
        self.assertEqual(report.selector_ge, 22)
        self.assertEqual(report.pc_ge, CELL_GE["FA"])

    def test_topk_pc_k_equals_n(self):
        net = load_bundled(8)
        report = dendrite_gates(DendriteKind.TOPK_PC, 8, 8, net)
        self.assertEqual(report.gates, 2 * net.size)
        self.assertEqual(report.fa, 7)
        self.assertGreaterEqual(report.ge_total, dendrite_gates(DendriteKind.PC_COMPACT, 8).ge_total)

    def test_sorting_pc_keeps_whole_sorter(self):
        net = gen_bitonic(8)
        report = dendrite_gates(DendriteKind.SORTING_PC, 8, 2, net)
        self.assertEqual(report.gates, 2 * net.size)
        self.assertEqual(report.fa, 1)

    def test_small_pc_has_k_minus_one_full_adders(self):
        for n in (8, 16, 32):
            for k in (1, 2, 4, 8):
                report = dendrite_gates(DendriteKind.TOPK_PC, n, k, load_bundled(n))
                self.assertEqual(report.fa, k - 1, (n, k))
            self.assertEqual(dendrite_gates(DendriteKind.PC_COMPACT, n).fa, n - 1)

    def test_widths_must_be_powers_of_two(self):
        for n in (3, 5, 12, 24):
            with self.assertRaises(ConfigurationError):
                dendrite_gates(DendriteKind.PC_COMPACT, n)
        with self.assertRaises(ConfigurationError):
            dendrite_gates(DendriteKind.TOPK_PC, 8, 3, load_bundled(8))
        with self.assertRaises(ConfigurationError):
            dendrite_gates(DendriteKind.SORTING_PC, 8, 6, gen_bitonic(8))

    def test_missing_network(self):
        with self.assertRaises(ConfigurationError):
            dendrite_gates(DendriteKind.TOPK_PC, 8, 2)
        with self.assertRaises(ConfigurationError):
            dendrite_gates(DendriteKind.SORTING_PC, 8, None, gen_bitonic(8))
        with self.assertRaises(ConfigurationError):
            dendrite_gates(DendriteKind.TOPK_PC, 16, 2, gen_bitonic(8))


class TestGateReport(unittest.TestCase):
    """Invariantes do relatório."""

    def test_total_matches_breakdown(self):
        report = neuron_gates(DendriteKind.TOPK_PC, 16, 2, load_bundled(16))
        total = sum(count * CELL_GE[cell] for cell, count in report.cell_counts().items())
        self.assertEqual(report.ge_total, total)
        self.assertEqual(report.selector_ge + report.pc_ge + report.soma_ge, total)

    def test_inconsistent_breakdown(self):
        with self.assertRaises(ValueError):
            GateReport(label="x", fa=1, pc_ge=4)
        with self.assertRaises(ValueError):
            GateReport(label="x", and2=-1)

    def test_soma(self):
        soma = soma_gates(acc_bits=5, pulse=8)
        self.assertEqual((soma.fa, soma.dff, soma.ha), (10, 8, 3))
        self.assertEqual(soma.ge_total, 10 * 5 + 8 * 4 + 3 * 3)


class TestRankDesigns(unittest.TestCase):
    """Tabelas de custo."""

    def _ge(self, rows, design):
        return next(row.ge for row in rows if row.design == design)

    def test_topk_beats_compact_pc_at_k2(self):
        for n, expected in ((16, (49, 75)), (32, (97, 155)), (64, (193, 315))):
            rows = rank_designs(n, 2)
            self.assertEqual((self._ge(rows, "topk-pc[bundled]"), self._ge(rows, "pc-compact")), expected)

    def test_k_equals_n(self):
        rows = rank_designs(8, 8)
        self.assertGreaterEqual(self._ge(rows, "topk-pc[bundled]"), self._ge(rows, "pc-compact"))

    def test_optimal_source_not_worse(self):
        rows = rank_designs(8, 2)
        self.assertLessEqual(self._ge(rows, "topk-pc[bundled]"), self._ge(rows, "topk-pc[bitonic]"))

    def test_sorted_and_complete(self):
        rows = rank_designs(16, 2)
        self.assertEqual([row.ge for row in rows], sorted(row.ge for row in rows))
        self.assertEqual({row.kind for row in rows}, {kind.value for kind in DendriteKind})
        soma = soma_gates().ge_total
        self.assertTrue(all(row.neuron_ge - row.ge == soma for row in rows))

    def test_exports(self):
        rows = rank_designs(8, 2)
        parsed = list(csv.DictReader(io.StringIO(to_csv(rows))))
        self.assertEqual(len(parsed), len(rows))
        self.assertEqual(parsed[0]["design"], rows[0].design)
        self.assertEqual(json.loads(to_json(rows))[0]["dendrite_ge"], rows[0].ge)
        self.assertEqual(plot_data(rows)[0], (8, 2, rows[0].design, rows[0].ge))
        self.assertEqual(to_csv(rows), to_csv(rank_designs(8, 2)))


if __name__ == "__main__":
    unittest.main()
