"""Modelo de custo em gate-equivalents (GE) para dendritos e neurônios."""

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, model_validator

from src.cache import SelectorCache
from src.errors import ConfigurationError, ToolkitError
from src.neuron import DendriteKind
from src.sortnet import BUNDLED_SIZES, SortingNetwork, gen_bitonic, load_bundled
from src.topk import TopKSelector

# Pesos em GE; só ordenações e tendências são comparadas, nunca valores absolutos.
CELL_GE: Dict[str, int] = {"AND2": 1, "OR2": 1, "HA": 3, "FA": 5, "DFF": 4}

_selectors = SelectorCache()


class GateReport(BaseModel):
    """Contagem de células de um ponto de projeto e seu total em GE."""

    label: str
    and2: int = 0
    or2: int = 0
    ha: int = 0
    fa: int = 0
    dff: int = 0
    removed: int = 0
    selector_ge: int = 0
    pc_ge: int = 0
    soma_ge: int = 0

    @model_validator(mode="after")
    def _check(self):
        for name in ("and2", "or2", "ha", "fa", "dff", "removed"):
            if getattr(self, name) < 0:
                raise ValueError(f"Contagem negativa em {name}")
        if self.selector_ge + self.pc_ge + self.soma_ge != self.ge_total:
            raise ValueError("Divisão do GE não corresponde às contagens de células")
        return self

    @property
    def gates(self) -> int:
        """Portas de duas entradas efetivas (AND2 + OR2)."""
        return self.and2 + self.or2

    @property
    def ge_total(self) -> int:
        return (
            self.and2 * CELL_GE["AND2"]
            + self.or2 * CELL_GE["OR2"]
            + self.ha * CELL_GE["HA"]
            + self.fa * CELL_GE["FA"]
            + self.dff * CELL_GE["DFF"]
        )

    def cell_counts(self) -> Dict[str, int]:
        return {"AND2": self.and2, "OR2": self.or2, "HA": self.ha, "FA": self.fa, "DFF": self.dff}

    def to_dict(self) -> Dict[str, object]:
        data = self.model_dump()
        data["ge_total"] = self.ge_total
        return data


# ---------------------------------------------------------------------------
# Construções estruturais (compartilhadas com o emissor de netlist)
# ---------------------------------------------------------------------------

class CellCounter:
    """Construtor que apenas conta células; as redes são inteiros opacos."""

    def __init__(self):
        self.counts = {"AND2": 0, "OR2": 0, "HA": 0, "FA": 0}
        self.removed = 0
        self._next = 0

    def _net(self) -> int:
        self._next += 1
        return self._next

    def and2(self, a, b):
        self.counts["AND2"] += 1
        return self._net()

    def or2(self, a, b):
        self.counts["OR2"] += 1
        return self._net()

    def ha(self, a, b):
        self.counts["HA"] += 1
        return self._net(), self._net()

    def fa(self, a, b, c):
        self.counts["FA"] += 1
        return self._net(), self._net()

    def const0(self):
        return self._net()

    def dead(self):
        self.removed += 1
        return self._net()


def build_selector(builder, sel: TopKSelector, inputs: Sequence) -> List:
    """Instancia o seletor: AND2 no fio de cima, OR2 no de baixo, CONST0 no fio morto."""
    wires = list(inputs)
    dead = dict(sel.half)
    for position, unit in enumerate(sel.mandatory):
        a, b = wires[unit.i], wires[unit.j]
        dead_wire = dead.get(position)
        wires[unit.i] = builder.dead() if dead_wire == unit.i else builder.and2(a, b)
        wires[unit.j] = builder.dead() if dead_wire == unit.j else builder.or2(a, b)
    return wires[sel.n - sel.k:]


def build_compact_pc(builder, inputs: Sequence) -> List:
    """
    PC compacto: compressor por colunas só com somadores completos.

    Colunas com dois bits usam um FA com carry-in constante 0. Com n potência
    de dois o total é n-1 FAs; make_design só aceita essas larguras.
    Retorna os bits da soma, LSB primeiro.
    """
    columns = [list(inputs)]
    outputs = []
    zero = None
    weight = 0
    while weight < len(columns):
        column = columns[weight]
        carries = []
        while len(column) >= 3:
            a, b, c = column.pop(0), column.pop(0), column.pop(0)
            s, carry = builder.fa(a, b, c)
            column.append(s)
            carries.append(carry)
        if len(column) == 2:
            if zero is None:
                zero = builder.const0()
            s, carry = builder.fa(column[0], column[1], zero)
            column = [s]
            carries.append(carry)
        if column:
            outputs.append(column[0])
        if carries:
            if weight + 1 == len(columns):
                columns.append([])
            columns[weight + 1].extend(carries)
        weight += 1
    return outputs


def _ripple_add(builder, a: List, b: List) -> List:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return list(a)
    total = []
    s, carry = builder.ha(a[0], b[0])
    total.append(s)
    for bit in range(1, len(b)):
        s, carry = builder.fa(a[bit], b[bit], carry)
        total.append(s)
    for bit in range(len(b), len(a)):
        s, carry = builder.ha(a[bit], carry)
        total.append(s)
    total.append(carry)
    return total


def build_adder_tree(builder, inputs: Sequence) -> List:
    """
    PC convencional: árvore de somadores ripple-carry.

    Divide as entradas ao meio, conta cada metade recursivamente e soma os
    dois resultados (HA no bit 0, FA nos bits comuns, HA no restante).
    """
    inputs = list(inputs)
    if len(inputs) <= 1:
        return inputs
    middle = len(inputs) // 2
    return _ripple_add(builder, build_adder_tree(builder, inputs[:middle]), build_adder_tree(builder, inputs[middle:]))


# ---------------------------------------------------------------------------
# Projetos de dendrito
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DendriteDesign:
    """Dendrito concreto: tipo, largura e, para os tipos com ordenador, o seletor."""

    kind: DendriteKind
    n: int
    k: Optional[int] = None
    selector: Optional[TopKSelector] = None
    source: str = ""

    @property
    def label(self) -> str:
        label = f"{self.kind.value} n={self.n}"
        if self.k is not None:
            label += f" k={self.k}"
        if self.source:
            label += f" [{self.source}]"
        return label


def is_power_of_two(value: int) -> bool:
    return value >= 1 and not value & (value - 1)


def make_design(
    kind: DendriteKind,
    n: int,
    k: Optional[int] = None,
    network: Optional[SortingNetwork] = None,
    source: str = "",
) -> DendriteDesign:
    """
    Monta um DendriteDesign.

    Raises:
        ConfigurationError: Parâmetros inconsistentes, larguras que não são
            potência de dois ou rede ausente
    """
    kind = DendriteKind(kind)
    if not is_power_of_two(n):
        raise ConfigurationError(f"n deve ser potência de dois no modelo de custo: {n}")
    if not kind.needs_k:
        return DendriteDesign(kind=kind, n=n)
    if k is None or not 1 <= k <= n:
        raise ConfigurationError(f"Dendrito {kind.value} exige 1 <= k <= {n}")
    if not is_power_of_two(k):
        raise ConfigurationError(f"k deve ser potência de dois no modelo de custo: {k}")
    if network is None:
        raise ConfigurationError(f"Dendrito {kind.value} exige uma rede de origem")
    if network.n != n:
        raise ConfigurationError(f"Rede de {network.n} fios para dendrito de {n} entradas")
    # sorting-pc mantém o ordenador inteiro; só o PC olha os k fios de baixo
    selector = _selectors.get_or_prune(network, n if kind == DendriteKind.SORTING_PC else k)
    return DendriteDesign(kind=kind, n=n, k=k, selector=selector, source=source or network.origin.value)


def build_dendrite(builder, design: DendriteDesign, inputs: Sequence) -> List:
    """Instancia o dendrito e retorna os bits da contagem (LSB primeiro)."""
    if design.kind == DendriteKind.PC_COMPACT:
        return build_compact_pc(builder, inputs)
    if design.kind == DendriteKind.PC_CONVENTIONAL:
        return build_adder_tree(builder, inputs)
    selected = build_selector(builder, design.selector, inputs)
    return build_compact_pc(builder, selected[len(selected) - design.k:])


def _report(label: str, counter: CellCounter, selector_ge: int) -> GateReport:
    c = counter.counts
    total = c["AND2"] * CELL_GE["AND2"] + c["OR2"] * CELL_GE["OR2"] + c["HA"] * CELL_GE["HA"] + c["FA"] * CELL_GE["FA"]
    return GateReport(
        label=label,
        and2=c["AND2"],
        or2=c["OR2"],
        ha=c["HA"],
        fa=c["FA"],
        removed=counter.removed,
        selector_ge=selector_ge,
        pc_ge=total - selector_ge,
    )


def selector_gates(sel: TopKSelector) -> GateReport:
    """
    Portas do seletor: AND2 + OR2 == 2·obrigatórias - meias.

    `removed` conta as portas retiradas das meias unidades.
    """
    counter = CellCounter()
    build_selector(counter, sel, range(sel.n))
    selector_ge = counter.counts["AND2"] * CELL_GE["AND2"] + counter.counts["OR2"] * CELL_GE["OR2"]
    return _report(f"topk n={sel.n} k={sel.k}", counter, selector_ge)


def design_gates(design: DendriteDesign) -> GateReport:
    """Contagem de células de um DendriteDesign."""
    counter = CellCounter()
    selector_ge = 0
    if design.selector is not None:
        build_selector(counter, design.selector, range(design.n))
        selector_ge = counter.counts["AND2"] * CELL_GE["AND2"] + counter.counts["OR2"] * CELL_GE["OR2"]
        counter_pc = CellCounter()
        build_compact_pc(counter_pc, range(design.k))
        for cell, count in counter_pc.counts.items():
            counter.counts[cell] += count
    else:
        build_dendrite(counter, design, range(design.n))
    return _report(design.label, counter, selector_ge)


def dendrite_gates(
    kind: DendriteKind,
    n: int,
    k: Optional[int] = None,
    network: Optional[SortingNetwork] = None,
) -> GateReport:
    """
    Custo do dendrito.

    pc-compact: compressor só com FAs (n-1 para n potência de dois);
    pc-conventional: árvore de somadores; sorting-pc/topk-pc: portas do
    seletor (ordenador inteiro no sorting-pc) + PC compacto sobre k fios.

    Raises:
        ConfigurationError: Rede ausente para sorting-pc/topk-pc
    """
    return design_gates(make_design(kind, n, k, network))


def soma_gates(acc_bits: int = 5, pulse: int = 8) -> GateReport:
    """
    Estimativa fixa de soma + axônio, igual para todos os dendritos.

    Somador do acumulador (B FA), registrador de membrana (B DFF),
    comparador de limiar (B FA) e contador do pulso do axônio
    (ceil(log2 P) DFF + ceil(log2 P) HA).
    """
    counter_bits = max(1, math.ceil(math.log2(pulse))) if pulse > 1 else 1
    fa = 2 * acc_bits
    dff = acc_bits + counter_bits
    ha = counter_bits
    soma_ge = fa * CELL_GE["FA"] + dff * CELL_GE["DFF"] + ha * CELL_GE["HA"]
    return GateReport(label=f"soma B={acc_bits} P={pulse}", fa=fa, dff=dff, ha=ha, soma_ge=soma_ge)


def neuron_gates(
    kind: DendriteKind,
    n: int,
    k: Optional[int] = None,
    network: Optional[SortingNetwork] = None,
    acc_bits: int = 5,
    pulse: int = 8,
) -> GateReport:
    """Dendrito + soma/axônio."""
    dendrite = dendrite_gates(kind, n, k, network)
    soma = soma_gates(acc_bits, pulse)
    return GateReport(
        label=dendrite.label.replace("n=", "neuron n=", 1),
        and2=dendrite.and2,
        or2=dendrite.or2,
        ha=dendrite.ha + soma.ha,
        fa=dendrite.fa + soma.fa,
        dff=soma.dff,
        removed=dendrite.removed,
        selector_ge=dendrite.selector_ge,
        pc_ge=dendrite.pc_ge,
        soma_ge=soma.soma_ge,
    )


# ---------------------------------------------------------------------------
# Tabelas
# ---------------------------------------------------------------------------

@dataclass
class DesignRow:
    design: str
    kind: str
    source: str
    n: int
    k: int
    report: GateReport
    neuron_ge: int

    @property
    def ge(self) -> int:
        return self.report.ge_total

    def to_dict(self) -> Dict[str, object]:
        return {
            "design": self.design,
            "kind": self.kind,
            "source": self.source,
            "n": self.n,
            "k": self.k,
            "and2": self.report.and2,
            "or2": self.report.or2,
            "ha": self.report.ha,
            "fa": self.report.fa,
            "removed": self.report.removed,
            "selector_ge": self.report.selector_ge,
            "pc_ge": self.report.pc_ge,
            "dendrite_ge": self.ge,
            "neuron_ge": self.neuron_ge,
        }


def default_networks(n: int) -> Dict[str, SortingNetwork]:
    """Ordenadores de referência para n: bitônico e, se houver, o empacotado."""
    networks: Dict[str, SortingNetwork] = {}
    if 2 <= n <= 64 and is_power_of_two(n):
        networks["bitonic"] = gen_bitonic(n)
    if n in BUNDLED_SIZES:
        networks["bundled"] = load_bundled(n)
    return networks


def rank_designs(
    n: int,
    k: int,
    networks: Optional[Dict[str, SortingNetwork]] = None,
    acc_bits: int = 5,
    pulse: int = 8,
) -> List[DesignRow]:
    """
    Tabela de custo dos quatro tipos de dendrito, ordenada por GE.

    Cada rede em `networks` gera uma linha sorting-pc e uma topk-pc.

    Args:
        n: Entradas
        k: Saídas do top-k
        networks: Rótulo -> ordenador (se None, usa default_networks)

    Returns:
        Linhas ordenadas por (GE do dendrito, rótulo)
    """
    if networks is None:
        networks = default_networks(n)
    if not networks:
        raise ToolkitError(f"Nenhum ordenador disponível para n={n}")

    rows = []
    for kind in (DendriteKind.PC_CONVENTIONAL, DendriteKind.PC_COMPACT):
        report = dendrite_gates(kind, n)
        neuron = neuron_gates(kind, n, acc_bits=acc_bits, pulse=pulse)
        rows.append(DesignRow(kind.value, kind.value, "", n, k, report, neuron.ge_total))
    for source, network in sorted(networks.items()):
        for kind in (DendriteKind.SORTING_PC, DendriteKind.TOPK_PC):
            report = design_gates(make_design(kind, n, k, network, source))
            neuron = neuron_gates(kind, n, k, network, acc_bits, pulse)
            rows.append(DesignRow(f"{kind.value}[{source}]", kind.value, source, n, k, report, neuron.ge_total))

    rows.sort(key=lambda row: (row.ge, row.design))
    return rows


def selector_sweep(networks: Dict[int, SortingNetwork], ks: Sequence[int]) -> List[Dict[str, int]]:
    """
    Portas efetivas e removidas dos seletores para cada (n, k) com k <= n.

    São os dados das barras empilhadas da análise de portas do top-k.
    """
    rows = []
    for n, network in sorted(networks.items()):
        for k in ks:
            if k > n:
                continue
            sel = _selectors.get_or_prune(network, k)
            report = selector_gates(sel)
            rows.append({
                "n": n,
                "k": k,
                "mandatory": len(sel.mandatory),
                "half": len(sel.half),
                "effective": report.gates,
                "removed": report.removed,
            })
    return rows


def _csv(rows: List[Dict[str, object]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def to_csv(rows: List[DesignRow]) -> str:
    return _csv(report_rows(rows))


def to_json(rows: List[DesignRow]) -> str:
    return json.dumps(report_rows(rows), sort_keys=True, indent=2)


def plot_data(rows: List[DesignRow]) -> List[Tuple[int, int, str, int]]:
    """Tuplas (n, k, projeto, GE) para gráficos externos."""
    return [(row.n, row.k, row.design, row.ge) for row in rows]


def plot_data_csv(rows: List[DesignRow]) -> str:
    return _csv([{"n": n, "k": k, "design": d, "ge": ge} for n, k, d, ge in plot_data(rows)])


def compact_pc_plan(n: int) -> Dict[str, int]:
    """Células do PC compacto de n entradas (n-1 FAs para n potência de dois)."""
    counter = CellCounter()
    build_compact_pc(counter, range(n))
    return dict(counter.counts)


def adder_tree_plan(n: int) -> Dict[str, int]:
    """Células da árvore de somadores de n entradas (16 entradas: 15 HA + 11 FA)."""
    counter = CellCounter()
    build_adder_tree(counter, range(n))
    return dict(counter.counts)


def report_rows(rows: List[DesignRow]) -> List[Dict[str, object]]:
    return [row.to_dict() for row in rows]
