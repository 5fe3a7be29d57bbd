"""Netlist estrutural plana (AND2/OR2/HA/FA/CONST0) para seletores e dendritos."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from src.cost import DendriteDesign, build_dendrite, build_selector
from src.errors import NetlistError
from src.sortnet import BitsLike, SortingNetwork, bits
from src.topk import TopKSelector

logger = logging.getLogger(__name__)

# Tipo da célula -> (número de entradas, número de saídas)
CELL_PINS: Dict[str, Tuple[int, int]] = {
    "AND2": (2, 1),
    "OR2": (2, 1),
    "HA": (2, 2),
    "FA": (3, 2),
    "CONST0": (0, 1),
}

Design = Union[TopKSelector, SortingNetwork, DendriteDesign]


@dataclass(frozen=True)
class Cell:
    kind: str
    outputs: Tuple[str, ...]
    inputs: Tuple[str, ...]

    def line(self) -> str:
        return " ".join((self.kind,) + self.outputs + self.inputs)


@dataclass(frozen=True)
class Netlist:
    """Instâncias em ordem topológica, entradas x<i> e saídas y<i> -> rede."""

    label: str
    inputs: Tuple[str, ...]
    outputs: Tuple[Tuple[str, str], ...]
    cells: Tuple[Cell, ...]

    def cell_counts(self) -> Dict[str, int]:
        counts = {kind: 0 for kind in CELL_PINS}
        for cell in self.cells:
            counts[cell.kind] += 1
        return counts


class NetlistBuilder:
    """Construtor que instancia células com nomes de rede estáveis."""

    def __init__(self):
        self.cells: List[Cell] = []
        self._serial: Dict[str, int] = {}

    def _name(self, prefix: str) -> str:
        index = self._serial.get(prefix, 0)
        self._serial[prefix] = index + 1
        return f"{prefix}{index}"

    def _add(self, kind: str, outputs: Tuple[str, ...], inputs: Tuple[str, ...]):
        self.cells.append(Cell(kind, outputs, inputs))

    def and2(self, a, b):
        out = self._name("and")
        self._add("AND2", (out,), (a, b))
        return out

    def or2(self, a, b):
        out = self._name("or")
        self._add("OR2", (out,), (a, b))
        return out

    def ha(self, a, b):
        index = self._serial.get("ha", 0)
        self._serial["ha"] = index + 1
        s, c = f"hs{index}", f"hc{index}"
        self._add("HA", (s, c), (a, b))
        return s, c

    def fa(self, a, b, c):
        index = self._serial.get("fa", 0)
        self._serial["fa"] = index + 1
        s, carry = f"fs{index}", f"fc{index}"
        self._add("FA", (s, carry), (a, b, c))
        return s, carry

    def const0(self):
        out = self._name("zero")
        self._add("CONST0", (out,), ())
        return out

    def dead(self):
        out = self._name("dead")
        self._add("CONST0", (out,), ())
        return out


def build_netlist(design: Design) -> Netlist:
    """
    Instancia o projeto como netlist.

    TopKSelector: saídas são os k fios de baixo. SortingNetwork: tratado como
    seletor com k = n. DendriteDesign: saídas são os bits da contagem, LSB
    primeiro.

    Raises:
        NetlistError: Tipo de projeto não suportado
    """
    builder = NetlistBuilder()
    if isinstance(design, SortingNetwork):
        design = TopKSelector(
            n=design.n,
            k=design.n,
            mandatory=design.units,
            half=frozenset(),
            source_total=design.size,
            source_digest=design.digest,
        )
        label = f"sorter n={design.n}"
    elif isinstance(design, TopKSelector):
        label = f"topk n={design.n} k={design.k}"
    elif isinstance(design, DendriteDesign):
        label = design.label
    else:
        raise NetlistError(f"Projeto não suportado: {type(design).__name__}")

    inputs = tuple(f"x{i}" for i in range(design.n))
    if isinstance(design, TopKSelector):
        nets = build_selector(builder, design, inputs)
    else:
        nets = build_dendrite(builder, design, inputs)

    outputs = tuple((f"y{index}", net) for index, net in enumerate(nets))
    return Netlist(label=label, inputs=inputs, outputs=outputs, cells=tuple(builder.cells))


def render_netlist(netlist: Netlist) -> str:
    counts = netlist.cell_counts()
    lines = [
        f"# netlist {netlist.label}",
        "# cells " + " ".join(f"{kind}={counts[kind]}" for kind in CELL_PINS),
    ]
    lines.extend(f"input {name}" for name in netlist.inputs)
    lines.extend(f"output {name} {net}" for name, net in netlist.outputs)
    lines.extend(cell.line() for cell in netlist.cells)
    return "\n".join(lines) + "\n"


def emit_netlist(design: Design) -> str:
    """Texto da netlist de um projeto (ver build_netlist)."""
    return render_netlist(build_netlist(design))


def parse_netlist(text: str) -> Netlist:
    """
    Lê uma netlist e confere a estrutura.

    Regras: cada rede tem um único driver; toda entrada de célula é dirigida
    antes do uso (o que exclui ciclos); saídas apontam para redes dirigidas;
    redes CONST0 só alimentam o carry-in de um FA (fios mortos ficam sem
    carga).

    Raises:
        NetlistError: Linha malformada ou violação estrutural
    """
    label = ""
    inputs: List[str] = []
    outputs: List[Tuple[str, str]] = []
    cells: List[Cell] = []
    driven: Dict[str, str] = {}
    constants = set()
    output_names = set()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("netlist"):
                label = body[len("netlist"):].strip()
            continue

        parts = line.split()
        head = parts[0]
        if head == "input":
            if len(parts) != 2:
                raise NetlistError(f"linha {lineno}: 'input <rede>' esperado")
            if parts[1] in driven:
                raise NetlistError(f"linha {lineno}: rede {parts[1]} com mais de um driver")
            inputs.append(parts[1])
            driven[parts[1]] = "input"
            continue
        if head == "output":
            if len(parts) != 3:
                raise NetlistError(f"linha {lineno}: 'output <nome> <rede>' esperado")
            if parts[1] in output_names:
                raise NetlistError(f"linha {lineno}: saída {parts[1]} repetida")
            output_names.add(parts[1])
            outputs.append((parts[1], parts[2]))
            continue
        if head not in CELL_PINS:
            raise NetlistError(f"linha {lineno}: célula desconhecida {head!r}")

        n_in, n_out = CELL_PINS[head]
        if len(parts) != 1 + n_in + n_out:
            raise NetlistError(f"linha {lineno}: {head} espera {n_out} saída(s) e {n_in} entrada(s)")
        outs = tuple(parts[1:1 + n_out])
        ins = tuple(parts[1 + n_out:])
        for pin, net in enumerate(ins):
            if net not in driven:
                raise NetlistError(f"linha {lineno}: rede {net} usada antes de ser dirigida")
            if net in constants and not (head == "FA" and pin == 2):
                raise NetlistError(f"linha {lineno}: rede constante {net} só pode ir ao carry-in de FA")
        for net in outs:
            if net in driven:
                raise NetlistError(f"linha {lineno}: rede {net} com mais de um driver")
            driven[net] = head
        if head == "CONST0":
            constants.add(outs[0])
        cells.append(Cell(head, outs, ins))

    for name, net in outputs:
        if net not in driven:
            raise NetlistError(f"saída {name} aponta para rede sem driver {net}")
        if net in constants:
            raise NetlistError(f"saída {name} ligada a uma rede constante")
    if not inputs:
        raise NetlistError("netlist sem entradas")

    return Netlist(label=label, inputs=tuple(inputs), outputs=tuple(outputs), cells=tuple(cells))


def interpret_netlist(netlist: Netlist, vectors: BitsLike) -> np.ndarray:
    """
    Avalia a netlist porta a porta.

    Args:
        netlist: Netlist em ordem topológica
        vectors: Vetor de entradas, ou array (entradas, m)

    Returns:
        Array uint8 (saídas, ...) com o formato das colunas da entrada
    """
    state = bits(vectors).astype(bool)
    if state.ndim == 0 or state.shape[0] != len(netlist.inputs):
        raise NetlistError(f"Esperadas {len(netlist.inputs)} entradas")

    values: Dict[str, np.ndarray] = {name: state[index] for index, name in enumerate(netlist.inputs)}
    zero = np.zeros(state.shape[1:], dtype=bool)
    for cell in netlist.cells:
        ins = [values[net] for net in cell.inputs]
        if cell.kind == "AND2":
            values[cell.outputs[0]] = ins[0] & ins[1]
        elif cell.kind == "OR2":
            values[cell.outputs[0]] = ins[0] | ins[1]
        elif cell.kind == "HA":
            values[cell.outputs[0]] = ins[0] ^ ins[1]
            values[cell.outputs[1]] = ins[0] & ins[1]
        elif cell.kind == "FA":
            a, b, c = ins
            values[cell.outputs[0]] = a ^ b ^ c
            values[cell.outputs[1]] = (a & b) | (c & (a ^ b))
        else:
            values[cell.outputs[0]] = zero

    if not netlist.outputs:
        return np.zeros((0,) + state.shape[1:], dtype=np.uint8)
    return np.stack([values[net] for _, net in netlist.outputs]).astype(np.uint8)


def output_value(out_bits: np.ndarray) -> np.ndarray:
    """Lê as saídas como inteiro sem sinal, y0 = LSB (saída dos dendritos)."""
    weights = (1 << np.arange(out_bits.shape[0], dtype=np.int64)).reshape((-1,) + (1,) * (out_bits.ndim - 1))
    return (out_bits.astype(np.int64) * weights).sum(axis=0)
