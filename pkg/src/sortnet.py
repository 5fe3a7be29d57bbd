"""Redes de ordenação (compare-and-swap) sobre bits e streams temporais unários.

Convenção única do toolkit: a unidade (i, j), com i < j, coloca AND(a_i, a_j)
no fio i e OR(a_i, a_j) no fio j. Os uns descem para os fios de índice maior,
então valores maiores saem embaixo (fio n-1).
"""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import NetworkParseError, ToolkitError, WidthMismatchError

logger = logging.getLogger(__name__)

NETWORKS_DIR = Path(__file__).parent / "networks"
BUNDLED_SIZES = (4, 8, 16, 32, 64)

EXHAUSTIVE_LIMIT = 20
DEFAULT_BUDGET = 10000

BitsLike = Union[str, Sequence[int], np.ndarray]


class Origin(str, Enum):
    """Procedência de uma rede."""

    BITONIC = "bitonic-generated"
    OPTIMAL = "loaded-optimal"
    CUSTOM = "loaded-custom"


@dataclass(frozen=True)
class CompareSwap:
    """Unidade compare-and-swap entre os fios i (min) e j (max)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.i >= self.j:
            raise ToolkitError(f"Unidade inválida ({self.i}, {self.j}): exige 0 <= i < j")

    @property
    def wires(self) -> Tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class SortingNetwork:
    """
    Lista ordenada de unidades compare-and-swap sobre n fios.

    A ordem de `units` é a ordem de execução (esquerda para a direita).
    `validated` indica que a rede passou (ou é válida por construção) no
    teste zero-um; não participa da igualdade nem do digest.
    """

    n: int
    units: Tuple[CompareSwap, ...]
    origin: Origin = Origin.CUSTOM
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        if self.n < 1:
            raise ToolkitError(f"Largura de rede inválida: {self.n}")
        for unit in self.units:
            if unit.j >= self.n:
                raise ToolkitError(
                    f"Unidade ({unit.i}, {unit.j}) fora da rede de {self.n} fios"
                )

    def __len__(self) -> int:
        return len(self.units)

    @property
    def size(self) -> int:
        """Número de unidades compare-and-swap."""
        return len(self.units)

    @property
    def depth(self) -> int:
        """Número de camadas paralelas (agendamento o mais cedo possível)."""
        level = [0] * self.n
        depth = 0
        for unit in self.units:
            current = max(level[unit.i], level[unit.j]) + 1
            level[unit.i] = level[unit.j] = current
            depth = max(depth, current)
        return depth

    @property
    def digest(self) -> str:
        """SHA-256 da serialização canônica."""
        return hashlib.sha256(dump_network(self).encode("utf-8")).hexdigest()


@dataclass
class ValidationReport:
    """Resultado do teste zero-um de uma rede."""

    passed: bool
    checked: int
    exhaustive: bool
    counterexample: Optional[str] = None
    output: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "counterexample": self.counterexample,
            "output": self.output,
        }


# ---------------------------------------------------------------------------
# Vetores de bits e streams temporais
# ---------------------------------------------------------------------------

def bits(value: BitsLike) -> np.ndarray:
    """
    Converte "10110100", listas ou arrays em um BitVector (uint8, fio 0 primeiro).

    Args:
        value: String de 0/1, sequência de inteiros ou array

    Returns:
        Array uint8 com valores 0/1
    """
    if isinstance(value, str):
        text = value.strip()
        if any(ch not in "01" for ch in text):
            raise ToolkitError(f"Vetor de bits inválido: {value!r}")
        return np.array([int(ch) for ch in text], dtype=np.uint8)
    arr = np.asarray(value)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ToolkitError("Vetor de bits deve conter apenas 0 e 1")
    return arr.astype(np.uint8)


def format_bits(vec: Iterable[int]) -> str:
    """Formata um BitVector como string, fio 0 primeiro."""
    return "".join(str(int(b)) for b in vec)


def as_stream(wires: Union[Sequence[BitsLike], np.ndarray]) -> np.ndarray:
    """
    Monta um TemporalStream (n fios x L ciclos).

    Raises:
        WidthMismatchError: Se os fios tiverem comprimentos diferentes
    """
    if isinstance(wires, np.ndarray):
        if wires.ndim != 2:
            raise WidthMismatchError("Stream temporal deve ter 2 dimensões (fios x ciclos)")
        return bits(wires)
    rows = [bits(w) for w in wires]
    lengths = {len(r) for r in rows}
    if len(lengths) > 1:
        raise WidthMismatchError(f"Streams com comprimentos diferentes: {sorted(lengths)}")
    if not rows:
        raise WidthMismatchError("Stream temporal vazio")
    return np.vstack(rows)


def monotone_stream(values: Sequence[int], length: int) -> np.ndarray:
    """
    Codifica inteiros em streams leading-0: valor v vira (L-v) zeros e v uns.

    Args:
        values: Valor de cada fio, 0 <= v <= length
        length: Número de ciclos L

    Returns:
        Stream (len(values) x length)
    """
    stream = np.zeros((len(values), length), dtype=np.uint8)
    for wire, value in enumerate(values):
        if value < 0 or value > length:
            raise ToolkitError(f"Valor {value} não cabe em {length} ciclos")
        if value:
            stream[wire, length - value:] = 1
    return stream


def stream_values(stream: np.ndarray) -> List[int]:
    """Lê o valor (contagem de uns) de cada fio de um stream."""
    return [int(v) for v in np.asarray(stream).sum(axis=1)]


# ---------------------------------------------------------------------------
# Construção e arquivos
# ---------------------------------------------------------------------------

def gen_bitonic(n: int) -> SortingNetwork:
    """
    Gera o ordenador bitônico de Batcher com n fios.

    As etapas que no desenho clássico invertem a direção são escritas como
    "flip" (i, fim_do_bloco - i) seguido de meios-limpadores, de modo que toda
    unidade mantém o min no fio de cima.

    Args:
        n: Potência de dois entre 2 e 64

    Returns:
        Rede com (n/2)·L·(L+1)/2 unidades, L = log2(n)

    Raises:
        ToolkitError: Se n não for potência de dois no intervalo
    """
    if n < 2 or n > 64 or n & (n - 1):
        raise ToolkitError(f"gen_bitonic exige n potência de dois entre 2 e 64, recebido {n}")

    units: List[CompareSwap] = []
    block = 2
    while block <= n:
        for start in range(0, n, block):
            for offset in range(block // 2):
                units.append(CompareSwap(start + offset, start + block - 1 - offset))
        half = block // 4
        while half >= 1:
            for start in range(0, n, 2 * half):
                for offset in range(half):
                    units.append(CompareSwap(start + offset, start + offset + half))
            half //= 2
        block *= 2

    return SortingNetwork(n=n, units=tuple(units), origin=Origin.BITONIC, validated=True)


def is_index(text: str) -> bool:
    """Inteiro decimal não negativo escrito só com dígitos ASCII."""
    return text.isascii() and text.isdigit()


def _parse_header(line: str) -> Optional[int]:
    parts = line.replace("=", " ").split()
    if len(parts) == 2 and parts[0] == "n" and is_index(parts[1]):
        return int(parts[1])
    return None


def load_network(text: str, origin: Optional[Origin] = None) -> SortingNetwork:
    """
    Interpreta um arquivo de rede.

    Formato: linhas '#' são comentários; a primeira linha útil é `n <largura>`;
    cada linha seguinte é `<i> <j>` com i < j, na ordem de execução. Um
    comentário `# origin: <procedência>` define a origem quando `origin` é None.

    Args:
        text: Conteúdo do arquivo
        origin: Procedência a atribuir (se None, usa o comentário ou loaded-custom)

    Returns:
        SortingNetwork com as unidades na ordem do arquivo

    Raises:
        NetworkParseError: Linha malformada, i >= j, índice >= n ou lista vazia
    """
    n: Optional[int] = None
    declared: Optional[Origin] = None
    units: List[CompareSwap] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("origin:"):
                value = body.split(":", 1)[1].strip()
                try:
                    declared = Origin(value)
                except ValueError:
                    raise NetworkParseError("origem desconhecida", lineno, raw)
            continue
        if n is None:
            n = _parse_header(line)
            if n is None:
                raise NetworkParseError("cabeçalho 'n <largura>' esperado", lineno, raw)
            if n < 1:
                raise NetworkParseError("largura deve ser positiva", lineno, raw)
            continue

        parts = line.split()
        if len(parts) != 2 or not all(is_index(p) for p in parts):
            raise NetworkParseError("unidade deve ser '<i> <j>'", lineno, raw)
        i, j = int(parts[0]), int(parts[1])
        if i >= j:
            raise NetworkParseError("unidade exige i < j", lineno, raw)
        if j >= n:
            raise NetworkParseError(f"índice fora da rede de {n} fios", lineno, raw)
        units.append(CompareSwap(i, j))

    if n is None:
        raise NetworkParseError("arquivo vazio")
    if not units:
        raise NetworkParseError("rede sem unidades")

    return SortingNetwork(n=n, units=tuple(units), origin=origin or declared or Origin.CUSTOM)


def dump_network(net: SortingNetwork) -> str:
    """Serialização estável byte a byte de uma rede."""
    lines = [f"# origin: {net.origin.value}", f"n {net.n}"]
    lines.extend(f"{u.i} {u.j}" for u in net.units)
    return "\n".join(lines) + "\n"


def load_bundled(n: int) -> SortingNetwork:
    """
    Carrega o ordenador empacotado com o toolkit para n fios.

    Args:
        n: Uma das larguras em BUNDLED_SIZES

    Returns:
        Rede com a origem declarada no arquivo (loaded-optimal para as
        redes mínimas ou melhores conhecidas, loaded-custom para as compostas),
        marcada como validada
    """
    if n not in BUNDLED_SIZES:
        raise ToolkitError(f"Não há ordenador empacotado para n={n} (disponíveis: {BUNDLED_SIZES})")
    path = NETWORKS_DIR / f"sorter_{n}.net"
    net = load_network(path.read_text(encoding="utf-8"))
    return replace(net, validated=True)


# ---------------------------------------------------------------------------
# Avaliação
# ---------------------------------------------------------------------------

def _apply_units(units: Iterable[CompareSwap], state: np.ndarray) -> np.ndarray:
    for unit in units:
        low = state[unit.i] & state[unit.j]
        high = state[unit.i] | state[unit.j]
        state[unit.i] = low
        state[unit.j] = high
    return state


def eval_bits(net: SortingNetwork, vec: BitsLike) -> np.ndarray:
    """
    Avalia a rede sobre um BitVector (ou um lote de vetores em colunas).

    Args:
        net: Rede a avaliar
        vec: Vetor de n bits, ou array (n, m) com m vetores

    Returns:
        Saída com o mesmo formato da entrada

    Raises:
        WidthMismatchError: Se a largura não for net.n
    """
    state = bits(vec).astype(bool)
    if state.ndim == 0 or state.shape[0] != net.n:
        width = state.shape[0] if state.ndim else 0
        raise WidthMismatchError(f"Entrada com {width} fios para rede de {net.n} fios")
    return _apply_units(net.units, state).astype(np.uint8)


def eval_temporal(net: SortingNetwork, stream: Union[Sequence[BitsLike], np.ndarray]) -> np.ndarray:
    """Avalia a rede ciclo a ciclo sobre um TemporalStream (n x L)."""
    return eval_bits(net, as_stream(stream))


def all_binary_inputs(n: int) -> np.ndarray:
    """Todos os 2^n vetores de n bits, um por coluna (fio w = bit w do índice)."""
    codes = np.arange(1 << n, dtype=np.int64)
    inputs = np.empty((n, codes.size), dtype=np.uint8)
    for wire in range(n):
        inputs[wire] = (codes >> wire) & 1
    return inputs


def _structured_inputs(n: int) -> np.ndarray:
    single_one = np.eye(n, dtype=np.uint8)
    single_zero = 1 - single_one
    return np.hstack([single_one, single_zero])


def validate_sorter(
    net: SortingNetwork,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
) -> ValidationReport:
    """
    Verifica a rede pelo princípio zero-um.

    Para n <= exhaustive_limit testa todos os 2^n vetores binários; acima
    disso testa os padrões com um único 1 e com um único 0 mais `budget`
    vetores aleatórios (semente fixa).

    Args:
        net: Rede a verificar
        budget: Número de vetores aleatórios para redes grandes
        seed: Semente do gerador aleatório
        exhaustive_limit: Maior n verificado exaustivamente

    Returns:
        ValidationReport com o primeiro contraexemplo, se houver
    """
    exhaustive = net.n <= exhaustive_limit
    if exhaustive:
        inputs = all_binary_inputs(net.n)
    else:
        rng = np.random.default_rng(seed)
        random_inputs = (rng.random((net.n, budget)) < 0.5).astype(np.uint8)
        inputs = np.hstack([_structured_inputs(net.n), random_inputs])

    outputs = eval_bits(net, inputs)
    unsorted = np.any(outputs[:-1] > outputs[1:], axis=0)
    checked = int(inputs.shape[1])

    if not unsorted.any():
        logger.debug("Rede de %d fios válida (%d vetores)", net.n, checked)
        return ValidationReport(passed=True, checked=checked, exhaustive=exhaustive)

    column = int(np.argmax(unsorted))
    logger.debug("Rede de %d fios falhou no vetor %d", net.n, column)
    return ValidationReport(
        passed=False,
        checked=checked,
        exhaustive=exhaustive,
        counterexample=format_bits(inputs[:, column]),
        output=format_bits(outputs[:, column]),
    )


def mark_validated(net: SortingNetwork, report: ValidationReport) -> SortingNetwork:
    """Retorna a rede marcada como validada se o relatório passou."""
    if not report.passed:
        return net
    return replace(net, validated=True)
