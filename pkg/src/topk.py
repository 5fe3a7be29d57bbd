"""Poda de redes de ordenação em seletores top-k unários."""

import json
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Set, Tuple, Union

import numpy as np

from src.errors import SelectorParseError, ToolkitError, WidthMismatchError
from src.sortnet import BitsLike, CompareSwap, SortingNetwork, as_stream, bits, is_index

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopKSelector:
    """
    Seletor top-k obtido por poda de um ordenador.

    `mandatory` preserva a ordem da rede de origem; `half` guarda pares
    (posição em mandatory, fio morto). O fio morto de uma meia unidade é
    uma constante 0 e nenhuma unidade posterior o lê.
    """

    n: int
    k: int
    mandatory: Tuple[CompareSwap, ...]
    half: FrozenSet[Tuple[int, int]]
    source_total: int
    source_digest: str = ""
    provenance: Tuple[str, ...] = ()

    @property
    def output_wires(self) -> range:
        return range(self.n - self.k, self.n)


def _consumers(n: int, k: int) -> Set[int]:
    """Fios lidos depois da última unidade: os k de saída."""
    # Pares sentinela (n-k, n-k+1) ... (n-2, n-1); com k = 1 a lista é
    # vazia e o fio n-1 conta como sempre consumido.
    sentinels = [(w, w + 1) for w in range(n - k, n - 1)]
    consumed = {w for pair in sentinels for w in pair}
    consumed.add(n - 1)
    return consumed


def find_half_units(n: int, k: int, mandatory: Sequence[CompareSwap]) -> FrozenSet[Tuple[int, int]]:
    """
    Classifica meias unidades: a unidade na posição p é meia no fio x se
    nenhuma tupla depois de p (incluindo as sentinelas) referencia x.
    """
    referenced = _consumers(n, k)
    half = set()
    for position in range(len(mandatory) - 1, -1, -1):
        unit = mandatory[position]
        for wire in unit.wires:
            if wire not in referenced:
                half.add((position, wire))
        referenced.update(unit.wires)
    return frozenset(half)


def prune_topk(net: SortingNetwork, k: int) -> TopKSelector:
    """
    Poda um ordenador em um seletor top-k.

    Passo para trás: M começa com os fios n-k..n-1; uma unidade é mantida se
    toca M, e então o outro fio entra em M. Passo para frente: marca as meias
    unidades (ver find_half_units).

    Args:
        net: Ordenador de origem
        k: Número de saídas, 1 <= k <= n

    Returns:
        TopKSelector com unidades obrigatórias e meias unidades

    Raises:
        ToolkitError: Se k estiver fora do intervalo
    """
    if k < 1 or k > net.n:
        raise ToolkitError(f"k deve estar entre 1 e {net.n}, recebido {k}")

    provenance = [f"fonte: {net.origin.value} ({net.size} unidades)"]
    if not net.validated:
        logger.warning("Podando rede de %d fios não validada", net.n)
        provenance.append("aviso: rede de origem não validada")

    live = set(range(net.n - k, net.n))
    kept: List[CompareSwap] = []
    for unit in reversed(net.units):
        if unit.i in live or unit.j in live:
            kept.append(unit)
            live.update(unit.wires)
    kept.reverse()

    mandatory = tuple(kept)
    return TopKSelector(
        n=net.n,
        k=k,
        mandatory=mandatory,
        half=find_half_units(net.n, k, mandatory),
        source_total=net.size,
        source_digest=net.digest,
        provenance=tuple(provenance),
    )


def eval_topk(sel: TopKSelector, vec: BitsLike, dead_value: int = 0) -> np.ndarray:
    """
    Avalia o seletor e retorna os k fios de saída (de baixo).

    Args:
        sel: Seletor
        vec: Vetor de n bits, ou array (n, m)
        dead_value: Valor forçado nos fios mortos das meias unidades

    Returns:
        Array com k linhas

    Raises:
        WidthMismatchError: Se a largura não for sel.n
    """
    state = bits(vec).astype(bool)
    if state.ndim == 0 or state.shape[0] != sel.n:
        width = state.shape[0] if state.ndim else 0
        raise WidthMismatchError(f"Entrada com {width} fios para seletor de {sel.n} fios")

    dead = dict(sel.half)
    constant = np.full(state.shape[1:], bool(dead_value))
    for position, unit in enumerate(sel.mandatory):
        low = state[unit.i] & state[unit.j]
        high = state[unit.i] | state[unit.j]
        dead_wire = dead.get(position)
        state[unit.i] = constant if dead_wire == unit.i else low
        state[unit.j] = constant if dead_wire == unit.j else high

    return state[sel.n - sel.k:].astype(np.uint8)


def eval_topk_temporal(sel: TopKSelector, stream: Union[Sequence[BitsLike], np.ndarray]) -> np.ndarray:
    """Avalia o seletor ciclo a ciclo; retorna um stream de k fios."""
    return eval_topk(sel, as_stream(stream))


def selector_counts(sel: TopKSelector) -> Tuple[int, int, int]:
    """Contagens (total da origem, obrigatórias, meias)."""
    return (sel.source_total, len(sel.mandatory), len(sel.half))


def counts_json(sel: TopKSelector) -> str:
    total, mandatory, half = selector_counts(sel)
    return json.dumps({"total": total, "mandatory": mandatory, "half": half}, sort_keys=True)


def sweep_counts(net: SortingNetwork, ks: Iterable[int]) -> List[Tuple[int, int, int, int]]:
    """Linhas (k, total, obrigatórias, meias) para vários k."""
    rows = []
    for k in ks:
        total, mandatory, half = selector_counts(prune_topk(net, k))
        rows.append((k, total, mandatory, half))
    return rows


def dump_selector(sel: TopKSelector) -> str:
    """
    Serializa o seletor no formato de rede estendido.

    Cabeçalhos `n`, `k` e `total`; unidades meias ganham o sufixo `H:<fio>`.
    """
    lines = ["# topk-selector", f"n {sel.n}", f"k {sel.k}", f"total {sel.source_total}"]
    if sel.source_digest:
        lines.insert(1, f"# source: {sel.source_digest}")
    dead = dict(sel.half)
    for position, unit in enumerate(sel.mandatory):
        line = f"{unit.i} {unit.j}"
        if position in dead:
            line += f" H:{dead[position]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def load_selector(text: str) -> TopKSelector:
    """
    Interpreta um arquivo de seletor e confere as anotações de meia unidade.

    Raises:
        SelectorParseError: Cabeçalho ausente, unidade malformada ou anotação
            `H:` diferente da classificação recalculada
    """
    header = {}
    digest = ""
    units: List[CompareSwap] = []
    annotated = set()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("source:"):
                digest = body.split(":", 1)[1].strip()
            continue

        parts = line.split()
        if len(header) < 3:
            expected = ("n", "k", "total")[len(header)]
            if len(parts) != 2 or parts[0] != expected or not is_index(parts[1]):
                raise SelectorParseError(f"cabeçalho '{expected} <valor>' esperado", lineno, raw)
            header[expected] = int(parts[1])
            continue

        if len(parts) not in (2, 3) or not (is_index(parts[0]) and is_index(parts[1])):
            raise SelectorParseError("unidade deve ser '<i> <j> [H:<fio>]'", lineno, raw)
        i, j = int(parts[0]), int(parts[1])
        if i >= j or j >= header["n"]:
            raise SelectorParseError("unidade fora da rede ou com i >= j", lineno, raw)
        if len(parts) == 3:
            tag = parts[2]
            if not tag.startswith("H:") or not is_index(tag[2:]) or int(tag[2:]) not in (i, j):
                raise SelectorParseError("anotação de meia unidade inválida", lineno, raw)
            annotated.add((len(units), int(tag[2:])))
        units.append(CompareSwap(i, j))

    if len(header) < 3:
        raise SelectorParseError("cabeçalho incompleto")
    n, k = header["n"], header["k"]
    if k < 1 or k > n:
        raise SelectorParseError(f"k fora do intervalo 1..{n}")

    mandatory = tuple(units)
    half = find_half_units(n, k, mandatory)
    if half != frozenset(annotated):
        raise SelectorParseError("anotações H: não correspondem às meias unidades")

    return TopKSelector(
        n=n,
        k=k,
        mandatory=mandatory,
        half=half,
        source_total=header["total"],
        source_digest=digest,
        provenance=("carregado de arquivo",),
    )
