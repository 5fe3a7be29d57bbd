"""Arquivos de volleys (JSON/CSV) e gerador determinístico de volleys."""

import csv
import io
import json
from typing import List, Optional, Sequence

import numpy as np

from src.errors import ToolkitError
from src.neuron import SpikeVolley
from src.sortnet import is_index

DISTRIBUTIONS = ("uniform", "early", "late")


def _events_from_objects(items, n: int, where: str) -> SpikeVolley:
    events = []
    for item in items:
        if not isinstance(item, dict) or "input" not in item or "t" not in item:
            raise ToolkitError(f"{where}: evento deve ser {{'input': i, 't': ciclo}}")
        try:
            events.append((int(item["input"]), int(item["t"])))
        except (TypeError, ValueError):
            raise ToolkitError(f"{where}: evento com valores não inteiros: {item!r}")
    return SpikeVolley.from_events(n, events)


def load_volleys(text: str, n: int) -> List[SpikeVolley]:
    """
    Lê volleys de JSON ou CSV.

    JSON: uma lista de eventos {"input": i, "t": ciclo} (um volley) ou uma
    lista dessas listas (vários volleys). CSV: linhas `input,t`, cabeçalho
    opcional; uma linha em branco separa volleys. Entradas ausentes nunca
    disparam.

    Args:
        text: Conteúdo do arquivo
        n: Número de entradas do neurônio

    Returns:
        Lista de SpikeVolley

    Raises:
        ToolkitError: Formato inválido, entrada fora do intervalo ou repetida
    """
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ToolkitError(f"JSON de volleys inválido: {e}")
        if not data:
            return [SpikeVolley.silent(n)]
        if all(isinstance(item, list) for item in data):
            return [_events_from_objects(items, n, f"volley {i}") for i, items in enumerate(data)]
        return [_events_from_objects(data, n, "volley 0")]

    volleys: List[SpikeVolley] = []
    events: List[tuple] = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            if events:
                volleys.append(SpikeVolley.from_events(n, events))
                events = []
            continue
        cells = [c.strip() for c in row]
        if cells == ["input", "t"]:
            continue
        if len(cells) != 2 or not all(is_index(c.lstrip("-")) for c in cells):
            raise ToolkitError(f"linha {lineno}: esperado 'input,t', recebido {row!r}")
        events.append((int(cells[0]), int(cells[1])))
    if events or not volleys:
        volleys.append(SpikeVolley.from_events(n, events))
    return volleys


def dump_volleys(volleys: Sequence[SpikeVolley]) -> str:
    """Exporta volleys como JSON (lista de listas de eventos)."""
    data = [[{"input": i, "t": t} for i, t in volley.events()] for volley in volleys]
    return json.dumps(data, sort_keys=True)


def generate_volleys(
    n: int,
    count: int,
    density: float,
    seed: int,
    window: int = 8,
    distribution: str = "uniform",
    max_spikes: Optional[int] = None,
) -> List[SpikeVolley]:
    """
    Gera volleys reprodutíveis para varreduras de esparsidade.

    Args:
        n: Número de entradas
        count: Número de volleys
        density: Probabilidade de cada entrada disparar
        seed: Semente (obrigatória)
        window: Janela de computação G; tempos em [0, G)
        distribution: "uniform", "early" (concentra perto de 0) ou "late"
        max_spikes: Limite de entradas com spike por volley

    Returns:
        Lista de SpikeVolley
    """
    if not 0.0 <= density <= 1.0:
        raise ToolkitError(f"Densidade deve estar em [0, 1], recebido {density}")
    if distribution not in DISTRIBUTIONS:
        raise ToolkitError(f"Distribuição desconhecida: {distribution!r}")

    rng = np.random.default_rng(seed)
    mask = rng.random((count, n)) < density
    if distribution == "uniform":
        times = rng.integers(0, window, size=(count, n))
    else:
        times = np.minimum(rng.geometric(0.5, size=(count, n)) - 1, window - 1)
        if distribution == "late":
            times = window - 1 - times

    if max_spikes is not None:
        priority = rng.random((count, n))
        priority[~mask] = np.inf
        rank = np.argsort(np.argsort(priority, axis=1, kind="stable"), axis=1, kind="stable")
        mask &= rank < max_spikes

    volleys = []
    for row in range(count):
        spikes = tuple(int(t) if m else None for t, m in zip(times[row], mask[row]))
        volleys.append(SpikeVolley(spikes=spikes))
    return volleys
