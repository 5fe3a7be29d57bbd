"""Simulação ciclo a ciclo de neurônios SRM0-RNL com dendritos intercambiáveis."""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.cache import SelectorCache
from src.errors import ConfigurationError, ToolkitError, WidthMismatchError
from src.sortnet import (
    BUNDLED_SIZES,
    SortingNetwork,
    bits,
    eval_bits,
    gen_bitonic,
    load_bundled,
    load_network,
)
from src.topk import eval_topk

logger = logging.getLogger(__name__)

# Seletores compartilhados entre simulações; a poda é pura.
_selectors = SelectorCache()


class DendriteKind(str, Enum):
    """Implementações de dendrito."""

    PC_CONVENTIONAL = "pc-conventional"
    PC_COMPACT = "pc-compact"
    SORTING_PC = "sorting-pc"
    TOPK_PC = "topk-pc"

    @property
    def needs_k(self) -> bool:
        return self in (DendriteKind.SORTING_PC, DendriteKind.TOPK_PC)


class SpikeVolley(BaseModel):
    """Tempos de spike por entrada; None representa ausência de spike (valor infinito)."""

    model_config = ConfigDict(frozen=True)

    spikes: Tuple[Optional[int], ...]

    @model_validator(mode="after")
    def _check_times(self):
        for index, t in enumerate(self.spikes):
            if t is not None and t < 0:
                raise ValueError(f"Spike da entrada {index} em ciclo negativo ({t})")
        return self

    @property
    def n(self) -> int:
        return len(self.spikes)

    @classmethod
    def from_events(cls, n: int, events: Sequence[Tuple[int, int]]) -> "SpikeVolley":
        """
        Monta um volley a partir de pares (entrada, ciclo).

        Raises:
            ToolkitError: Entrada fora do intervalo ou repetida
        """
        spikes: List[Optional[int]] = [None] * n
        for index, t in events:
            if index < 0 or index >= n:
                raise ToolkitError(f"Entrada {index} fora do intervalo 0..{n - 1}")
            if spikes[index] is not None:
                raise ToolkitError(f"Entrada {index} com mais de um spike no volley")
            spikes[index] = t
        return cls(spikes=tuple(spikes))

    @classmethod
    def silent(cls, n: int) -> "SpikeVolley":
        return cls(spikes=(None,) * n)

    def events(self) -> List[Tuple[int, int]]:
        return [(i, t) for i, t in enumerate(self.spikes) if t is not None]


class NeuronConfig(BaseModel):
    """
    Configuração de um neurônio.

    `network` escolhe o ordenador dos dendritos sorting-pc/topk-pc:
    "auto" (bitônico para sorting-pc, empacotado para topk-pc), "bitonic",
    "bundled" ou o caminho de um arquivo de rede.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    weights: Tuple[int, ...]
    threshold: int = Field(ge=0)
    kind: DendriteKind = DendriteKind.PC_COMPACT
    k: Optional[int] = None
    window: int = Field(default=8, ge=1)
    pulse: int = Field(default=8, ge=1)
    acc_bits: int = Field(default=5, ge=1, le=32)
    weight_bits: int = Field(default=3, ge=1, le=8)
    strict_threshold: bool = False
    network: str = "auto"

    @model_validator(mode="after")
    def _check(self):
        if len(self.weights) != self.n:
            raise ValueError(f"{len(self.weights)} pesos para {self.n} entradas")
        for w in self.weights:
            if w < 0 or w > self.w_max:
                raise ValueError(f"Peso {w} fora do intervalo 0..{self.w_max}")
        if self.threshold >= 2 ** self.acc_bits:
            raise ValueError(
                f"Limiar {self.threshold} inatingível com acumulador de {self.acc_bits} bits"
            )
        if self.k is not None and not 1 <= self.k <= self.n:
            raise ValueError(f"k deve estar entre 1 e {self.n}")
        if self.kind.needs_k and self.k is None:
            raise ValueError(f"Dendrito {self.kind.value} exige k")
        return self

    @property
    def w_max(self) -> int:
        return 2 ** self.weight_bits - 1

    @property
    def cycles(self) -> int:
        """Ciclos simulados: t = 0 ... G + w_max - 1."""
        return self.window + self.w_max

    @property
    def capacity(self) -> int:
        return 2 ** self.acc_bits - 1


class SimResult(BaseModel):
    """Registro observável de uma simulação."""

    fire_time: Optional[int]
    trace: List[int]
    potential: List[int]
    increments: List[int]
    axon: List[int]
    dropped_spikes: int = 0
    truncated_cycles: int = 0
    max_active: int = 0


@dataclass
class VolleyComparison:
    index: int
    base_fire: Optional[int]
    alt_fire: Optional[int]
    fire_match: bool
    trace_match: bool
    max_active: int
    dropped_spikes: int
    alt_not_above: bool
    alt_not_earlier: bool


@dataclass
class EquivalenceReport:
    """Comparação volley a volley entre duas configurações."""

    k: int
    volleys: List[VolleyComparison] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.volleys)

    @property
    def match_rate(self) -> float:
        if not self.volleys:
            return 1.0
        return sum(v.fire_match for v in self.volleys) / len(self.volleys)

    @property
    def trace_match_rate(self) -> float:
        if not self.volleys:
            return 1.0
        return sum(v.trace_match for v in self.volleys) / len(self.volleys)

    @property
    def sparse_volleys(self) -> int:
        return sum(v.max_active <= self.k for v in self.volleys)

    @property
    def implication_holds(self) -> bool:
        """max de entradas ativas por ciclo <= k implica disparo e traço idênticos."""
        return all(v.fire_match and v.trace_match for v in self.volleys if v.max_active <= self.k)

    @property
    def ordering_violations(self) -> int:
        return sum(not (v.alt_not_above and v.alt_not_earlier) for v in self.volleys)

    def summary(self) -> Dict[str, object]:
        return {
            "volleys": self.total,
            "k": self.k,
            "match_rate": round(self.match_rate, 6),
            "trace_match_rate": round(self.trace_match_rate, 6),
            "sparse_volleys": self.sparse_volleys,
            "implication_holds": self.implication_holds,
            "ordering_violations": self.ordering_violations,
            "dropped_spikes": sum(v.dropped_spikes for v in self.volleys),
        }


# ---------------------------------------------------------------------------
# Sinapse
# ---------------------------------------------------------------------------

def rnl_response(w: int, t: int) -> int:
    """
    Função de resposta ramp-no-leak.

    Args:
        w: Peso sináptico, w >= 0
        t: Deslocamento em ciclos desde o spike (pode ser negativo)

    Returns:
        0 se t < 0; t+1 se 0 <= t < w; w se t >= w
    """
    if w < 0:
        raise ToolkitError(f"Peso negativo: {w}")
    if t < 0:
        return 0
    if t < w:
        return t + 1
    return w


def synapse_pulse(w: int, spike: Optional[int], t: int) -> int:
    """Bit da sinapse no ciclo t: 1 sse spike <= t < spike + w."""
    if spike is None:
        return 0
    return rnl_response(w, t - spike) - rnl_response(w, t - 1 - spike)


def pulse_matrix(weights: Sequence[int], volleys: Sequence[SpikeVolley], cycles: int) -> np.ndarray:
    """
    Pulsos das sinapses para vários volleys.

    Returns:
        Array uint8 (n, volleys, ciclos)
    """
    n = len(weights)
    times = np.full((len(volleys), n), -1, dtype=np.int64)
    for row, volley in enumerate(volleys):
        if volley.n != n:
            raise WidthMismatchError(f"Volley com {volley.n} entradas para neurônio de {n}")
        for index, t in volley.events():
            times[row, index] = t

    t = np.arange(cycles, dtype=np.int64)[None, None, :]
    start = times[:, :, None]
    width = np.asarray(weights, dtype=np.int64)[None, :, None]
    active = (start >= 0) & (t >= start) & (t < start + width)
    return np.ascontiguousarray(active.transpose(1, 0, 2)).astype(np.uint8)


# ---------------------------------------------------------------------------
# Dendrito
# ---------------------------------------------------------------------------

def default_network(kind: DendriteKind, n: int, choice: str = "auto") -> SortingNetwork:
    """
    Ordenador usado pelos dendritos sorting-pc e topk-pc.

    Raises:
        ConfigurationError: Se não houver ordenador para n
    """
    if choice == "auto":
        if kind == DendriteKind.TOPK_PC and n in BUNDLED_SIZES:
            choice = "bundled"
        else:
            choice = "bitonic"
    try:
        if choice == "bitonic":
            return gen_bitonic(n)
        if choice == "bundled":
            return load_bundled(n)
        net = load_network(Path(choice).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigurationError(f"Não foi possível ler a rede {choice!r}: {e}")
    except ToolkitError as e:
        raise ConfigurationError(f"Sem ordenador para n={n}: {e}")
    if net.n != n:
        raise ConfigurationError(f"Rede {choice!r} tem {net.n} fios, neurônio tem {n}")
    return net


def dendrite_increments(
    kind: DendriteKind,
    k: Optional[int],
    pulses: np.ndarray,
    network: Optional[SortingNetwork] = None,
) -> np.ndarray:
    """
    Incremento do dendrito para cada vetor de pulsos (eixo 0 = entradas).

    Args:
        kind: Tipo de dendrito
        k: Saídas do top-k / ordenador (sorting-pc e topk-pc)
        pulses: Array (n, ...) de bits
        network: Ordenador de origem (se None, usa default_network)

    Returns:
        Array com o formato de pulses sem o eixo 0
    """
    kind = DendriteKind(kind)
    pulses = bits(pulses)
    n = pulses.shape[0]
    if kind in (DendriteKind.PC_CONVENTIONAL, DendriteKind.PC_COMPACT):
        return pulses.sum(axis=0, dtype=np.int64)
    if k is None:
        raise ConfigurationError(f"Dendrito {kind.value} exige k")
    if network is None:
        network = default_network(kind, n)
    if network.n != n:
        raise WidthMismatchError(f"Pulsos com {n} fios para rede de {network.n} fios")

    flat = pulses.reshape(n, -1)
    if kind == DendriteKind.SORTING_PC:
        selected = eval_bits(network, flat)[n - k:]
    else:
        selected = eval_topk(_selectors.get_or_prune(network, k), flat)
    return selected.sum(axis=0, dtype=np.int64).reshape(pulses.shape[1:])


def dendrite_increment(
    kind: DendriteKind,
    k: Optional[int],
    pulses,
    network: Optional[SortingNetwork] = None,
) -> int:
    """Incremento do dendrito para um único vetor de n pulsos."""
    vec = bits(pulses)
    if vec.ndim != 1:
        raise WidthMismatchError("dendrite_increment espera um vetor de pulsos")
    return int(dendrite_increments(kind, k, vec, network))


# ---------------------------------------------------------------------------
# Neurônio
# ---------------------------------------------------------------------------

def _network_for(cfg: NeuronConfig) -> Optional[SortingNetwork]:
    if not cfg.kind.needs_k:
        return None
    return default_network(cfg.kind, cfg.n, cfg.network)


def simulate_many(cfg: NeuronConfig, volleys: Sequence[SpikeVolley]) -> List[SimResult]:
    """
    Simula um volley por janela de computação, para vários volleys.

    A cada ciclo: pulsos das sinapses, incremento do dendrito, soma saturada
    no registrador de B bits e teste do limiar. Após o disparo o registrador
    para de acumular até o fim da janela; o axônio fica em 1 por P ciclos.

    Args:
        cfg: Configuração do neurônio
        volleys: Volleys independentes

    Returns:
        Um SimResult por volley, na mesma ordem

    Raises:
        ConfigurationError: Spike fora da janela de computação
    """
    for volley in volleys:
        for index, t in volley.events():
            if t >= cfg.window:
                raise ConfigurationError(
                    f"Spike da entrada {index} no ciclo {t}, fora da janela de {cfg.window}"
                )
    if not volleys:
        return []

    cycles = cfg.cycles
    pulses = pulse_matrix(cfg.weights, volleys, cycles)
    active = pulses.sum(axis=0, dtype=np.int64)
    increments = dendrite_increments(cfg.kind, cfg.k, pulses, _network_for(cfg))
    excess = np.maximum(active - cfg.k, 0) if cfg.kind.needs_k else np.zeros_like(active)

    results = []
    for row in range(len(volleys)):
        register = 0
        potential = 0
        fire_time: Optional[int] = None
        trace: List[int] = []
        potentials: List[int] = []
        for t in range(cycles):
            inc = int(increments[row, t])
            potential = min(potential + inc, cfg.capacity)
            if fire_time is None:
                register = min(register + inc, cfg.capacity)
                reached = register > cfg.threshold if cfg.strict_threshold else register >= cfg.threshold
                if reached:
                    fire_time = t
            trace.append(register)
            potentials.append(potential)

        axon = [0] * (cycles + cfg.pulse)
        if fire_time is not None:
            for t in range(fire_time, fire_time + cfg.pulse):
                axon[t] = 1

        results.append(SimResult(
            fire_time=fire_time,
            trace=trace,
            potential=potentials,
            increments=[int(v) for v in increments[row]],
            axon=axon,
            dropped_spikes=int(excess[row].sum()),
            truncated_cycles=int((excess[row] > 0).sum()),
            max_active=int(active[row].max()),
        ))
    return results


def simulate_neuron(cfg: NeuronConfig, volley: SpikeVolley) -> SimResult:
    """Simula um único volley (ver simulate_many)."""
    return simulate_many(cfg, [volley])[0]


def result_json(result: SimResult) -> str:
    """Exporta o resultado como JSON determinístico."""
    return json.dumps(result.model_dump(), sort_keys=True)


_SHARED_FIELDS = ("n", "weights", "threshold", "window", "pulse", "acc_bits", "weight_bits", "strict_threshold")


def compare_designs(
    base: NeuronConfig,
    alt: NeuronConfig,
    volleys: Sequence[SpikeVolley],
) -> EquivalenceReport:
    """
    Compara duas configurações que diferem apenas no dendrito.

    Args:
        base: Configuração de referência (tipicamente pc-compact)
        alt: Configuração alternativa (tipicamente topk-pc)
        volleys: Volleys a simular nas duas

    Returns:
        EquivalenceReport por volley e agregado

    Raises:
        ConfigurationError: Se as configurações diferirem em outro campo
    """
    for name in _SHARED_FIELDS:
        if getattr(base, name) != getattr(alt, name):
            raise ConfigurationError(f"Configurações diferem em {name!r}")

    ks = [cfg.k for cfg in (base, alt) if cfg.kind.needs_k]
    k = min(ks) if ks else base.n

    base_results = simulate_many(base, volleys)
    alt_results = simulate_many(alt, volleys)

    report = EquivalenceReport(k=k)
    for index, (b, a) in enumerate(zip(base_results, alt_results)):
        alt_not_earlier = b.fire_time is None and a.fire_time is None or (
            b.fire_time is not None and (a.fire_time is None or a.fire_time >= b.fire_time)
        )
        report.volleys.append(VolleyComparison(
            index=index,
            base_fire=b.fire_time,
            alt_fire=a.fire_time,
            fire_match=a.fire_time == b.fire_time,
            trace_match=a.trace == b.trace and a.potential == b.potential,
            max_active=b.max_active,
            dropped_spikes=max(a.dropped_spikes, b.dropped_spikes),
            alt_not_above=all(x <= y for x, y in zip(a.potential, b.potential)),
            alt_not_earlier=alt_not_earlier,
        ))
    logger.info(
        "Comparação %s x %s: %d volleys, taxa de acerto %.4f",
        base.kind.value, alt.kind.value, report.total, report.match_rate,
    )
    return report
