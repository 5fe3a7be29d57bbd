"""Cache em memória para seletores top-k já podados."""

import hashlib
import threading
from typing import Any, Dict, Optional

from src.sortnet import SortingNetwork
from src.topk import TopKSelector, prune_topk


class SelectorCache:
    """Cache de prune_topk indexado pelo digest da rede e por k."""

    def __init__(self, max_entries: int = 256):
        """
        Inicializa o cache.

        Args:
            max_entries: Número máximo de seletores guardados (default: 256)
        """
        self.cache: Dict[str, TopKSelector] = {}
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def _generate_key(self, net: SortingNetwork, k: int) -> str:
        """
        Gera chave única para a poda.

        Args:
            net: Rede de origem
            k: Número de saídas

        Returns:
            Hash MD5 da chave
        """
        key_string = f"{net.digest}|{k}"
        return hashlib.md5(key_string.encode()).hexdigest()

    def get(self, net: SortingNetwork, k: int) -> Optional[TopKSelector]:
        """Recupera o seletor do cache, se existir."""
        key = self._generate_key(net, k)
        with self._lock:
            selector = self.cache.get(key)
            if selector is None:
                self.misses += 1
            else:
                self.hits += 1
            return selector

    def set(self, net: SortingNetwork, k: int, selector: TopKSelector):
        """Armazena o seletor, descartando a entrada mais antiga se cheio."""
        key = self._generate_key(net, k)
        with self._lock:
            if key not in self.cache and len(self.cache) >= self.max_entries:
                oldest = next(iter(self.cache))
                del self.cache[oldest]
            self.cache[key] = selector

    def get_or_prune(self, net: SortingNetwork, k: int) -> TopKSelector:
        """Retorna o seletor em cache ou poda a rede e guarda o resultado."""
        selector = self.get(net, k)
        if selector is None:
            selector = prune_topk(net, k)
            self.set(net, k, selector)
        return selector

    def clear(self):
        """Limpa todo o cache."""
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def get_stats(self) -> Dict[str, Any]:
        """
        Retorna estatísticas do cache.

        Returns:
            Dicionário com estatísticas
        """
        return {
            "total_entries": len(self.cache),
            "max_entries": self.max_entries,
            "hits": self.hits,
            "misses": self.misses,
        }
