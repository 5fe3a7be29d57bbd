"""Exceções do toolkit."""


class ToolkitError(ValueError):
    """Erro base para entradas inválidas (arquivos, parâmetros, configurações)."""


class NetworkParseError(ToolkitError):
    """Erro ao interpretar um arquivo de rede de ordenação."""

    def __init__(self, message: str, line: int = 0, text: str = ""):
        self.line = line
        self.text = text
        where = f"linha {line}" if line else "arquivo"
        detail = f" ({text!r})" if text else ""
        super().__init__(f"{where}: {message}{detail}")


class SelectorParseError(NetworkParseError):
    """Erro ao interpretar um arquivo de seletor top-k."""


class NetlistError(ToolkitError):
    """Netlist malformada ou estruturalmente inválida."""


class ConfigurationError(ToolkitError):
    """Configuração inválida (settings ou neurônio)."""


class WidthMismatchError(ToolkitError):
    """Largura de vetor ou comprimento de stream incompatível."""
