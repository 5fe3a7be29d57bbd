"""Configuração do toolkit via variáveis de ambiente / arquivo .env."""

import os
from functools import lru_cache
from typing import Optional, Dict

from dotenv import load_dotenv
from pydantic import BaseModel, Field

from src.errors import ConfigurationError

# Variável de ambiente -> campo do Settings
ENV_FIELDS: Dict[str, str] = {
    "TOOLKIT_LEDGER_PATH": "ledger_path",
    "TOOLKIT_EXHAUSTIVE_LIMIT": "exhaustive_limit",
    "TOOLKIT_VALIDATION_BUDGET": "validation_budget",
    "TOOLKIT_VALIDATION_SEED": "validation_seed",
    "TOOLKIT_WEIGHT_BITS": "weight_bits",
    "TOOLKIT_WINDOW": "window",
    "TOOLKIT_PULSE": "pulse",
    "TOOLKIT_ACC_BITS": "acc_bits",
}


class Settings(BaseModel):
    """Parâmetros globais do toolkit."""

    ledger_path: str = "data/runs.db"
    exhaustive_limit: int = Field(default=20, ge=1, le=24)
    validation_budget: int = Field(default=10000, ge=0)
    validation_seed: int = Field(default=0, ge=0)
    weight_bits: int = Field(default=3, ge=1, le=8)
    window: int = Field(default=8, ge=1)
    pulse: int = Field(default=8, ge=1)
    acc_bits: int = Field(default=5, ge=1, le=32)

    model_config = {"frozen": True}


def settings_from_env(environ: Optional[Dict[str, str]] = None) -> Settings:
    """
    Monta o Settings a partir das variáveis de ambiente.

    Args:
        environ: Mapeamento de variáveis (se None, usa os.environ)

    Returns:
        Settings validado

    Raises:
        ConfigurationError: Se alguma variável tiver valor inválido
    """
    if environ is None:
        environ = dict(os.environ)

    values = {}
    for env_name, field in ENV_FIELDS.items():
        raw = environ.get(env_name)
        if raw is None or raw == "":
            continue
        if field == "ledger_path":
            values[field] = raw
            continue
        try:
            values[field] = int(raw)
        except ValueError:
            raise ConfigurationError(f"{env_name} deve ser inteiro, recebido {raw!r}")

    try:
        return Settings(**values)
    except ValueError as e:
        raise ConfigurationError(f"Configuração inválida: {e}")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Carrega o .env (se existir) e retorna o Settings do processo."""
    load_dotenv()
    return settings_from_env()
