"""Manifesto de execução e histórico de execuções em SQLite."""

import hashlib
import json
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from src import __version__


def file_digest(path) -> str:
    """SHA-256 do conteúdo de um arquivo."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class RunManifest(BaseModel):
    """
    Tudo o que determina as saídas de um comando.

    Sem carimbo de tempo: o mesmo manifesto produz arquivos idênticos byte a
    byte. `outputs` guarda nomes relativos ao diretório de saída.
    """

    model_config = ConfigDict(frozen=True)

    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    input_digests: Dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str = __version__
    outputs: List[str] = Field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n"

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def write(self, out_dir) -> Path:
        """Grava manifest.json em `out_dir`."""
        path = Path(out_dir) / "manifest.json"
        path.write_text(self.to_json(), encoding="utf-8")
        return path


class RunLedger:
    """Histórico das execuções do toolkit persistido em SQLite."""

    def __init__(self, db_path: str = "data/runs.db"):
        """
        Inicializa o histórico.

        Args:
            db_path: Caminho para o banco de dados SQLite
        """
        self.db_path = db_path

        Path(db_path).parent.mkdir(parents=True, exist_ok=True)
        self._init_database()

    def _init_database(self):
        """Cria a tabela de execuções se não existir."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                timestamp TEXT NOT NULL,
                command TEXT NOT NULL,
                exit_code INTEGER NOT NULL,
                manifest_digest TEXT NOT NULL,
                manifest TEXT NOT NULL,
                tool_version TEXT
            )
        """)
        conn.commit()
        conn.close()

    def log_run(self, manifest: RunManifest, exit_code: int, timestamp: Optional[str] = None):
        """
        Registra uma execução.

        Args:
            manifest: Manifesto da execução
            exit_code: Código de saída do comando
            timestamp: Data ISO (se None, usa o instante atual)
        """
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()
        cursor.execute("""
            INSERT INTO runs
            (timestamp, command, exit_code, manifest_digest, manifest, tool_version)
            VALUES (?, ?, ?, ?, ?, ?)
        """, (
            timestamp or datetime.now().isoformat(),
            manifest.command,
            exit_code,
            manifest.digest,
            manifest.to_json(),
            manifest.tool_version,
        ))
        conn.commit()
        conn.close()

    def get_report(self, limit: int = 100, start_date: Optional[str] = None,
                   end_date: Optional[str] = None) -> Dict[str, Any]:
        """
        Gera relatório agregado das execuções.

        Args:
            limit: Número máximo de registros considerados
            start_date: Data inicial (ISO format)
            end_date: Data final (ISO format)

        Returns:
            Dicionário com totais, contagem por comando e execuções recentes
        """
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        query = "SELECT timestamp, command, exit_code, manifest_digest FROM runs WHERE 1=1"
        params: List[Any] = []
        if start_date:
            query += " AND timestamp >= ?"
            params.append(start_date)
        if end_date:
            query += " AND timestamp <= ?"
            params.append(end_date)
        query += " ORDER BY timestamp DESC, id DESC LIMIT ?"
        params.append(limit)

        cursor.execute(query, params)
        rows = cursor.fetchall()
        conn.close()

        by_command: Dict[str, Dict[str, int]] = {}
        for _, command, exit_code, _ in rows:
            stats = by_command.setdefault(command, {"runs": 0, "failures": 0})
            stats["runs"] += 1
            if exit_code != 0:
                stats["failures"] += 1

        return {
            "total_runs": len(rows),
            "failures": sum(1 for row in rows if row[2] != 0),
            "by_command": dict(sorted(by_command.items())),
            "recent_runs": [
                {"timestamp": row[0], "command": row[1], "exit_code": row[2], "manifest_digest": row[3]}
                for row in rows[:10]
            ],
        }
