"""Script para exibir relatório do histórico de execuções."""

import os
import sys
from pathlib import Path
from datetime import datetime, timedelta

# Adicionar diretório raiz ao path
root_dir = Path(__file__).parent.parent
sys.path.insert(0, str(root_dir))

from src.config import get_settings
from src.ledger import RunLedger


def format_number(num: int) -> str:
    """Formata número com separador de milhares."""
    return f"{num:,}".replace(",", ".")


def main():
    """Função principal para exibir relatório."""
    print("=" * 80)
    print("Relatório de Execuções do Toolkit")
    print("=" * 80)
    print()

    db_path = get_settings().ledger_path
    if not os.path.exists(db_path):
        print("❌ Nenhum dado encontrado. Execute algum comando primeiro.")
        return

    ledger = RunLedger(db_path=db_path)
    report = ledger.get_report(limit=1000)

    if report["total_runs"] == 0:
        print("📭 Nenhuma execução registrada ainda.")
        return

    print("📊 Estatísticas Gerais:")
    print(f"   Total de execuções: {format_number(report['total_runs'])}")
    print(f"   Com falha (código != 0): {format_number(report['failures'])}")
    print()

    print("🧰 Por comando:")
    for command, stats in report["by_command"].items():
        print(f"   {command:<10} {format_number(stats['runs']):>7} execuções, "
              f"{format_number(stats['failures'])} falhas")
    print()

    if report["recent_runs"]:
        print("📝 Últimas 10 Execuções:")
        print("-" * 80)
        for i, run in enumerate(report["recent_runs"], 1):
            status = "✓" if run["exit_code"] == 0 else "❌"
            print(f"{i:2d}. [{run['timestamp']}] {status} {run['command']} "
                  f"(manifesto {run['manifest_digest'][:12]})")
        print()

    print("📅 Execuções dos Últimos 7 Dias:")
    seven_days_ago = (datetime.now() - timedelta(days=7)).isoformat()
    weekly_report = ledger.get_report(start_date=seven_days_ago)
    print(f"   Execuções: {format_number(weekly_report['total_runs'])}")
    print(f"   Falhas: {format_number(weekly_report['failures'])}")
    print()

    print("=" * 80)


if __name__ == "__main__":
    main()
