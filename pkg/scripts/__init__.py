"""Scripts de linha de comando do toolkit."""

