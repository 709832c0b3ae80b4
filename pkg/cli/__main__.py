"""Allow `python -m cli`."""
from cli.main import cli

cli()
