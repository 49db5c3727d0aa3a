#!/usr/bin/env python
"""Command-line entry point for the pmlfsla pipeline commands."""
import os
import sys

# subcommands whose public spelling differs from the Python module name
ALIASES = {"inject-noise": "inject_noise"}


def main(argv=None):
    """Run a pipeline command."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'pmlfsla_project.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    argv = list(sys.argv if argv is None else argv)
    if len(argv) > 1:
        argv[1] = ALIASES.get(argv[1], argv[1])
    execute_from_command_line(argv)


if __name__ == '__main__':
    main()
