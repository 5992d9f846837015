"""Allow running the CLI as ``python -m influsim``."""

from influsim.cli import main

raise SystemExit(main())
