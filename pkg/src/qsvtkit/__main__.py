import sys

from qsvtkit.cli import main

sys.exit(main())
