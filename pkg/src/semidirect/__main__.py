import sys

from semidirect.cli import main

sys.exit(main())
