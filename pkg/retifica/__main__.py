import sys

from retifica.cli import main

sys.exit(main())
