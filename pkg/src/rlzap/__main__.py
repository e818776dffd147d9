import sys

from rlzap.cli import main

sys.exit(main())
