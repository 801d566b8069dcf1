import sys

from mbnetsim.cli import main

sys.exit(main())
