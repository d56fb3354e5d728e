# noqa: D100
import sys

from htgnn.cli import main

sys.exit(main())
