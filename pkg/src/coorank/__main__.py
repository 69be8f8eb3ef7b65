import sys

from coorank.cli import main

sys.exit(main())
