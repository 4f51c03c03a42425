import sys

from dmtg.runner.cli import main

sys.exit(main())
