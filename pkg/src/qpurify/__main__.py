import sys

from qpurify.cli import main

sys.exit(main())
