import sys

from netimmune.cli import main

sys.exit(main())
