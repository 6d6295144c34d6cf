import sys

from usperm.cli import main

sys.exit(main())
