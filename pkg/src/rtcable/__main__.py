import sys

from rtcable.cli import main

sys.exit(main())
