import sys

from conelab.main import main

sys.exit(main())
