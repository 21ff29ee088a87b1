import sys

from latentgsa.main import main

sys.exit(main())
