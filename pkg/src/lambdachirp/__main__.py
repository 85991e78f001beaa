import sys

from lambdachirp.cli import main

sys.exit(main())
