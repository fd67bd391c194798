#!/usr/bin/env python3
"""Protocol probe: records how the host called us.

The last argument is the output slot; every preceding argument is
written to it one per line, followed by the UEBER_INLANGS and
UEBER_OUTLANGS environment values.  Always exits 0.
"""

import os
import sys


def main(argv):
    out = argv[-1]
    with open(out, "w", encoding="utf-8") as fh:
        for arg in argv[:-1]:
            fh.write(arg + "\n")
        fh.write(os.environ.get("UEBER_INLANGS", "") + "\n")
        fh.write(os.environ.get("UEBER_OUTLANGS", "") + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
