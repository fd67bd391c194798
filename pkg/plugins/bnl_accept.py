#!/usr/bin/env python3
"""Membership acceptor for binary-number text.

Called with one argument, the input file.  Exits 0 when the content
matches ``bits ('.' bits)?`` over {0,1} (surrounding whitespace
allowed), 1 when it does not, 2 when the input cannot be read.
"""

import re
import sys


def main(argv):
    if len(argv) != 1:
        return 2
    try:
        with open(argv[0], encoding="utf-8") as fh:
            data = fh.read()
    except (OSError, UnicodeDecodeError):
        return 2
    if re.fullmatch(r"\s*[01]+(\.[01]+)?\s*", data):
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
