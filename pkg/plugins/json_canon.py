#!/usr/bin/env python3
"""Canonicalizing JSON normalizer.

Called with two arguments, input and output file.  Writes the value
back with sorted keys and two-space indentation (a fixed point of
itself), exits 1 on invalid JSON and 2 on unreadable input.
"""

import json
import sys


def main(argv):
    if len(argv) != 2:
        return 2
    try:
        with open(argv[0], encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError):
        return 2
    try:
        value = json.loads(text)
    except ValueError:
        return 1
    with open(argv[1], "w", encoding="utf-8") as fh:
        json.dump(value, fh, sort_keys=True, indent=2, ensure_ascii=False)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
