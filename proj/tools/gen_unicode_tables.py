#!/usr/bin/env python3
# Copyright 2026 The SGSM Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates core/src/unicode_tables.inc from Python's unicodedata."""

import sys
import unicodedata


def ranges(pred):
    out, start = [], None
    for cp in range(0x110000):
        hit = pred(cp)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, 0x10FFFF))
    return out


def is_surrogate(cp):
    return 0xD800 <= cp <= 0xDFFF


def main(path):
    punct = ranges(lambda cp: not is_surrogate(cp)
                   and unicodedata.category(chr(cp)).startswith("P"))
    space = ranges(lambda cp: not is_surrogate(cp) and chr(cp).isspace())
    lower = []
    for cp in range(0x110000):
        if is_surrogate(cp):
            continue
        low = chr(cp).lower()
        if low != chr(cp):
            cps = [ord(c) for c in low]
            assert len(cps) <= 3
            lower.append((cp, cps + [0] * (3 - len(cps))))

    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n\n"
                % unicodedata.unidata_version)
        f.write("constexpr CodePointRange kPunctuation[] = {\n")
        for lo, hi in punct:
            f.write("    {0x%04X, 0x%04X},\n" % (lo, hi))
        f.write("};\n\nconstexpr CodePointRange kWhitespace[] = {\n")
        for lo, hi in space:
            f.write("    {0x%04X, 0x%04X},\n" % (lo, hi))
        f.write("};\n\nconstexpr LowerMapping kLowercase[] = {\n")
        for cp, cps in lower:
            f.write("    {0x%04X, {0x%04X, 0x%04X, 0x%04X}},\n" % (cp, *cps))
        f.write("};\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "core/src/unicode_tables.inc")
