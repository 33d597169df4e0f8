#!/usr/bin/env python3
# Copyright 2026 ftsearch Authors
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
"""Regenerates core/src/unicode_tables.inc from the Python unicodedata module.

The tables drive the analyzer: word-character ranges for tokenization,
simple full lowercase mappings, and the Latin-script ASCII folding map.
Run from the repository root:

    python3 scripts/gen_unicode_tables.py > core/src/unicode_tables.inc
"""

import sys
import unicodedata

MAX_CP = 0x110000

WORD_CATEGORIES = {
    "Lu", "Ll", "Lt", "Lm", "Lo",   # letters
    "Mn", "Mc", "Me",               # combining marks travel with their base
    "Nd", "Nl", "No",               # numbers
}

# Blocks scanned for NFKD-based ASCII folding. All are Latin script, so the
# fold never touches Greek, Cyrillic, Thai, Arabic, etc.
LATIN_FOLD_RANGES = [
    (0x00C0, 0x024F),  # Latin-1 Supplement letters, Extended-A, Extended-B
    (0x1E00, 0x1EFF),  # Latin Extended Additional
    (0x2C60, 0x2C7F),  # Latin Extended-C
    (0xA720, 0xA7FF),  # Latin Extended-D
    (0xFB00, 0xFB06),  # Latin ligatures ff fi fl ffi ffl st
    (0xFF21, 0xFF3A),  # fullwidth A-Z
    (0xFF41, 0xFF5A),  # fullwidth a-z
]

# Latin letters without a canonical/compat decomposition, matching the usual
# folding of stroked and ligature forms.
MANUAL_FOLDS = {
    0x00C6: "AE", 0x00E6: "ae",      # Æ æ
    0x00D0: "D", 0x00F0: "d",        # Ð ð
    0x00D8: "O", 0x00F8: "o",        # Ø ø
    0x00DE: "TH", 0x00FE: "th",      # Þ þ
    0x00DF: "ss", 0x1E9E: "SS",      # ß ẞ
    0x0110: "D", 0x0111: "d",        # Đ đ
    0x0126: "H", 0x0127: "h",        # Ħ ħ
    0x0131: "i",                     # dotless ı
    0x0138: "k",                     # kra ĸ
    0x0141: "L", 0x0142: "l",        # Ł ł
    0x014A: "N", 0x014B: "n",        # Ŋ ŋ
    0x0152: "OE", 0x0153: "oe",      # Œ œ
    0x0166: "T", 0x0167: "t",        # Ŧ ŧ
    0x2019: "'",                     # right single quote, kept by tokenizer
}

# Generic (script-inherited) combining marks stripped by the fold when they
# trail Latin bases. Script-specific marks (Thai, Arabic, ...) live in their
# own blocks and are untouched.
GENERIC_MARK_RANGES = [
    (0x0300, 0x036F),
    (0x1AB0, 0x1AFF),
    (0x1DC0, 0x1DFF),
    (0x20D0, 0x20FF),
    (0xFE20, 0xFE2F),
]

# Han and related ideographs are emitted one token per codepoint.
IDEOGRAPH_RANGES = [
    (0x2E80, 0x2EFF),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2FA1F),
]


def ranges_for(predicate):
    out = []
    start = None
    for cp in range(MAX_CP):
        if predicate(cp):
            if start is None:
                start = cp
        elif start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def is_word_cp(cp):
    return unicodedata.category(chr(cp)) in WORD_CATEGORIES


def is_digit_cp(cp):
    return unicodedata.category(chr(cp)) == "Nd"


def fold_target(cp):
    if cp in MANUAL_FOLDS:
        return MANUAL_FOLDS[cp]
    decomposed = unicodedata.normalize("NFKD", chr(cp))
    kept = [c for c in decomposed if unicodedata.category(c) != "Mn"]
    folded = "".join(c for c in kept if ord(c) < 0x80)
    if folded and all(0x20 <= ord(c) < 0x7F for c in folded):
        return folded
    return None


def lower_entries():
    entries = []
    for cp in range(MAX_CP):
        ch = chr(cp)
        if unicodedata.category(ch) not in ("Lu", "Lt", "Ll", "Lo", "Lm"):
            continue
        low = ch.lower()
        if low != ch:
            entries.append((cp, [ord(c) for c in low]))
    return entries


def emit_ranges(name, ranges, out):
    out.write(f"inline constexpr CodepointRange {name}[] = {{\n")
    for lo, hi in ranges:
        out.write(f"    {{0x{lo:X}, 0x{hi:X}}},\n")
    out.write("};\n\n")


def main(out):
    out.write("// Generated by scripts/gen_unicode_tables.py from Python's "
              f"unicodedata {unicodedata.unidata_version}. Do not edit.\n\n")
    lowers = lower_entries()
    max_len = max(len(seq) for _, seq in lowers)
    out.write("struct CodepointRange { char32_t lo; char32_t hi; };\n")
    out.write(f"struct CaseMapping {{ char32_t cp; char32_t to[{max_len}]; "
              "unsigned len; };\n")
    out.write("struct FoldMapping { char32_t cp; const char* to; };\n\n")

    emit_ranges("kWordCharRanges", ranges_for(is_word_cp), out)
    emit_ranges("kDigitRanges", ranges_for(is_digit_cp), out)
    emit_ranges("kGenericMarkRanges", GENERIC_MARK_RANGES, out)
    emit_ranges("kIdeographRanges", IDEOGRAPH_RANGES, out)

    out.write(f"inline constexpr std::size_t kLowerMaxExpansion = {max_len};\n")
    out.write("inline constexpr CaseMapping kLowerMap[] = {\n")
    for cp, seq in lowers:
        padded = seq + [0] * (max_len - len(seq))
        cps = ", ".join(f"0x{c:X}" for c in padded)
        out.write(f"    {{0x{cp:X}, {{{cps}}}, {len(seq)}}},\n")
    out.write("};\n\n")

    folds = {}
    for lo, hi in LATIN_FOLD_RANGES:
        for cp in range(lo, hi + 1):
            target = fold_target(cp)
            if target is not None and target != chr(cp):
                folds[cp] = target
    folds.update(MANUAL_FOLDS)
    out.write("inline constexpr FoldMapping kAsciiFoldMap[] = {\n")
    for cp in sorted(folds):
        escaped = folds[cp].replace("\\", "\\\\").replace('"', '\\"')
        out.write(f'    {{0x{cp:X}, "{escaped}"}},\n')
    out.write("};\n")


if __name__ == "__main__":
    main(sys.stdout)
