#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from the Python unicodedata database.

The toolkit needs four pieces of Unicode knowledge: whitespace, punctuation,
decimal digits, simple lowercase mappings, and the canonical composition pairs
used for NFC-style normalization. Scanning stops at U+2FFFF; Hangul syllables
are skipped (algorithmic composition, never needed for the target corpora).
"""

import sys
import unicodedata

LIMIT = 0x30000
HANGUL = range(0xAC00, 0xD7A4)


def main(out_path: str) -> None:
    spaces = []
    puncts = []
    digits = []
    lower_pairs = []
    compose = []

    for cp in range(LIMIT):
        if 0xD800 <= cp <= 0xDFFF or cp in HANGUL:
            continue
        ch = chr(cp)
        cat = unicodedata.category(ch)
        if ch.isspace():
            spaces.append(cp)
        if cat.startswith("P"):
            puncts.append(cp)
        if cat == "Nd":
            digits.append(cp)
        low = ch.lower()
        if len(low) == 1 and low != ch:
            lower_pairs.append((cp, ord(low)))
        decomp = unicodedata.normalize("NFD", ch)
        if len(decomp) == 2 and unicodedata.normalize("NFC", decomp) == ch:
            compose.append((ord(decomp[0]), ord(decomp[1]), cp))

    compose.sort()

    def fmt_list(values, per_line=10):
        lines = []
        for i in range(0, len(values), per_line):
            lines.append("    " + ", ".join(f"0x{v:X}" for v in values[i : i + per_line]) + ",")
        return "\n".join(lines)

    def fmt_pairs(values, per_line=5):
        lines = []
        for i in range(0, len(values), per_line):
            chunk = ", ".join("{0x%X, 0x%X}" % p for p in values[i : i + per_line])
            lines.append("    " + chunk + ",")
        return "\n".join(lines)

    def fmt_triples(values, per_line=4):
        lines = []
        for i in range(0, len(values), per_line):
            chunk = ", ".join("{0x%X, 0x%X, 0x%X}" % t for t in values[i : i + per_line])
            lines.append("    " + chunk + ",")
        return "\n".join(lines)

    with open(out_path, "w", encoding="utf-8") as f:
        f.write(
            "// Generated by scripts/gen_unicode_tables.py (Unicode data %s). Do not edit.\n\n"
            % unicodedata.unidata_version
        )
        f.write("static constexpr char32_t kSpaceCps[] = {\n%s\n};\n\n" % fmt_list(spaces))
        f.write("static constexpr char32_t kPunctCps[] = {\n%s\n};\n\n" % fmt_list(puncts))
        f.write("static constexpr char32_t kDigitCps[] = {\n%s\n};\n\n" % fmt_list(digits))
        f.write(
            "static constexpr LowerPair kLowerPairs[] = {\n%s\n};\n\n" % fmt_pairs(lower_pairs)
        )
        f.write(
            "static constexpr ComposeEntry kComposeEntries[] = {\n%s\n};\n" % fmt_triples(compose)
        )

    sys.stderr.write(
        "spaces=%d puncts=%d digits=%d lower=%d compose=%d\n"
        % (len(spaces), len(puncts), len(digits), len(lower_pairs), len(compose))
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc")
