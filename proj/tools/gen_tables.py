#!/usr/bin/env python3
"""Regenerates the vendored language-code and script tables.

Sources: the ISO 639-3 code set as packaged by pycountry (Debian iso-codes)
and the Unicode Scripts property as packaged by fontTools. Writes the raw
data files under data/ and the embedded C++ tables under
include/polyglot_forge/data/.
"""
import pathlib
import sys

import fontTools
import fontTools.unicodedata.Scripts as scripts
import pycountry

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
INC = ROOT / "include" / "polyglot_forge" / "data"


def unicode_version():
    src = pathlib.Path(scripts.__file__).read_text(encoding="utf-8")
    for line in src.splitlines():
        if line.startswith("# Scripts-") and line.endswith(".txt"):
            return line[len("# Scripts-"):-len(".txt")]
    sys.exit("cannot find Scripts.txt version")


def read_overlay(name):
    rows = []
    for line in (DATA / name).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split("\t"))
    return rows


def main():
    iso_version = f"iso-codes (pycountry {pycountry.__version__ if hasattr(pycountry, '__version__') else 'unknown'})"
    try:
        from importlib.metadata import version
        iso_version = f"iso-codes via pycountry {version('pycountry')}"
    except Exception:
        pass

    langs = sorted(pycountry.languages, key=lambda l: l.alpha_3)
    with open(DATA / "iso-639-3.tab", "w", encoding="utf-8") as f:
        f.write("Id\tPart2b\tPart2t\tPart1\tScope\tLanguage_Type\tRef_Name\tComment\n")
        for l in langs:
            f.write("\t".join([
                l.alpha_3,
                getattr(l, "bibliographic", ""),
                l.alpha_3 if hasattr(l, "alpha_2") or hasattr(l, "bibliographic") else "",
                getattr(l, "alpha_2", ""),
                getattr(l, "scope", ""),
                getattr(l, "type", ""),
                l.name,
                "",
            ]) + "\n")

    valid = {l.alpha_3 for l in langs}
    extra_valid = [r[0] for r in read_overlay("extra_codes.tsv")]
    valid.update(extra_valid)

    aliases = {}
    name_count = {}
    for l in langs:
        name_count[l.name.lower()] = name_count.get(l.name.lower(), 0) + 1
    for l in langs:
        if hasattr(l, "alpha_2"):
            aliases[l.alpha_2] = l.alpha_3
        if hasattr(l, "bibliographic") and l.bibliographic != l.alpha_3:
            aliases[l.bibliographic] = l.alpha_3
    for l in langs:
        key = l.name.lower()
        if name_count[key] == 1 and key not in aliases and key not in valid:
            aliases[key] = l.alpha_3
    for denotation, code in read_overlay("opus_overlay.tsv"):
        aliases[denotation.lower()] = code
    for k, v in aliases.items():
        if v not in valid:
            sys.exit(f"alias {k} -> {v} targets an invalid code")

    with open(DATA / "iso639_aliases.tsv", "w", encoding="utf-8") as f:
        f.write(f"# generated by tools/gen_tables.py from {iso_version}\n")
        f.write("# denotation\tiso639_3\n")
        for k in sorted(aliases):
            f.write(f"{k}\t{aliases[k]}\n")

    def cxx_str(s):
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    with open(INC / "iso639_table.inc", "w", encoding="utf-8") as f:
        f.write("// Generated by tools/gen_tables.py. Do not edit.\n")
        f.write(f"inline constexpr std::string_view kIso639Version = {cxx_str(iso_version)};\n\n")
        f.write("inline constexpr std::string_view kIso639Codes[] = {\n")
        for c in sorted(valid):
            f.write(f"    {cxx_str(c)},\n")
        f.write("};\n\n")
        f.write("inline constexpr std::pair<std::string_view, std::string_view> kIso639Aliases[] = {\n")
        for k in sorted(aliases):
            f.write(f"    {{{cxx_str(k)}, {cxx_str(aliases[k])}}},\n")
        f.write("};\n")

    uver = unicode_version()
    ranges = list(scripts.RANGES)
    values = list(scripts.VALUES)
    with open(DATA / "scripts.tsv", "w", encoding="utf-8") as f:
        f.write(f"# Unicode Scripts property {uver}, ISO 15924 codes (via fontTools {fontTools.version})\n")
        f.write("# first\tlast\tscript\n")
        for i, start in enumerate(ranges):
            end = ranges[i + 1] - 1 if i + 1 < len(ranges) else 0x10FFFF
            f.write(f"{start:04X}\t{end:04X}\t{values[i]}\n")
    with open(INC / "script_table.inc", "w", encoding="utf-8") as f:
        f.write("// Generated by tools/gen_tables.py. Do not edit.\n")
        f.write(f"inline constexpr std::string_view kUnicodeVersion = {cxx_str(uver)};\n\n")
        f.write("inline constexpr ScriptRange kScriptRanges[] = {\n")
        for i, start in enumerate(ranges):
            end = ranges[i + 1] - 1 if i + 1 < len(ranges) else 0x10FFFF
            f.write(f"    {{0x{start:04X}, 0x{end:04X}, {cxx_str(values[i])}}},\n")
        f.write("};\n")


if __name__ == "__main__":
    main()
