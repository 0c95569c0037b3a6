#!/usr/bin/env python3
"""Parse the CLI's RDF exports with rdflib and compare them.

Usage: rdflib_crosscheck.py <path-to-life-binary>
Exits 77 (skipped) when rdflib is not installed.
"""
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import rdflib
    from rdflib.compare import isomorphic, to_isomorphic
except ImportError:
    print("rdflib not installed; skipping")
    sys.exit(77)

ONTOLEX = rdflib.Namespace("http://www.w3.org/ns/lemon/ontolex#")
LIGT = rdflib.Namespace("http://purl.org/liodi/ligt/")

SFM = """\\lx kitab
\\ps n
\\ge book

\\lx kitabu
\\ps n
\\sn
\\ge book
\\de a bound "volume" <of pages>
\\sn
\\ge register
\\xv kitabu changu
\\xe my book

\\lx soma
\\ps v
\\ge read
\\va someni

\\lx mti mkubwa
\\ps n
\\ge big tree
"""

IGT = """\\tx vitabu vyangu=ni
\\mb vi-tabu vy-angu=ni
\\gl PL-book PL-my=LOC
\\ft in my books

\\tx ninasoma
\\mb ni-na-soma
\\gl 1SG-PRS-read
\\ft I am reading
"""


def run(life, data, *args, stdin=None):
    cmd = [life, "--data-dir", str(data), "--kdf", "min", *args]
    r = subprocess.run(cmd, input=stdin, capture_output=True, text=True)
    if r.returncode != 0:
        print("FAILED:", " ".join(cmd), r.stderr, sep="\n")
        sys.exit(1)
    return r.stdout


def main():
    if len(sys.argv) != 2:
        print(__doc__)
        return 2
    life = sys.argv[1]
    failures = []

    def check(ok, what):
        print(("ok   " if ok else "FAIL ") + what)
        if not ok:
            failures.append(what)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        data = tmp / "data"
        (tmp / "lex.sfm").write_text(SFM, encoding="utf-8")
        (tmp / "texts.igt").write_text(IGT, encoding="utf-8")
        run(life, data, "user", "add", "alice", "--password", "pw")
        run(life, data, "project", "create", "--name", "Swahili notes", "--code", "swh",
            "--owner", "alice", "--alphabet", "a b ch d e f g h i j k l m n o p r s t u v w y z",
            "--pos", "n v adj")
        run(life, data, "import", "--project", "swahili-notes", "--format", "sfm", str(tmp / "lex.sfm"))
        run(life, data, "import", "--project", "swahili-notes", "--format", "igt", str(tmp / "texts.igt"))

        nt = run(life, data, "export", "--project", "swahili-notes", "--format", "nt")
        lex_ttl = run(life, data, "export", "--project", "swahili-notes", "--format", "ontolex-ttl")
        ligt_ttl = run(life, data, "export", "--project", "swahili-notes", "--format", "ligt-ttl")
        again = run(life, data, "export", "--project", "swahili-notes", "--format", "nt")

    g_nt = rdflib.Graph().parse(data=nt, format="nt")
    g_ttl = rdflib.Graph().parse(data=lex_ttl, format="turtle")
    g_ttl += rdflib.Graph().parse(data=ligt_ttl, format="turtle")

    check(len(g_nt) > 0, f"N-Triples parsed ({len(g_nt)} triples)")
    check(isomorphic(g_nt, g_ttl), "Turtle exports are isomorphic to the N-Triples export")
    check(nt == again, "repeated export is byte-identical")
    lines = [l for l in nt.splitlines() if l]
    check(lines == sorted(set(lines)), "N-Triples lines are sorted and unique")
    check(len(lines) == len(g_nt), "one line per triple")

    entries = set(g_nt.subjects(rdflib.RDF.type, ONTOLEX.LexicalEntry))
    check(len(entries) == 4, f"4 lexical entries ({len(entries)})")
    kitab = [e for e in entries
             if (e, ONTOLEX.canonicalForm, None) in g_nt
             and any(str(r) == "kitab" for f in g_nt.objects(e, ONTOLEX.canonicalForm)
                     for r in g_nt.objects(f, ONTOLEX.writtenRep))]
    check(len(kitab) == 1, "kitab entry found")
    if kitab:
        e = kitab[0]
        related = {e} | set(g_nt.objects(e, ONTOLEX.canonicalForm)) | set(g_nt.objects(e, ONTOLEX.sense))
        triples = [t for t in g_nt if t[0] in related]
        check(len(triples) == 9, f"kitab maps to 9 triples ({len(triples)})")
    mwe = set(g_nt.subjects(rdflib.RDF.type, ONTOLEX.MultiwordExpression))
    check(len(mwe) == 1, "multiword headword typed as MultiwordExpression")
    literals = [o for o in g_nt.objects() if isinstance(o, rdflib.Literal) and "volume" in str(o)]
    check(any('"volume" <of pages>' in str(o) for o in literals), "quotes and angle brackets survive")

    utterances = set(g_nt.subjects(rdflib.RDF.type, LIGT.Utterance))
    words = set(g_nt.subjects(rdflib.RDF.type, LIGT.Word))
    morphs = set(g_nt.subjects(rdflib.RDF.type, LIGT.Morph))
    check(len(utterances) == 2, f"2 utterances ({len(utterances)})")
    check(len(words) == 3, f"3 words ({len(words)})")
    check(len(morphs) == 8, f"8 morphs ({len(morphs)})")

    canon = to_isomorphic(g_nt)
    check(len(canon) == len(g_nt), "canonical form keeps every triple")

    print("PASS" if not failures else f"FAIL ({len(failures)})")
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
