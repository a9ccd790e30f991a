"""Builds the pseudo-document golden files from the 23-pair fixture."""
import json
import pathlib

here = pathlib.Path(__file__).resolve().parent
pairs = [json.loads(l) for l in (here.parent / "fixtures" / "pairs_eng_fra_23.jsonl").read_text(encoding="utf-8").splitlines() if l]

lines = [f"[{p['src_lang']}]: {p['src_txt']} [{p['tgt_lang']}]: {p['tgt_txt']}" for p in pairs]
docs = [lines[i:i + 10] for i in range(0, len(lines), 10)]
assert [len(d) for d in docs] == [10, 10, 3]

for name, sep in (("eng_fra_23.txt", "\n"), ("eng_fra_23.strict.txt", " \n")):
    text = "\n\n".join(sep.join(d) for d in docs) + "\n"
    (here / name).write_bytes(text.encode("utf-8"))
