"""Two orders of reducing the same cuts give two different normal forms.

    python3 demos/nonconfluence.py
"""

from pathlib import Path

from expcut.cutelim import cut_classes, normalize, prefer
from expcut.expansion import same_proof
from expcut.syntax import parse_expansion_proof, parse_formula, print_expansion_proof

DATA = Path(__file__).resolve().parent / "data"

p = parse_expansion_proof((DATA / "nonconfluence.exp").read_text())
print(print_expansion_proof(p))
print("cut classes:", ", ".join(str(c.formula) for c in cut_classes(p)))

forms = {}
for text in ("ex x R(x)", "ex x S(x)"):
    q, trace = normalize(p, strategy=prefer(parse_formula(text)))
    forms[text] = q
    print(f"\n{text} first: {len(trace.steps)} steps, {len(q.trees)} trees")
    print(print_expansion_proof(q))

a, b = forms.values()
print("same normal form:", same_proof(a, b))
