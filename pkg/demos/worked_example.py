"""Check the worked example, show its dependency relation, then remove its cut.

    python3 demos/worked_example.py
"""

from pathlib import Path

from expcut.cutelim import normalize
from expcut.expansion import DependencyGraph, check_proof, deep_sequent, shallow_sequent
from expcut.syntax import parse_expansion_proof, print_expansion_proof, print_formula

DATA = Path(__file__).resolve().parent / "data"

p = parse_expansion_proof((DATA / "example.exp").read_text())
print("proof:")
print(print_expansion_proof(p))

print("checks:")
for line in check_proof(p).lines():
    print("  " + line)

print("\ndependency edges:")
for a, b in sorted(DependencyGraph(p).labelled_edges()):
    print(f"  {a} < {b}")

print("\ndeep sequent:")
for f in deep_sequent(p):
    print("  " + print_formula(f))


def show(step, before, after):
    print(f"  {step.kind:13} class {step.class_formula}  cuts {len(before.cuts)} -> {len(after.cuts)}")


print("\nreduction steps:")
q, trace = normalize(p, on_step=show)
print("measures:", " ".join(str(tuple(m.as_list())) for m in trace.measures))
print("\ncut-free result:")
print(print_expansion_proof(q))
assert {print_formula(f) for f in shallow_sequent(q)} == {print_formula(f) for f in shallow_sequent(p)}
