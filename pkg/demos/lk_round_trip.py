"""Read an LK proof off as an expansion proof and rebuild an LK proof from it.

    python3 demos/lk_round_trip.py
"""

from pathlib import Path

from expcut.expansion import check_proof
from expcut.lk import check_lk, end_sequent_set, expand, sequentialize
from expcut.syntax import parse_lk_proof, print_expansion_proof

DATA = Path(__file__).resolve().parent / "data"

pi = parse_lk_proof((DATA / "example.lk").read_text())
print(f"LK proof: {pi.size} inferences, {pi.cut_count} cut(s), height {pi.height}")

p = expand(pi)
print("\nexpansion proof:")
print(print_expansion_proof(p))
print("check:", "ok" if check_proof(p).ok else "FAILED")

back = sequentialize(p)
report = check_lk(back, semantics="set")
print(f"\nrebuilt LK proof: {back.size} inferences, {back.cut_count} cut(s), check {'ok' if report.ok else 'FAILED'}")
print("same end-sequent:", end_sequent_set(back) == end_sequent_set(pi))
