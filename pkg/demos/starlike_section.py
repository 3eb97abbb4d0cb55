"""The symmetrized tridisc is not starlike about the origin.

A random search finds a member x and t in (0, 1) with t x outside; the same
point is then pushed along a complex line and the section is rasterised.
Writes ``section.csv`` next to the current directory.
"""
import time

from mudom import symmetrized_polydisc
from mudom.prober import line_section_scan, starlike_witness_search

g3 = symmetrized_polydisc(3)
t0 = time.perf_counter()
wit = starlike_witness_search(g3, budget=10**5, seed=0)
if wit is None:
    print("no witness within the budget")
else:
    print(f"x = {wit.x}")
    print(f"t = {wit.t:.3f}; member margins {wit.margin_x:.2e} (x) and {wit.margin_tx:.2e} (t x)")
    print(f"found after {wit.samples_used} samples in {time.perf_counter() - t0:.1f}s, "
          f"checked by {', '.join(wit.verified_methods)}")
    sec = line_section_scan(g3, [0, 0, 0], wit.x, (-1.5, 1.5, -1.5, 1.5), 96)
    print(f"section through 0 along x: {sec.components} component(s), {sec.holes} hole(s)")
    with open("section.csv", "w") as fh:
        sec.to_csv(fh)
