"""Rank-2 diagrams as odometers, and premorphisms as morphism sequences."""
import numpy as np

from ordered_bratteli import check_factoring, rank2_reduce
from ordered_bratteli.fixtures import load_fixture
from ordered_bratteli.sadic import check_commuting_rectangles, compose_morphisms, premorphism_to_eta

fx = load_fixture("rank2")
out = rank2_reduce(fx.diagrams["B"], fx.extensions["B"])
print(type(out).__name__, "after", out.cuts)
print([out.diagram.total_paths(n) for n in range(6)])
print([out.odometer.total_paths(n) for n in range(6)])
print(check_factoring(out.premorphism, 6, ext_B=fx.extensions["B"]).verdict)

cantor = load_fixture("cantor")
for key in ("left", "right"):
    print(key, type(rank2_reduce(cantor.diagrams[key])).__name__)

# incidence matrices multiply like adjacency matrices
d = fx.diagrams["B"]
m = compose_morphisms(d, 1, 4)
print(m.images)
print(m.incidence_matrix())
print(np.linalg.matrix_rank(m.incidence_matrix()))

f = load_fixture("counterexample").premorphisms["f"]
for k, eta in enumerate(premorphism_to_eta(f, 3)):
    print(k, eta.images)
print(check_commuting_rectangles(f).ok)
