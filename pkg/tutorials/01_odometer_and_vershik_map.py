"""Walk through the binary odometer: paths, towers and the successor map."""
from ordered_bratteli import Kind, count_extreme_paths, orbit_segment, vershik_step, vershik_step_infinite
from ordered_bratteli.dot import render_dot
from ordered_bratteli.fixtures import load_fixture
from ordered_bratteli.sadic import compose_morphisms, tower_word

d = load_fixture("two_odometer").diagrams["B"]
print(d.vertices(3), d.fiber(3, "v"))  # one vertex per level, two edges into it

# a prefix lists (range, rank) pairs from level 1 up
p = (("v", 1), ("v", 0), ("v", 0))
print(vershik_step(d, p))  # carry: (v:0 v:1 v:0)

# the tower over v at level 3 is counting in binary, low digit first
bottom = count_extreme_paths(d, Kind.MIN).witnesses[0]
for x in orbit_segment(d, bottom, 8):
    print(" ".join(str(r) for _, r in x.prefix(3)))

# the all-ones path wraps to the all-zeros path
top = count_extreme_paths(d, Kind.MAX).witnesses[0]
print(top, "->", vershik_step_infinite(d, top))

# the same tower read as a substitution word
print(compose_morphisms(d, 1, 3).images)
print(" ".join(map(str, tower_word(d, 1, 3, "v"))))

print(render_dot(d, 2))
