"""Build a premorphism whose induced map does not intertwine the successor maps."""
from ordered_bratteli import (build_counterexample, check_factoring, classify_decisiveness,
                              induced_map_path, validate_premorphism, vershik_step_infinite)
from ordered_bratteli.fixtures import load_fixture
from ordered_bratteli.sadic import sliding_block_pipeline

fx = load_fixture("counterexample")
B, ext = fx.diagrams["B"], fx.extensions["B"]
z, y = fx.paths["z"], fx.paths["y"]
print("min path z =", z)
print("max path y =", y, " extension sends it to", ext(y))

res = build_counterexample(B, z, y, ext)
f, x, tx = res.premorphism, res.x, res.tx
print(validate_premorphism(f))
for row in res.bookkeeping[:3]:
    print(row)

# x sits below y, its successor below z
print(induced_map_path(f, x), induced_map_path(f, tx))
print(vershik_step_infinite(res.b_prime, x) == tx)

report = check_factoring(f, ext_B=ext, ext_C=res.lifted_extension(ext))
print(report.verdict)
for w in report.witnesses:
    print("witness", w["path"], "level", w["level"], w["expected_prefix"], "vs", w["actual_prefix"])

# the same failure seen on orbit words
pipe = sliding_block_pipeline(f, 2, 20, ext, res.lifted_extension(ext))
print(pipe.shift_ok, pipe.witness["position"])

c = classify_decisiveness(B, z, y, res, ext)
print(c.verdict, c.case)
