"""
Surfaces as diagrams, and what they count
=========================================

A compact tour of the diagram DSL: build cobordisms between circles out of
pants, caps, twists and handle tori, compose and tensor them, and watch the
canonical form recover the surface data (genus, level, boundary legs).
"""

from arith_tqft.cobordism import (
    canonicalize,
    compose,
    diagrams_equal,
    invariant_of,
    parse_diagram,
    print_diagram,
    surface_diagram,
    tensor,
)
from arith_tqft.units import INF

# ---------------------------------------------------------------------------
# The DSL: semicolons stack slices bottom-to-top, commas run side by side.
# A pair of pants "m" merges two circles, "d" splits one, "cap" is a disk
# viewed as a birth, "cup" a death, "tor(r)" a level-r handle.

D = parse_diagram("cap, id; m; tor(1); d; cup, id")
print("a diagram and its arities:")
print(print_diagram(D))
print("in arity ", D.in_arity)
print("out arity", D.out_arity)

# ---------------------------------------------------------------------------
# The invariant of a diagram is the multiset of its connected components,
# each reduced to (genus, level, inputs, outputs).

print("\ninvariant:", invariant_of(D))

# ---------------------------------------------------------------------------
# Composition glues top to bottom; tensor places side by side.  Gluing two
# level-1 handles onto a cylinder yields a genus-2 piece.

handle = parse_diagram("tor(1)")
genus2 = compose(handle, handle)
print("\ntwo handles glued:", invariant_of(genus2))

pair = tensor(handle, handle)
print("two handles side by side:", invariant_of(pair))

# ---------------------------------------------------------------------------
# Canonical forms decide equality.  The comultiply-then-multiply composite
# *is* the orientable handle: an application of the handle relation.

lhs = parse_diagram("d; m")
rhs = parse_diagram("tor(inf)")
print("\nd;m equals tor(inf):", diagrams_equal(lhs, rhs))
print("canonical form:", canonicalize(lhs).to_json())

# ---------------------------------------------------------------------------
# surface_diagram builds the model surface with a prescribed invariant
# directly; any diagram with that invariant is equal to it.

model = surface_diagram(2, INF, 1, 1)
print("\nmodel genus-2 surface with one leg in, one out:")
print(print_diagram(model))
print("invariant:", invariant_of(model))

closed = surface_diagram(3, INF, 0, 0)
print("\nclosed genus-3 invariant:", invariant_of(closed))
