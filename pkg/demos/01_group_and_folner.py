# %% [markdown]
# # The group G(P) and its Følner sets
#
# Elements are pairs (coordinates, translation).  We build a few, look at
# their window coordinates and tail, then measure boundary ratios of the
# adapted Følner sets F_i = L_i * {s^j : |j| < r_i}.

# %%
from neumannlab.lattice import L, folner_set
from neumannlab.neumann import OddSequence, coordinate, evaluate_word, generators, tail
from neumannlab.weiss import adapted_lower_bound, adapted_ratio, folner_boundary_ratio

P = OddSequence((5, 7), 2)  # 5, 7, 9, 11, ...
t, s = generators(P)
print(P)

# %% [markdown]
# Conjugating t by s^2 slides the 3-cycle by two places.  Its coordinates
# are even permutations of the windows; the tail is the limit action on Z.

# %%
g = evaluate_word(P, "s^-2 t s^2")
for j in range(1, 4):
    print(f"window {j}:", coordinate(g, j))
print("tail:", tail(g))

# %% [markdown]
# ## Orders of the finite lattice subgroups L_i

# %%
for i in (1, 2, 3):
    print(i, L(P, i).order())

# %% [markdown]
# ## Boundary ratios
#
# For s the ratio is 2/(2 r_i - 1).  For t it is 0 from the start, since
# F_i absorbs t on both sides.

# %%
for i in range(1, 5):
    print(i, folner_boundary_ratio(P, i, s), folner_boundary_ratio(P, i, t))
print("|F_1| =", len(folner_set(P, 1)), "enumerated ratio:", folner_boundary_ratio(P, 1, s, mode="enumerate"))

# %% [markdown]
# The adapted ratio of t climbs towards 1.

# %%
for i in range(1, 7):
    print(i, adapted_ratio(P, t, i), ">=", adapted_lower_bound(P, t, i))
