# %% [markdown]
# # Random colorings and almost homomorphisms
#
# Part one samples the Vershik-type random subgroup: a coloring f of Z
# and a sign subgroup S decide which finitary permutations are kept.
# Part two measures how far perturbed finite images are from a genuine
# homomorphism.

# %%
from neumannlab.almosthom import defect, distance, perturb, probe_words, quotient_rep, word_pairs
from neumannlab.neumann import OddSequence
from neumannlab.permutation import parse_cycles
from neumannlab.vershik import (
    ProbVector, SignSubgroup, degenerate_test, invariance_test, shift_structure_probability,
)

alpha = ProbVector.parse("0.3;0.7")
S = SignSubgroup.trivial(1)
g = parse_cycles("(-1,0,1)")

# %% [markdown]
# The 3-cycle survives when its three points share the color 1, which has
# probability 0.7^3 = 0.343.  Conjugating must not change that.

# %%
for row in invariance_test(alpha, S, [g], [parse_cycles("(0,7)"), parse_cycles("(-5,1)")], 10, 100_000, 7):
    print(row)

# %% [markdown]
# Degenerate laws: all color-0 mass gives the trivial subgroup, and a single
# infinite color with ker epsilon gives the finitary alternating group.

# %%
print(degenerate_test(ProbVector(1.0), SignSubgroup.trivial(0), 10, 5_000, 1))
print(degenerate_test(ProbVector.parse("0;1"), SignSubgroup.ker_epsilon(1), 10, 5_000, 1))

# %% [markdown]
# A shift by one rarely preserves the block structure on larger windows.

# %%
for M in (5, 10, 20, 50):
    print(M, shift_structure_probability(ProbVector.parse("0;0.5,0.5"), 1, M, 10_000, 7))

# %% [markdown]
# ## Defect
#
# The quotient map onto windows 1..2 is a genuine homomorphism into
# Sym(12).  Perturbing the generator images by eps destroys that slightly.

# %%
P = OddSequence((5, 7))
words = probe_words(3)
pairs = word_pairs(words, 3)
f = quotient_rep(P, 2, words)
print("degree", f.degree, "defect", defect(f, pairs))
for eps in (0.05, 0.25, 0.5):
    h = perturb(f, eps, seed=7)
    print(eps, "distance", distance(h, f, words), "defect", defect(h, pairs))
