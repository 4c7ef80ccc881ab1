# %% [markdown]
# # Weiss approximation statistic
#
# For a subgroup H we estimate p_i(g), the chance that a uniform point of
# F_i conjugates g into K_i.  Small i permits exact counting; beyond the
# cap we fall back to Monte Carlo with a confidence interval.

# %%
from neumannlab.lattice import close_subgroup
from neumannlab.neumann import OddSequence, evaluate_word, generators
from neumannlab.weiss import p_statistic, p_statistic_bruteforce, weiss_report

P = OddSequence((5, 7), 2)
t, s = generators(P)
H = close_subgroup(P, [t])
print("|H| =", H.order())

# %% [markdown]
# Exact values and the brute-force oracle agree on the first level.

# %%
for w in ("t", "s^-1 t s", "s^-2 t s^2", "s^-3 t s^3"):
    g = evaluate_word(P, w)
    print(f"{w:12}", p_statistic(P, H, g, 1), p_statistic_bruteforce(P, H, g, 1), p_statistic(P, H, g, 2))

# %% [markdown]
# Monte Carlo at the same points, with 95% intervals.

# %%
for w in ("s^-1 t s", "s^-3 t s^3"):
    est = p_statistic(P, H, evaluate_word(P, w), 2, mode="mc", samples=50_000, seed=3)
    print(f"{w:12}", est)

# %% [markdown]
# A whole report, with derived checks on monotonicity and on domination
# by q_i.  Since H is finite the limit is 0.

# %%
rep = weiss_report(P, H, ["s", "s^-2 t s^2"], range(1, 4), 20_000, seed=1)
for r in rep:
    print(r.probe, [(row.i, row.point) for row in r.rows], r.non_increasing, r.dominated_by_q)
