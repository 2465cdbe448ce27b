"""Walk through the recursive blocking of {1..A}.

The construction repeatedly splits each run of consecutive indices into
two side blocks and a dropped middle gap.  After ell rounds the kept set
K is a union of 2^ell equal runs and always retains at least half of the
indices.  Applied repeatedly to the dropped indices, it decomposes all of
{1..n} into log-many kept sets plus at most two leftovers.
"""

from depbernstein import cantor

for A in (50, 100, 1000):
    part = cantor.cantor_set(A)
    p = part.params
    print(f"A = {A}: ell = {p.ell}, block sizes n = {p.n_seq}, "
          f"gaps d = {p.d_seq}, kept {part.card}/{A}")

part = cantor.cantor_set(100)
print("\nK_100 leaf runs:", [(leaf[0], leaf[-1]) for leaf in part.leaves])
print("dropped gap:    ", [(g[0], g[-1]) for g in part.remainders[0]])

print("\nfull decomposition of {1..100}:")
dec = cantor.full_decomposition(100)
for i, level in enumerate(dec.levels):
    print(f"  level {i}: {len(level)} indices, first/last = {level[0]}/{level[-1]}")
print(f"  remainder: {dec.remainder}")
print(f"  survivor counts per round: {dec.cards}")

print("\nalternating sub-blocks of K_100 with p = 8:")
odd, even = cantor.sub_block_partition(part.K, 8)
print(f"  odd family sizes:  {[len(b) for b in odd]}")
print(f"  even family sizes: {[len(b) for b in even]}")
