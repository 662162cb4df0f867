"""Typological distances: binary-parameter Jaccard and WALS cosine features.

The relative-clause-order feature is the canonical example: English is NRel,
Hindi correlative, Hungarian has both NRel and RelN without a dominant
order. Multi-hot encoding makes "both orders" a vector with two ones, and
cosine distance grades partial overlap instead of forcing all-or-nothing.
"""

from syndiff.typology import (
    ParameterProfile,
    WalsProfile,
    average_feature_distance,
    feature_distance_vector,
    imputation_table,
    jaccard_distance,
    wals_feature_distance,
)

en = WalsProfile(language="en", features={"90A": (1, 0, 0), "81A": (1, 0)})
hi = WalsProfile(language="hi", features={"90A": (0, 0, 1), "81A": (0, 1)})
hu = WalsProfile(language="hu", features={"90A": (1, 1, 0)})
ja = WalsProfile(language="ja", features={"90A": (0, 1, 0), "81A": (0, 1)})

print("relative-clause order (90A) cosine distances:")
for a, b in ((en, hi), (en, hu), (en, ja), (hu, ja)):
    d = wals_feature_distance(a, b, "90A")
    print(f"  {a.language}-{b.language}: {d:.4f}")
print("en-hi are orthogonal (1.0); en-hu share NRel (1 - 1/sqrt(2) = 0.2929)")

print("\nfeature vector en vs hu over (90A, 81A); 81A missing for hu:")
v = feature_distance_vector(en, hu, ("90A", "81A"))
print(f"  distances {v.distances}, imputed mask {v.imputed}")
print(f"  average over defined entries: {average_feature_distance(v):.4f}")

table = imputation_table([en, hi, hu, ja], ("90A", "81A"))
rounded = {fid: round(v, 4) for fid, v in table.items()}
print(f"\nper-feature mean-distance table from all pairs: {rounded}")
filled = feature_distance_vector(en, hu, ("90A", "81A"), imputation="mean", mean_table=table)
print(f"mean-imputed vector: {filled.distances.round(4)}")

pa = ParameterProfile(language="aa", parameters=(1, 0, 1, 1, None))
pb = ParameterProfile(language="bb", parameters=(1, 1, 0, 1, 0))
print(f"\nbinary-parameter Jaccard distance aa-bb: {jaccard_distance(pa, pb):.4f}")
print("(undefined slots are ignored; distance uses slots defined in both)")
