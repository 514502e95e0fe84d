"""The center of value: the price that minimizes potential rent.

Potential rent at a price is the surplus every in-the-money trader would
collect there. It is convex, its slope is excess supply, and its
minimizers coincide with the clearing interval. Because the minimizer is a
weighted median, an extreme valuation does not drag it.
"""

from classical_market import Population, center_of_value, clearing, excess_rent, potential_rent, rent_profile

pop = Population.from_limits(buyers=[10, 8, 6], sellers=[5, 7, 9])

for p in (5, 6, 7, 7.5, 8, 9, 10):
    print(f"rent({p}) = {potential_rent(pop, p):>4}   excess rent = {excess_rent(pop, p)}")

prof = rent_profile(pop)
print("\nslopes between knots (excess supply):", prof.slopes)
print("center of value:", center_of_value(pop))
print("clearing interval:", clearing(pop)[0])

# A buyer willing to pay a million does not move the center.
rich = Population.from_limits(buyers=[1_000_000, 8, 6], sellers=[5, 7, 9])
print("\nwith a millionaire buyer:", center_of_value(rich))
