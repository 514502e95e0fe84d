"""Step demand and supply curves, and where they clear.

Three buyers value the good at 10, 8 and 6; three sellers would part with
it for 5, 7 and 9. Demand counts buyers whose value is at least the price,
supply counts sellers whose cost is at most the price.
"""

from classical_market import Population, clearing, demand_at, excess_supply, max_surplus, supply_at

pop = Population.from_limits(buyers=[10, 8, 6], sellers=[5, 7, 9])

print("price  demand  supply  excess supply")
for p in range(4, 12):
    print(f"{p:>5}  {demand_at(pop, p):>6}  {supply_at(pop, p):>6}  {excess_supply(pop, p):>13}")

interval, q = clearing(pop)
print(f"\nclearing prices [{interval.low}, {interval.high}], {q} units traded")
print(f"largest possible gains from trade: {max_surplus(pop)}")

# Without overlap nothing trades and the whole gap clears the market.
gap = Population.from_limits([3], [5])
print("no overlap:", clearing(gap))
