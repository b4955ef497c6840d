"""Monte Carlo scan of the plurality manipulation-point fraction over n.

The fraction tracks the probability of a near-tie in first-place votes: it
rises over very small electorates, peaks around n ~ 11 for q = 3, and then
decays like 1/sqrt(n).  Seeded streams make every row reproducible.
"""

from gslab import manipulation as manip


def main() -> None:
    q = 3
    ns = (5, 7, 11, 21, 51, 101, 201)
    rows = manip.plurality_scaling_experiment(q, ns, k=50_000, seed=123)
    print(f"plurality, q={q}, 50000 samples per point, seed 123")
    print(f"{'n':>5}  {'estimate':>9}  {'2*stderr':>9}")
    for r in rows:
        print(f"{r['n']:>5}  {r['estimate']:>9.4f}  {2 * r['stderr']:>9.4f}")


if __name__ == "__main__":
    main()
