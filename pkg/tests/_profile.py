"""
Script for profiling ``groupoid_cocycles`` performance.
"""
from groupoid_cocycles import generators, suite


def perf_profile():
    """
    Profile the full verification suite on generated instances.
    """
    documents = [
        generators.generate_random(generators.GeneratorKind.PAIR, 5, seed=seed)
        for seed in range(3)
    ]
    suite.run_suite(suite.Command.ALL, documents)


if __name__ == "__main__":
    perf_profile()
