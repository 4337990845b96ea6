"""Classical randomness hiding inside bosonic field observables.

Commuting quadrature families evaluated in a coherent state form an
ordinary Gaussian random field whose covariance is the Gram matrix of the
smearing vectors.  Number-like observables instead produce compound-Poisson
statistics, with one Poisson clock per eigenvalue of the generating matrix.
Both laws are sampled and compared against their exact moments, and a
group-invariant kernel is factored into vectors that realize it as a Gram
matrix.
"""

import numpy as np

from quasifree.fields import (
    KernelModel,
    coherent_gaussian_field,
    gns_factor,
    levy_law,
    sample,
    vacuum_field_variance,
)


def main():
    count = 50_000

    print("Gaussian field from a coherent state")
    gen = np.random.Generator(np.random.Philox(1))
    u0 = gen.normal(size=3) + 1j * gen.normal(size=3)
    us = [np.array([1.0, 0.0, 0.0]), np.array([0.5, 0.5, 0.0]),
          np.array([0.0, 0.0, 2.0])]
    law = coherent_gaussian_field(u0, us)
    print("  means:", np.round(law.mean, 4))
    print("  covariance (= Gram matrix):\n", np.round(law.covariance, 4))
    draws = sample(law, count, seed=21)
    print("  empirical means:", np.round(draws.mean(axis=0), 4))
    print("  worst mean gap:",
          f"{np.abs(draws.mean(axis=0) - law.mean).max():.4f}",
          f"(3-sigma band {3 * np.sqrt(law.covariance.diagonal().max() / count):.4f})")

    print("\ncompound-Poisson law of a number-like observable")
    H = np.diag([1.0, -2.0, 0.5])
    u = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
    jump = levy_law(H, u)
    print("  atoms (value, rate):", jump.atoms)
    print("  mean", jump.mean, " variance", jump.variance)
    jdraws = sample(jump, count, seed=22)
    print("  empirical mean", round(jdraws.mean(), 4),
          " empirical variance", round(jdraws.var(), 4))
    ts = np.linspace(-3, 3, 7)
    ecf = np.exp(1j * np.outer(ts, jdraws)).mean(axis=1)
    print("  max characteristic-function gap:",
          f"{np.abs(ecf - jump.characteristic_function(ts)).max():.4f}")

    print("\nfactoring a shift-invariant kernel on 5 points")
    N = 5
    base = np.array([[np.exp(-min(abs(i - j), N - abs(i - j))) for j in range(N)]
                     for i in range(N)])
    shift = tuple((i + 1) % N for i in range(N))
    model = KernelModel(points=tuple(range(N)), K=base, group=(shift,))
    F = gns_factor(model)
    print("  Gram identity residual:",
          f"{np.abs(F.conj().T @ F - model.K).max():.2e}")
    z = gen.normal(size=N) + 1j * gen.normal(size=N)
    zs = np.empty_like(z)
    zs[np.asarray(shift)] = z
    print("  vacuum variance of a combined quadrature:",
          round(vacuum_field_variance(z, model), 6))
    print("  ... invariant under the shift:",
          round(vacuum_field_variance(zs, model), 6))


if __name__ == "__main__":
    main()
