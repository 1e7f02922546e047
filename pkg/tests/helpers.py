import math

import numpy as np

from ifccr.model import (
    BetaSplit,
    DiscreteChannel,
    GaussianChannel,
    Pentagon,
    ProductInputDistribution,
    RawGaussianChannel,
    Th1Distribution,
)


def cgauss(rng, scale=1.0):
    return complex(rng.normal(0, scale), rng.normal(0, scale))


def random_gaussian_channel(rng, cross_complex=True):
    mags = rng.uniform(0, 3, size=4)
    if cross_complex:
        h12, h21 = cgauss(rng, 1.5), cgauss(rng, 1.5)
    else:
        h12, h21 = rng.uniform(0, 5, size=2)
    return GaussianChannel(h11=mags[0], h12=h12, h1c=mags[1], h21=h21, h22=mags[2], h2c=mags[3])


def random_symmetric_channel(rng):
    hc = rng.uniform(0, 3)
    h11, h12, h21, h22 = rng.uniform(0, 5, size=4)
    return GaussianChannel(h11=h11, h12=h12, h1c=hc, h21=h21, h22=h22, h2c=hc)


def random_raw_channel(rng):
    gains = [cgauss(rng, 1.5) for _ in range(6)]
    p1, p2, pc, s1, s2 = np.exp(rng.uniform(-2, 2, size=5))
    return RawGaussianChannel(*gains, p1=p1, p2=p2, pc=pc, noise1=s1, noise2=s2)


def random_beta(rng, on_sphere=True):
    t = rng.uniform(0, math.pi / 2)
    phi1, phi2 = rng.uniform(0, 2 * math.pi, size=2)
    b = BetaSplit.from_angles(t, phi1, phi2)
    if on_sphere:
        return b
    r = rng.uniform(0, 1)
    return BetaSplit(b.beta1 * r, b.beta2 * r)


def random_discrete_channel(rng, max_size=3, sizes=None):
    if sizes is None:
        sizes = rng.integers(2, max_size + 1, size=5)
    n1, n2, nc, m1, m2 = (int(s) for s in sizes)
    t = rng.dirichlet(np.ones(m1 * m2), size=(n1, n2, nc))  # (n1, n2, nc, m1*m2)
    t = t.reshape(n1, n2, nc, m1, m2).transpose(3, 4, 0, 1, 2)
    return DiscreteChannel(t)


def random_product(rng, sizes, alpha=1.0):
    n1, n2, nc = sizes
    pc = rng.dirichlet(np.full(nc, alpha), size=(n1, n2)).transpose(2, 0, 1)
    return ProductInputDistribution(rng.dirichlet(np.full(n1, alpha)), rng.dirichlet(np.full(n2, alpha)), pc)


def random_th1(rng, sizes, nq=2, k1=2, k2=2):
    q = rng.dirichlet(np.ones(nq))
    inputs = tuple(random_product(rng, sizes) for _ in range(nq))
    n1, n2, nc = sizes
    u = rng.dirichlet(np.ones(k1 * k2), size=(n1, n2, nc, nq))
    u = u.reshape(n1, n2, nc, nq, k1, k2).transpose(4, 5, 0, 1, 2, 3)
    return Th1Distribution(q, inputs, u)


def random_pentagon(rng, second_sum=None):
    a, b = rng.uniform(0, 3, size=2)
    c = rng.uniform(0, a + b + 1)
    if second_sum is None:
        second_sum = rng.random() < 0.3
    c2 = rng.uniform(0, a + b + 1) if second_sum else None
    return Pentagon(a, b, c, c2)
