"""Lemma-2 penalty on the sparse-vote construction, evaluated in closed form.

Every point has Delta = 1-theta with probability theta and Delta = theta
otherwise, so all expectations over S collapse to one point.
"""
from mpmath import mp, mpf, log, e

mp.dps = 50


def lemma2_sparse(theta, m):
    theta = mpf(theta)
    r = log(16 * mpf(m), 2)
    pw = theta * (1 - theta) ** r + (1 - theta) * theta ** r
    norm = pw ** (1 / r)
    sq = theta * (1 - theta) ** 2 + (1 - theta) * theta ** 2
    moment = sq
    return r * max(256 / theta * norm, 100 / theta, 128 * e / theta**2 * moment)


if __name__ == "__main__":
    for theta, m in ((0.1, 1024), (0.25, 1000), (0.05, 64)):
        print(theta, m, mp.nstr(lemma2_sparse(theta, m), 20))
