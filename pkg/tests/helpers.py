"""Independent oracles shared by the unit and acceptance suites.

The OLS oracle deliberately avoids the library's QR path: it solves the
normal equations directly and applies the textbook inference formulas.
"""
from __future__ import annotations

import numpy as np
import scipy.stats


def ols_normal_equation_oracle(X, y, ci_level=0.95):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    xtx = X.T @ X
    beta = np.linalg.solve(xtx, X.T @ y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    df = n - p
    s2 = rss / df
    cov = s2 * np.linalg.inv(xtx)
    se = np.sqrt(np.diag(cov))
    t = beta / se
    pvals = 2.0 * scipy.stats.t.sf(np.abs(t), df)
    # centered total sum of squares: oracle problems always carry an intercept
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df
    fstat = ((tss - rss) / (p - 1)) / s2
    tcrit = scipy.stats.t.ppf(1.0 - (1.0 - ci_level) / 2.0, df)
    return {
        "coef": beta, "se": se, "t": t, "p": pvals, "r2": r2, "adj_r2": adj_r2,
        "fstat": fstat, "ci_low": beta - tcrit * se, "ci_high": beta + tcrit * se,
    }


def random_ols_problem(rng, max_n=200, max_p=8):
    """A well-conditioned random regression problem with an intercept column."""
    p = int(rng.integers(2, max_p + 1))
    n = int(rng.integers(p + 5, max_n + 1))
    X = np.concatenate([np.ones((n, 1)), rng.normal(0, 1, size=(n, p - 1))], axis=1)
    beta = rng.normal(0, 2, size=p)
    y = X @ beta + rng.normal(0, 0.7, size=n)
    names = [f"x{j}" for j in range(p)]
    return names, X, y


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(b), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def synthetic_two_effect_dataset(seed, n_users=40, n_items=8, n_rows=100_000,
                                 user_weight=0.6, item_weight=0.2):
    """Ratings driven by standardized user and item traits with known weights.

    Both traits are balanced +/-1 assignments, so the realized trait vectors
    are standardized exactly (mean 0, sd 1) and the stated weights really are
    the coefficients on the standardized covariates; with z^2 identically 1
    the multinomial rating counts cannot perturb the in-sample scale either.
    The continuous score s = 1 + w_u * z_user + w_i * z_item + noise stays
    inside (0, 2), and probabilistic rounding (floor plus a Bernoulli on the
    fractional part) maps s to an ordinal rating with E[rating | s] = s
    exactly, so discretization adds noise without moving the population
    regression coefficients off (w_u, w_i).
    """
    from ratelab.rating_analytics import Dataset, RatingRecord

    assert n_users % 2 == 0 and n_items % 2 == 0
    assert user_weight + item_weight + 0.05 < 1.0
    rng = np.random.default_rng(seed)
    z_u = rng.permutation(np.repeat([-1.0, 1.0], n_users // 2))
    z_i = rng.permutation(np.repeat([-1.0, 1.0], n_items // 2))
    users = rng.integers(0, n_users, size=n_rows)
    items = rng.integers(0, n_items, size=n_rows)
    eps = rng.uniform(-0.05, 0.05, size=n_rows)
    s = 1.0 + user_weight * z_u[users] + item_weight * z_i[items] + eps
    base = np.floor(s)
    ratings = (base + (rng.random(n_rows) < (s - base))).astype(np.int64)
    records = [
        RatingRecord(user_id=f"u{u:03d}", item_id=f"i{i:03d}", rating=int(r), timestamp=j)
        for j, (u, i, r) in enumerate(zip(users, items, ratings))
    ]
    return Dataset(records)


def mf_objective(mu, bu, bi, pu, qi, r, l2):
    """Per-sample training objective of the latent-factor model."""
    pred = mu + bu + bi + float(pu @ qi)
    return (r - pred) ** 2 + l2 * (bu ** 2 + bi ** 2 + float(pu @ pu) + float(qi @ qi))


def mf_step_gradient(rec, user, item, rating):
    """Gradient implied by one SGD step: (old - new) / lr, over touched params."""
    lr = rec.hp.learning_rate
    before = (rec.global_bias, rec.user_bias.copy(), rec.item_bias.copy(),
              rec.user_vecs.copy(), rec.item_vecs.copy())
    rec.sgd_step(user, item, rating)
    g_mu = (before[0] - rec.global_bias) / lr
    g_bu = (before[1][user] - rec.user_bias[user]) / lr
    g_bi = (before[2][item] - rec.item_bias[item]) / lr
    g_pu = (before[3][user] - rec.user_vecs[user]) / lr
    g_qi = (before[4][item] - rec.item_vecs[item]) / lr
    # restore so callers can reuse the model state
    rec.global_bias = before[0]
    rec.user_bias, rec.item_bias = before[1], before[2]
    rec.user_vecs, rec.item_vecs = before[3], before[4]
    return np.concatenate([[g_mu, g_bu, g_bi], g_pu, g_qi])


def mf_fd_gradient(rec, user, item, rating, h=1e-6):
    """Central finite-difference gradient of the same per-sample objective."""
    mu = rec.global_bias
    bu = float(rec.user_bias[user])
    bi = float(rec.item_bias[item])
    pu = rec.user_vecs[user].copy()
    qi = rec.item_vecs[item].copy()
    l2 = rec.hp.l2
    theta = np.concatenate([[mu, bu, bi], pu, qi])

    def f(vec):
        d = len(pu)
        return mf_objective(vec[0], vec[1], vec[2], vec[3:3 + d], vec[3 + d:],
                            rating, l2)

    grad = np.zeros_like(theta)
    for j in range(len(theta)):
        step = h * max(1.0, abs(theta[j]))
        up, dn = theta.copy(), theta.copy()
        up[j] += step
        dn[j] -= step
        grad[j] = (f(up) - f(dn)) / (2 * step)
    return grad
