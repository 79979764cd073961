"""Link functions, the link constant E[F(Z)Z], signals, and data generation.

The data model is binary single-index: x ~ N(0, I_p) and the conditional
mean of the +-1 response is E[y|x] = F(x'beta), where F maps the index to
[-1, 1].  Four built-in links are provided (all odd and nondecreasing), plus
user-tabulated monotone piecewise-linear links.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .errors import InvalidSparsity, LinkRangeError, NonPositiveLambda

LINK_KINDS = ("linear", "logistic", "probit", "sign", "tabulated")

QUADRATURE = "quadrature"
MONTE_CARLO = "mc"

EQUAL_MAGNITUDE = "equal"
RANDOM_MAGNITUDE = "random"


@dataclass(frozen=True)
class LinkFunction:
    """Conditional-mean function F with F(t) in [-1, 1].

    The "linear" kind (F(t) = t) is exempt from the range bound; it exists
    for noiseless real-valued regression used to force exact solver answers.

    Tabulated links are monotone piecewise-linear: ascending knots with
    values in [-1, 1], extended by constants beyond the outermost knots.
    """

    kind: str
    knots: np.ndarray | None = field(default=None)
    values: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.kind not in LINK_KINDS:
            raise ValueError(f"unknown link kind {self.kind!r}; expected one of {LINK_KINDS}")
        if self.kind == "tabulated":
            if self.knots is None or self.values is None:
                raise ValueError("tabulated link needs knots and values")
            knots = np.asarray(self.knots, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if knots.ndim != 1 or knots.shape != values.shape or knots.size < 2:
                raise ValueError("knots/values must be 1-d arrays of equal length >= 2")
            if not np.all(np.diff(knots) > 0):
                raise ValueError("knots must be strictly ascending")
            if np.any(np.abs(values) > 1.0):
                raise LinkRangeError("tabulated link values must lie in [-1, 1]")
            if np.any(np.diff(values) < 0):
                raise ValueError("tabulated link must be monotone nondecreasing")
            object.__setattr__(self, "knots", knots)
            object.__setattr__(self, "values", values)
        elif self.knots is not None or self.values is not None:
            raise ValueError("knots/values are only valid for tabulated links")

    @property
    def is_binary_valid(self) -> bool:
        """True when the range is inside [-1, 1], i.e. valid for +-1 responses."""
        return self.kind != "linear"

    def __call__(self, t):
        return link_mean(self, t)


LINEAR = LinkFunction("linear")
LOGISTIC = LinkFunction("logistic")
PROBIT = LinkFunction("probit")
SIGN = LinkFunction("sign")

_BUILTIN = {"linear": LINEAR, "logistic": LOGISTIC, "probit": PROBIT, "sign": SIGN}


def get_link(name: str) -> LinkFunction:
    """Look up a built-in link by its lowercase name."""
    try:
        return _BUILTIN[name]
    except KeyError:
        raise ValueError(f"unknown link {name!r}; expected one of {sorted(_BUILTIN)}") from None


def tabulated_link(knots, values) -> LinkFunction:
    """Build a monotone piecewise-linear link from a (knots, values) table."""
    return LinkFunction("tabulated", np.asarray(knots, float), np.asarray(values, float))


def link_mean(link: LinkFunction, t):
    """Evaluate F(t), vectorized over t.

    logistic: tanh(t/2), i.e. 2 e^t / (1 + e^t) - 1
    probit:   2 Phi(t) - 1, computed as erf(t / sqrt(2)) so that the float
              implementation is exactly odd
    sign:     sign(t) with F(0) = 0
    linear:   t
    """
    t = np.asarray(t, dtype=float)
    if link.kind == "linear":
        out = t
    elif link.kind == "logistic":
        out = np.tanh(0.5 * t)
    elif link.kind == "probit":
        out = erf(t / np.sqrt(2.0))
    elif link.kind == "sign":
        out = np.sign(t)
    else:
        out = np.interp(t, link.knots, link.values)
    if out.ndim == 0:
        return float(out)
    return out


def _lambda_gauss_hermite(link: LinkFunction, nodes: int) -> float:
    # E[F(Z)Z] with Z ~ N(0,1): substitute z = sqrt(2) u against weight e^{-u^2}.
    u, w = np.polynomial.hermite.hermgauss(nodes)
    z = np.sqrt(2.0) * u
    return float(np.sum(w * link_mean(link, z) * z) / np.sqrt(np.pi))


def _lambda_piecewise_exact(pieces) -> float:
    """Integrate F(z) z phi(z) exactly for piecewise-linear F.

    `pieces` is a list of (a, b, c, d) with F(z) = c + d z on [a, b]
    (a = -inf / b = +inf allowed).  Uses
        int_a^b z phi(z) dz   = phi(a) - phi(b)
        int_a^b z^2 phi(z) dz = Phi(b) - Phi(a) + a phi(a) - b phi(b)
    with phi, Phi the standard normal density and CDF.
    """

    def pdf(z):
        if np.isinf(z):
            return 0.0
        return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)

    def cdf(z):
        if z == -np.inf:
            return 0.0
        if z == np.inf:
            return 1.0
        return 0.5 * (1.0 + erf(z / np.sqrt(2.0)))

    total = 0.0
    for a, b, c, d in pieces:
        zp = pdf(a) - pdf(b)
        m2 = cdf(b) - cdf(a) + (a * pdf(a) if np.isfinite(a) else 0.0) - (
            b * pdf(b) if np.isfinite(b) else 0.0
        )
        total += c * zp + d * m2
    return total


def _link_pieces(link: LinkFunction):
    if link.kind == "sign":
        return [(-np.inf, 0.0, -1.0, 0.0), (0.0, np.inf, 1.0, 0.0)]
    knots, values = link.knots, link.values
    pieces = [(-np.inf, knots[0], values[0], 0.0)]
    for i in range(knots.size - 1):
        d = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i])
        c = values[i] - d * knots[i]
        pieces.append((knots[i], knots[i + 1], c, d))
    pieces.append((knots[-1], np.inf, values[-1], 0.0))
    return pieces


def compute_lambda(link: LinkFunction, method: str = QUADRATURE, budget: int = 64,
                   seed: int = 0) -> float:
    """Compute the link constant lambda = E[F(Z)Z], Z ~ N(0,1).

    method="quadrature": Gauss-Hermite with `budget` nodes under z = sqrt(2) u
    for the smooth links; the sign link and tabulated links have a kink, where
    a fixed-node rule stalls at ~1e-3 accuracy, so those integrate their
    piecewise-linear segments in closed form (exact).  method="mc" averages
    `budget` i.i.d. samples (see compute_lambda_mc for the standard error).

    Raises NonPositiveLambda when the result is <= 0: the estimator theory
    needs lambda > 0, which every monotone nondecreasing odd link satisfies.
    """
    if method == QUADRATURE:
        if budget < 32:
            raise ValueError("quadrature budget must be >= 32 nodes")
        if link.kind in ("sign", "tabulated"):
            value = _lambda_piecewise_exact(_link_pieces(link))
        else:
            value = _lambda_gauss_hermite(link, budget)
    elif method == MONTE_CARLO:
        value, _ = compute_lambda_mc(link, budget, seed)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'quadrature' or 'mc'")
    if value <= 0.0:
        raise NonPositiveLambda(f"lambda = {value} <= 0 for link {link.kind!r}")
    return value


def compute_lambda_mc(link: LinkFunction, budget: int = 1_000_000,
                      seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of lambda with its standard error.

    This is the independent cross-check for the quadrature path; it is never
    the default.  Returns (estimate, stderr).
    """
    if budget < 10_000:
        raise ValueError("Monte Carlo budget must be >= 10000 samples")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(budget)
    v = link_mean(link, z) * z
    mean = float(v.mean())
    sumsq = float(v @ v)  # single-pass second moment; avoids std()'s extra temporaries
    var = max(sumsq - budget * mean * mean, 0.0) / (budget - 1)
    return mean, float(np.sqrt(var / budget))


@dataclass(frozen=True)
class TrueSignal:
    """Ground-truth coefficient vector: s-sparse, unit l2 norm.

    Unit l2 norm plus s-sparsity give ||beta||_1 <= sqrt(s) automatically
    (Cauchy-Schwarz), which is the effective-sparsity budget the l1 radius
    rules are calibrated against.
    """

    beta: np.ndarray
    p: int
    s: int
    support: np.ndarray


def make_signal(p: int, s: int, mode: str = RANDOM_MAGNITUDE, seed: int = 0) -> TrueSignal:
    """Draw an s-sparse unit-norm signal with uniformly random support.

    mode="equal": each nonzero is +-1/sqrt(s) with random signs.
    mode="random": nonzeros are i.i.d. standard normal, then normalized.
    """
    if s < 1 or s > p:
        raise InvalidSparsity(f"need 1 <= s <= p, got s={s}, p={p}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(p, size=s, replace=False))
    beta = np.zeros(p)
    if mode == EQUAL_MAGNITUDE:
        signs = np.where(rng.random(s) < 0.5, -1.0, 1.0)
        beta[support] = signs / np.sqrt(s)
    elif mode == RANDOM_MAGNITUDE:
        vals = rng.standard_normal(s)
        while np.linalg.norm(vals) == 0.0:  # never in practice; keeps the contract total
            vals = rng.standard_normal(s)
        beta[support] = vals / np.linalg.norm(vals)
    else:
        raise ValueError(f"unknown signal mode {mode!r}; expected 'equal' or 'random'")
    return TrueSignal(beta=beta, p=p, s=s, support=support)


@dataclass(frozen=True)
class Dataset:
    """Design matrix X (n rows of p features) plus response vector y.

    y is +-1 for binary links and real-valued in the linear regression mode.
    link_kind and seed record provenance only.
    """

    X: np.ndarray
    y: np.ndarray
    n: int
    link_kind: str
    seed: int


def generate_dataset(signal: TrueSignal, n: int, link: LinkFunction, seed: int) -> Dataset:
    """Sample a dataset from the single-index model with Gaussian design.

    X entries are i.i.d. N(0,1).  For binary links, y_i = +1 with probability
    (1 + F(x_i'beta))/2 so that E[y_i | x_i] = F(x_i'beta); the sign link is
    thereby deterministic except on the null event x_i'beta = 0.  The linear
    link produces y = X beta exactly (noiseless regression mode).
    Fully deterministic given (signal, n, link, seed).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, signal.p))
    t = X @ signal.beta
    if link.kind == "linear":
        y = t.copy()
    else:
        f = np.asarray(link_mean(link, t))
        if np.any(np.abs(f) > 1.0):
            raise LinkRangeError(
                f"link {link.kind!r} returned |F| = {np.max(np.abs(f))} > 1"
            )
        y = np.where(rng.random(n) < 0.5 * (1.0 + f), 1.0, -1.0)
    return Dataset(X=X, y=y, n=n, link_kind=link.kind, seed=seed)
