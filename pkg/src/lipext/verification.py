"""Instance generators and finite-scale certification of the extension claims.

Every check is an exhaustive enumeration over the finite instance. A
check reports its worst margin (positive means satisfied with slack)
together with the indices attaining it; it passes when the margin is at
least ``-tol`` with ``tol = 1e-9 * (1 + max|g|)`` unless noted otherwise.

On a finite space every point is isolated, so the limiting slopes all
vanish. The checks therefore quantify over actual pairs of points at
every scale instead of over sequences converging to a point, and the
slack sequence of the limit argument is set to zero: infima over ``C`` are
attained minima.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .epsseq import EpsilonSequence
from .errors import BadSpec, InstanceMismatch, VariantMismatch
from .extension import ExtensionResult, extend_descending
from .lipconst import auto_radii, lip_global, profile
from .metric import FiniteMetricSpace, SubsetFunction, from_graph, from_points, subset_function

CLAIM_IDS = (
    "claim1", "claim2", "claim3", "claim4", "claim4gap", "claim5",
    "step6_slope_bound", "descending_bound", "duality", "profile_lower_bound",
)

DEFAULT_CLAIMS = {
    "mcshane": ("claim3", "profile_lower_bound"),
    "slope": ("claim1", "claim2", "claim3", "claim4", "claim4gap", "claim5",
              "step6_slope_bound", "profile_lower_bound"),
    "descending": ("claim1", "claim2", "claim3", "descending_bound", "profile_lower_bound"),
    "ascending": ("claim1", "claim2", "claim3", "descending_bound", "duality",
                  "profile_lower_bound"),
}

# checks that read f through the construction itself, so clamping voids them
_UNCLAMPED_ONLY = {"claim4", "claim4gap", "duality"}

PROFILE_KIND = {"mcshane": "slope", "slope": "slope",
                "descending": "descending", "ascending": "ascending"}

REPORT_NOTE = (
    "finite instance: every point is isolated, so checks quantify over actual "
    "point pairs at every scale instead of limits; attained minima replace the "
    "slack sequence (eta = 0)"
)


# ---------------------------------------------------------------- instances

@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    space: FiniteMetricSpace
    subset: SubsetFunction
    anchor: float | None = None
    params: dict = field(default_factory=dict)

    def __iter__(self):
        # allows ``space, subset = make_instance(...)``
        return iter((self.space, self.subset))


def t3() -> Instance:
    """Three collinear points, ``C = {0, 2}``, ``g = (0, 1)``."""
    space = from_points([0.0, 1.0, 2.0])
    return Instance("t3", space, subset_function(space, [0, 2], [0.0, 1.0]))


def example21(N: int = 20, samples_per_segment: int = 5) -> Instance:
    """``{0}`` plus sampled segments ``[1/n, 1/n + 1/n^2]``, ``g = x - 1/n``.

    The pointed constant at 0 over a ball reaching segment ``n`` is
    ``1/(n+1)`` while each segment alone has constant 1.
    """
    if N < 1 or samples_per_segment < 2:
        raise BadSpec("example21 needs N >= 1 and at least 2 samples per segment")
    xs, gs = [0.0], [0.0]
    for n in range(1, N + 1):
        a = 1.0 / n
        seg = np.linspace(a, a + 1.0 / n**2, samples_per_segment)
        xs.extend(seg.tolist())
        gs.extend((seg - a).tolist())
    order = np.argsort(xs)
    xs = np.asarray(xs)[order]
    gs = np.asarray(gs)[order]
    space = from_points(xs)
    subset = subset_function(space, np.arange(space.n), gs)
    return Instance("example21", space, subset,
                    params={"N": N, "samples_per_segment": samples_per_segment})


def example22(h: float = 0.01) -> Instance:
    """Grid of step ``h`` on ``[-1, 2]``; ``g = 0`` on ``[-1, 0]``, 1 on ``[1, 2]``.

    Anchored at 1 so that the unit gap sits exactly on a scale.
    """
    m = int(round(1.0 / h))
    if m < 1 or abs(m * h - 1.0) > 1e-9:
        raise BadSpec(f"example22 needs h = 1/m for an integer m, got {h!r}")
    i = np.arange(3 * m + 1)
    coords = (i - m) * (1.0 / m)
    space = from_points(coords)
    left = i <= m
    right = i >= 2 * m
    idx = i[left | right]
    vals = np.where(idx >= 2 * m, 1.0, 0.0)
    return Instance("example22", space, subset_function(space, idx, vals), anchor=1.0,
                    params={"h": h})


GEOMETRIES = ("points1", "points2", "points3", "graph")


def random_instance(seed: int, n: int = 40, c_size: int = 20, geometry: str = "auto") -> Instance:
    """Random space with a ``C`` of size ``c_size``.

    ``g`` is the McShane extension of a few random seed values, so its
    Lipschitz constant is finite and known in advance.
    """
    if n < 1 or not 1 <= c_size <= n:
        raise BadSpec(f"need 1 <= c_size <= n, got n={n}, c_size={c_size}")
    rng = np.random.default_rng(seed)
    if geometry == "auto":
        geometry = GEOMETRIES[seed % len(GEOMETRIES)]
    if geometry.startswith("points"):
        dim = int(geometry[-1])
        space = from_points(rng.uniform(0.0, 1.0, size=(n, dim)))
    elif geometry == "graph":
        edges = [(i, int(rng.integers(0, i)), float(rng.uniform(0.1, 1.0))) for i in range(1, n)]
        for _ in range(n // 2):
            u, v = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
            edges.append((int(u), int(v), float(rng.uniform(0.1, 1.0))))
        space = from_graph(n, edges)
    else:
        raise BadSpec(f"unknown geometry {geometry!r}; choose from {GEOMETRIES}")
    C = np.sort(rng.choice(n, size=c_size, replace=False))
    seeds = rng.choice(n, size=max(1, c_size // 3), replace=False)
    seed_vals = rng.uniform(-1.0, 1.0, size=seeds.size)
    slope = rng.uniform(0.5, 2.0)
    g = (seed_vals[:, None] + slope * space.dist[seeds][:, C]).min(axis=0)
    return Instance("random", space, subset_function(space, C, g),
                    params={"seed": seed, "n": n, "c_size": c_size, "geometry": geometry})


def make_instance(name: str, **params) -> Instance:
    makers = {"t3": t3, "example21": example21, "example22": example22,
              "random": random_instance}
    if name not in makers:
        raise BadSpec(f"unknown instance {name!r}; choose from {sorted(makers)}")
    try:
        return makers[name](**params)
    except TypeError as exc:
        raise BadSpec(str(exc)) from None


# ---------------------------------------------------------------- reports

@dataclass
class ClaimResult:
    passed: bool
    margin: float | None
    witness: tuple | None
    vacuous: bool = False

    def to_dict(self) -> dict:
        return {"pass": bool(self.passed), "margin": self.margin,
                "witness": list(self.witness) if self.witness is not None else None,
                "vacuous": self.vacuous}


@dataclass
class ClaimReport:
    claims: dict[str, ClaimResult]
    tol: float
    note: str = REPORT_NOTE

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims.values())

    def __getitem__(self, claim_id: str) -> ClaimResult:
        return self.claims[claim_id]

    def to_dict(self) -> dict:
        return {cid: c.to_dict() for cid, c in self.claims.items()}


def tolerance(subset: SubsetFunction) -> float:
    return 1e-9 * (1.0 + float(np.abs(subset.values).max()))


class _Worst:
    """Running minimum of margins with the witness that attains it."""

    def __init__(self):
        self.margin = None
        self.witness = None

    def update(self, margins: np.ndarray, witness_of) -> None:
        if margins.size == 0:
            return
        i = int(np.argmin(margins))
        m = float(margins.flat[i])
        if self.margin is None or m < self.margin:
            self.margin = m
            self.witness = tuple(int(w) for w in witness_of(np.unravel_index(i, margins.shape)))

    def result(self, tol: float) -> ClaimResult:
        if self.margin is None:
            return ClaimResult(True, None, None, vacuous=True)
        return ClaimResult(self.margin >= -tol, self.margin, self.witness)


def bracket_array(seq: EpsilonSequence, t: np.ndarray, offset: int = 0) -> np.ndarray:
    """Vectorized :meth:`EpsilonSequence.bracket` for positive ``t``."""
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return np.zeros(t.shape, dtype=np.int64)
    m_lo = seq.bracket(float(t.min()), 0) - 1
    m_hi = seq.bracket(float(t.max()), 0) + 1
    E = np.array([seq.eps(m) for m in range(m_lo, m_hi + 1)])
    return m_lo + np.searchsorted(E, t, side="right") - offset


def _eps_array(seq: EpsilonSequence, ks: np.ndarray) -> np.ndarray:
    cache = {int(k): seq.eps(int(k)) for k in np.unique(ks)}
    return np.vectorize(cache.__getitem__, otypes=[float])(ks) if ks.size else np.zeros(ks.shape)


def _ratio_array(seq: EpsilonSequence, ks: np.ndarray) -> np.ndarray:
    cache = {int(k): seq.ratio(int(k)) for k in np.unique(ks)}
    return np.vectorize(cache.__getitem__, otypes=[float])(ks) if ks.size else np.zeros(ks.shape)


def _S_array(table, ks: np.ndarray) -> np.ndarray:
    cache = {int(k): table.at(int(k)) for k in np.unique(ks)}
    return np.vectorize(cache.__getitem__, otypes=[float])(ks) if ks.size else np.zeros(ks.shape)


# ---------------------------------------------------------------- checks

def _construction(result: ExtensionResult, subset: SubsetFunction):
    """The (variant, subset, f) the phi family is built from.

    An ascending result is the negation of a descending construction on
    ``-g``; its construction-level checks run on that dual.
    """
    if result.variant == "ascending":
        return "descending", -subset, -result.f
    return result.variant, subset, result.f


def _check_claim1(space, subset, result, tol):
    variant, sub, _ = _construction(result, subset)
    res = result.dual if result.variant == "ascending" else result
    phi = res.phi_matrix(space, sub)
    bound = (result.params.L + result.params.eps_eff) * space.dist
    w = _Worst()
    for i, x in enumerate(sub.indices):
        row = phi[i]
        w.update(bound - np.abs(row[:, None] - row[None, :]),
                 lambda ij, x=x: (x, ij[0], ij[1]))
    return w.result(tol)


def _check_claim2(space, subset, result, tol):
    variant, sub, _ = _construction(result, subset)
    res = result.dual if result.variant == "ascending" else result
    phi = res.phi_matrix(space, sub)
    C = sub.indices
    L = result.params.L
    w = _Worst()
    if C.size < 2:
        return w.result(tol)
    D = space.dist[np.ix_(C, C)]
    off = ~np.eye(C.size, dtype=bool)
    k = np.zeros(D.shape, dtype=np.int64)
    k[off] = bracket_array(result.seq, D[off], 0)
    e = np.where(off, _eps_array(result.seq, k - 2), 0.0)
    phiC = phi[:, C]
    gy = sub.values[None, :]
    if variant == "slope":
        margins = phiC - gy - e * L
    else:
        margins = gy - e * L - phiC
    w.update(np.where(off, margins, np.inf), lambda ij: (C[ij[0]], C[ij[1]]))
    return w.result(tol)


def _check_claim3(space, subset, result, tol):
    f = result.f
    C = subset.indices
    w = _Worst()
    w.update(-np.abs(f[C] - subset.values), lambda i: (C[i[0]],))
    bound = (result.params.L + result.params.eps_eff) * space.dist
    w.update(bound - np.abs(f[:, None] - f[None, :]), lambda ij: (ij[0], ij[1]))
    return w.result(tol)


def _claim4_scales(space, seq, xbar):
    """Every scale at which some ball around ``xbar`` changes.

    Starts where ``B_{eps_k}(xbar)`` holds ``xbar`` alone and ends once
    ``B_{eps_{k-2}}(xbar)`` covers X. This contains every ``k`` with
    ``eps_{k-2} >= min positive distance``.
    """
    d = space.dist[xbar]
    d = d[d > 0]
    if d.size == 0:
        return range(0)
    k_lo = seq.bracket(float(d.min()), 0) - 1
    k_hi = seq.bracket(float(d.max()), 0) + 2
    return range(k_lo, k_hi + 1)


def _check_claim4(space, subset, result, tol, gap: bool):
    phi = result.phi_matrix(space, subset)
    C = subset.indices
    f = result.f
    L = result.params.L
    seq = result.seq
    w = _Worst()
    for xbar in C:
        dC = space.dist[xbar, C]
        for k in _claim4_scales(space, seq, xbar):
            Y = np.flatnonzero(space.dist[xbar] < seq.eps(k - 2))
            inside = dC < seq.eps(k)
            if gap:
                out = np.flatnonzero(~inside)
                if out.size == 0:
                    continue
                margins = phi[np.ix_(out, Y)] - f[Y][None, :] - seq.eps(k - 1) * L / 3.0
                w.update(margins, lambda ij, k=k, out=out, Y=Y, xbar=xbar:
                         (xbar, k, C[out[ij[0]]], Y[ij[1]]))
            else:
                local = phi[np.ix_(np.flatnonzero(inside), Y)].min(axis=0)
                # local >= f always; equality is the claim
                w.update(f[Y] - local, lambda i, k=k, Y=Y, xbar=xbar: (xbar, k, Y[i[0]]))
    return w.result(tol)


def _check_claim5(space, subset, result, tol):
    phi = result.phi_matrix(space, subset)
    C = subset.indices
    g = subset.values
    seq = result.seq
    w = _Worst()
    for iz, z in enumerate(C):
        above = np.flatnonzero(g > g[iz])
        if above.size == 0:
            continue
        dxz = space.dist[C[above], z]
        j = bracket_array(seq, dxz, 0)
        e = _eps_array(seq, j - 2)
        slope = (g[above] - g[iz]) / ((1.0 - e / dxz) * dxz)
        dyz = space.dist[z][None, :]
        psi = np.where(dyz <= e[:, None], g[iz], g[iz] + slope[:, None] * (dyz - e[:, None]))
        margins = phi[iz][None, :] - psi
        w.update(margins, lambda ij, above=above, z=z: (C[above[ij[0]]], z, ij[1]))
    return w.result(tol)


def _pair_grid(space, C):
    """``(xbar, y, t)`` over ``xbar`` in ``C`` and ``y != xbar``."""
    xb = np.repeat(C, space.n)
    y = np.tile(np.arange(space.n), C.size)
    keep = xb != y
    xb, y = xb[keep], y[keep]
    return xb, y, space.dist[xb, y]


def _check_step6(space, subset, result, tol):
    C = subset.indices
    f = result.f
    seq = result.seq
    L = result.params.L
    w = _Worst()
    xb, y, t = _pair_grid(space, C)
    if t.size == 0:
        return w.result(tol)
    k = bracket_array(seq, t, -2)
    near = _S_array_by_point(result, xb, k - 1) + 3.0 * L * _ratio_array(seq, k - 2)
    far = _S_array_by_point(result, xb, k) / (1.0 - seq.rho)
    bound = np.maximum(near, far)
    margins = bound - np.abs(f[y] - f[xb]) / t
    w.update(margins, lambda i: (xb[i[0]], y[i[0]]))
    return w.result(tol)


def _S_array_by_point(result, xb, ks):
    out = np.empty(ks.shape)
    for x in np.unique(xb):
        sel = xb == x
        out[sel] = _S_array(result.penalties[int(x)].table, ks[sel])
    return out


def _check_descending_bound(space, subset, result, tol):
    _, sub, f = _construction(result, subset)
    C = sub.indices
    seq = result.seq
    L = result.params.L
    w = _Worst()
    xb, y, t = _pair_grid(space, C)
    if t.size == 0:
        return w.result(tol)
    k = bracket_array(seq, t, -1)
    bound = _S_array_by_point(result, xb, k) + 3.0 * L * _ratio_array(seq, k - 1)
    margins = bound - np.maximum(f[xb] - f[y], 0.0) / t
    w.update(margins, lambda i: (xb[i[0]], y[i[0]]))
    return w.result(tol)


def _check_duality(space, subset, result):
    p = result.params
    if result.constant:
        ref = np.full(space.n, float(subset.values[0]))
    else:
        ref = -extend_descending(space, -subset, p.eps, p.anchor, p.rule).f
    diff = np.abs(result.f - ref)
    i = int(np.argmax(diff))
    # zero tolerance: the ascending extension is defined as this composition
    return ClaimResult(bool(np.array_equal(result.f, ref)), -float(diff[i]), (i,))


def _profile_pairs(space, subset, result, radii=None):
    kind = PROFILE_KIND[result.variant]
    allX = np.arange(space.n)
    pairs = {}
    for x in subset.indices:
        r = auto_radii(space, int(x)) if radii is None else np.asarray(radii, dtype=float)
        pf = profile(space, allX, result.f, int(x), r, kind)
        pg = profile(space, subset.indices, subset.values, int(x), r, kind)
        pairs[int(x)] = (pf, pg)
    return pairs


def _check_profiles(pairs):
    w = _Worst()
    for x, (pf, pg) in pairs.items():
        w.update(pf.constants - pg.constants, lambda i, x=x, pf=pf: (x, i[0]))
    # zero tolerance: f equals g on C, so the f-ball sees a superset of quotients
    return w.result(0.0)


def _validate(space, subset, result):
    if result.f.shape != (space.n,):
        raise InstanceMismatch(f"result has {result.f.size} values for a space of {space.n} points")
    L = lip_global(space, subset.indices, subset.values)
    if abs(L - result.params.L) > 1e-12 * (1.0 + L):
        raise InstanceMismatch(f"result was built for L={result.params.L!r}, data has L={L!r}")


def applicable_claims(result: ExtensionResult) -> tuple[str, ...]:
    claims = DEFAULT_CLAIMS[result.variant]
    if result.params.clamped:
        claims = tuple(c for c in claims if c not in _UNCLAMPED_ONLY)
    return claims


def check_claims(space: FiniteMetricSpace, subset: SubsetFunction, result: ExtensionResult,
                 which=None, radii=None) -> ClaimReport:
    """Certify the requested claims (default: all that apply to the variant)."""
    _validate(space, subset, result)
    allowed = applicable_claims(result)
    which = allowed if which is None else tuple(which)
    for cid in which:
        if cid not in CLAIM_IDS:
            raise VariantMismatch(f"unknown claim id {cid!r}")
        if cid not in allowed:
            raise VariantMismatch(
                f"claim {cid!r} does not apply to a "
                f"{'clamped ' if result.params.clamped else ''}{result.variant} result")
    tol = tolerance(subset)
    out: dict[str, ClaimResult] = {}
    needs_seq = {"claim1", "claim2", "claim4", "claim4gap", "claim5",
                 "step6_slope_bound", "descending_bound"}
    consistency = [c for c in which if c in ("step6_slope_bound", "descending_bound",
                                             "profile_lower_bound")]
    fragment = {}
    if consistency:
        fragment, _ = slope_consistency(space, subset, result, radii, which=consistency)
    for cid in which:
        if cid in fragment:
            out[cid] = fragment[cid]
        elif cid in needs_seq and result.seq is None:
            out[cid] = ClaimResult(True, None, None, vacuous=True)
        elif cid == "claim1":
            out[cid] = _check_claim1(space, subset, result, tol)
        elif cid == "claim2":
            out[cid] = _check_claim2(space, subset, result, tol)
        elif cid == "claim3":
            out[cid] = _check_claim3(space, subset, result, tol)
        elif cid == "claim4":
            out[cid] = _check_claim4(space, subset, result, tol, gap=False)
        elif cid == "claim4gap":
            out[cid] = _check_claim4(space, subset, result, tol, gap=True)
        elif cid == "claim5":
            out[cid] = _check_claim5(space, subset, result, tol)
        elif cid == "duality":
            out[cid] = _check_duality(space, subset, result)
    return ClaimReport(out, tol)


def slope_consistency(space: FiniteMetricSpace, subset: SubsetFunction,
                      result: ExtensionResult, radii=None, which=None):
    """Finite-scale slope checks and the profile pairs behind them.

    Returns ``(claims, pairs)`` where ``pairs[x] = (profile of f, profile of g)``
    over ``radii`` (default: the auto grid of each point).
    """
    allowed = {"profile_lower_bound"}
    if result.variant == "slope":
        allowed.add("step6_slope_bound")
    elif result.variant in ("descending", "ascending"):
        allowed.add("descending_bound")
    if which is None:
        which = sorted(allowed)
    bad = [c for c in which if c not in allowed]
    if bad:
        raise VariantMismatch(f"{bad} not available for a {result.variant} result")
    tol = tolerance(subset)
    pairs = _profile_pairs(space, subset, result, radii)
    claims = {}
    for cid in which:
        if cid == "profile_lower_bound":
            claims[cid] = _check_profiles(pairs)
        elif result.seq is None:
            claims[cid] = ClaimResult(True, None, None, vacuous=True)
        elif cid == "step6_slope_bound":
            claims[cid] = _check_step6(space, subset, result, tol)
        else:
            claims[cid] = _check_descending_bound(space, subset, result, tol)
    return claims, pairs
