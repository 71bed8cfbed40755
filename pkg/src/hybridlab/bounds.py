"""Exact evaluators for the discrete-alphabet achievability bounds.

Covers the point-to-point hybrid-coding condition and its exhaustive
optimizer, the two-sender MAC region, the discrete two-way-relay region, the
diamond-network bound with its deterministic specialization, and the
Blahut-Arimoto routines for the separation baseline R(D) vs C.

Strict inequalities are tested with a caller-supplied margin (default 1e-9);
boundary equality reports not-satisfied.  The degenerate single-letter
auxiliary (uncoded transmission) bypasses the inequality and reports
achievability of the expected distortion directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .infotheory import (
    ConditionalPmf,
    DistortionMeasure,
    JointPmf,
    Pmf,
    compose_joint,
    conditional_mutual_information,
    entropy,
    mutual_information,
)
from .search import simplex_grid_array

DEFAULT_MARGIN = 1e-9
BA_TOL = 1e-9
BA_MAX_ITER = 10_000


# ---------------------------------------------------------------------------
# Report and spec containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    name: str
    lhs: float | None
    rhs: float


@dataclass(frozen=True)
class BoundReport:
    constraints: tuple[Constraint, ...]
    satisfied: bool
    binding_constraint: str
    distortions: tuple[float, ...] = ()
    value: float | None = None
    info: dict = field(default_factory=dict)

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class HybridCodeSpec:
    """Single-sender hybrid code: auxiliary kernel plus symbol maps.

    aux_kernel rows are indexed by the source symbol; enc_map[u, s] is the
    channel input and dec_map[u, y] the reconstruction symbol.  rate is the
    codebook rate in bits per symbol.
    """

    aux_size: int
    aux_kernel: ConditionalPmf
    enc_map: np.ndarray
    dec_map: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "enc_map", np.asarray(self.enc_map, dtype=int))
        object.__setattr__(self, "dec_map", np.asarray(self.dec_map, dtype=int))
        if self.aux_kernel.output_size != self.aux_size:
            raise ValueError("aux kernel output does not match aux_size")
        if self.enc_map.shape[0] != self.aux_size or self.dec_map.shape[0] != self.aux_size:
            raise ValueError("map tables must be indexed [u][.]")

    @staticmethod
    def uncoded(enc: np.ndarray, dec: np.ndarray, num_sources: int) -> "HybridCodeSpec":
        """Degenerate single-letter auxiliary: x = x(s), shat = shat(y)."""
        enc = np.asarray(enc, dtype=int)
        dec = np.asarray(dec, dtype=int)
        return HybridCodeSpec(
            aux_size=1,
            aux_kernel=ConditionalPmf(np.ones((num_sources, 1))),
            enc_map=enc[None, :],
            dec_map=dec[None, :],
            rate=0.0,
        )


@dataclass(frozen=True)
class MacHybridSpec:
    """Two-sender hybrid code with optional coded time sharing.

    aux kernels are arrays p(u_j | s_j, q) of shape (Q, Sj, Uj); enc maps
    have shape (Q, Uj, Sj) and dec maps (Q, U1, U2, Y).
    """

    q_pmf: Pmf
    aux1: np.ndarray
    aux2: np.ndarray
    enc1: np.ndarray
    enc2: np.ndarray
    dec1: np.ndarray
    dec2: np.ndarray
    R1: float = 0.0
    R2: float = 0.0

    def __post_init__(self):
        for name in ("aux1", "aux2"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 3 or np.any(a < 0) or np.any(np.abs(a.sum(-1) - 1.0) > 1e-9):
                raise ValueError(f"{name} must be (Q, S, U) with pmf rows")
            object.__setattr__(self, name, a)
        for name in ("enc1", "enc2", "dec1", "dec2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=int))
        if self.aux1.shape[0] != self.q_pmf.alphabet_size:
            raise ValueError("aux kernels must cover the time-sharing alphabet")


# ---------------------------------------------------------------------------
# Point-to-point condition
# ---------------------------------------------------------------------------

def _p2p_joint(source: Pmf, channel: ConditionalPmf, spec: HybridCodeSpec) -> JointPmf:
    """Joint p(s, u, x, y) induced by a hybrid code spec.  Axes: s=0, u=1, x=2, y=3."""
    if spec.aux_kernel.input_size != source.alphabet_size:
        raise ValueError("aux kernel rows must be indexed by the source alphabet")
    if spec.enc_map.shape[1] != source.alphabet_size:
        raise ValueError("enc map must be [u][s]")
    if np.any(spec.enc_map >= channel.input_size):
        raise ValueError("enc map emits symbols outside the channel input alphabet")
    enc = ConditionalPmf.deterministic(spec.enc_map, channel.input_size)
    return compose_joint(
        JointPmf.from_pmf(source),
        [(spec.aux_kernel, [0]), (enc, [1, 0]), (channel, [2])],
    )


def expected_distortion_p2p(
    source: Pmf, channel: ConditionalPmf, d: DistortionMeasure, spec: HybridCodeSpec
) -> float:
    joint = _p2p_joint(source, channel, spec)
    p_suy = joint.marginal([0, 1, 3]).probs
    if spec.dec_map.shape[1] != channel.output_size:
        raise ValueError("dec map must be [u][y]")
    dist = d.table[:, spec.dec_map]  # (S, U, Y)
    return float(np.sum(p_suy * dist))


def check_p2p(
    source: Pmf,
    channel: ConditionalPmf,
    d: DistortionMeasure,
    spec: HybridCodeSpec,
    margin: float = DEFAULT_MARGIN,
) -> BoundReport:
    """Evaluate the single-sender hybrid achievability condition.

    Reports I(S;U), I(U;Y) and the expected distortion of the symbol maps;
    satisfied iff I(S;U) + margin < I(U;Y).  The degenerate aux_size == 1
    spec is reported as uncoded transmission and is satisfied by convention
    (nonstrict): both informations are zero and only the distortion matters.
    """
    ed = expected_distortion_p2p(source, channel, d, spec)
    if spec.aux_size == 1:
        c = Constraint("I(S;U) < I(U;Y)", 0.0, 0.0)
        return BoundReport(
            constraints=(c,), satisfied=True, binding_constraint=c.name,
            distortions=(ed,), info={"uncoded": True},
        )
    joint = _p2p_joint(source, channel, spec)
    i_su = mutual_information(joint, [0], [1])
    i_uy = mutual_information(joint, [1], [3])
    c = Constraint("I(S;U) < I(U;Y)", i_su, i_uy)
    return BoundReport(
        constraints=(c,),
        satisfied=bool(i_su + margin < i_uy),
        binding_constraint=c.name,
        distortions=(ed,),
        info={"uncoded": False, "slack": i_uy - i_su},
    )


# ---------------------------------------------------------------------------
# MAC region
# ---------------------------------------------------------------------------

def _mac_joint(sources: JointPmf, mac: ConditionalPmf, spec: MacHybridSpec) -> JointPmf:
    """Joint over (q, s1, s2, u1, u2, x1, x2, y)."""
    q_size, s1_size, u1_size = spec.aux1.shape
    _, s2_size, u2_size = spec.aux2.shape
    if sources.dims != (s1_size, s2_size):
        raise ValueError("source joint does not match aux kernel shapes")
    x1_size = int(spec.enc1.max()) + 1
    x2_size = int(spec.enc2.max()) + 1
    if mac.input_size % x2_size != 0:
        raise ValueError("MAC rows must be indexed by (x1, x2) in C order")
    x1_size = mac.input_size // x2_size if mac.input_size // x2_size >= x1_size else x1_size
    base = JointPmf.product(spec.q_pmf, sources)
    k_aux1 = ConditionalPmf(spec.aux1.reshape(q_size * s1_size, u1_size))
    k_aux2 = ConditionalPmf(spec.aux2.reshape(q_size * s2_size, u2_size))
    k_enc1 = ConditionalPmf.deterministic(spec.enc1, x1_size)
    k_enc2 = ConditionalPmf.deterministic(spec.enc2, x2_size)
    return compose_joint(base, [
        (k_aux1, [0, 1]),
        (k_aux2, [0, 2]),
        (k_enc1, [0, 3, 1]),
        (k_enc2, [0, 4, 2]),
        (mac, [5, 6]),
    ])


def mac_region_check(
    sources: JointPmf,
    mac: ConditionalPmf,
    d1: DistortionMeasure,
    d2: DistortionMeasure,
    spec: MacHybridSpec,
    margin: float = DEFAULT_MARGIN,
) -> BoundReport:
    """Evaluate the three-inequality MAC hybrid-coding region for a spec."""
    j = _mac_joint(sources, mac, spec)
    Q, S1, S2, U1, U2 = 0, 1, 2, 3, 4
    Y = 7
    c1 = Constraint(
        "I(U1;S1|U2,Q) < I(U1;Y|U2,Q)",
        conditional_mutual_information(j, [U1], [S1], [U2, Q]),
        conditional_mutual_information(j, [U1], [Y], [U2, Q]),
    )
    c2 = Constraint(
        "I(U2;S2|U1,Q) < I(U2;Y|U1,Q)",
        conditional_mutual_information(j, [U2], [S2], [U1, Q]),
        conditional_mutual_information(j, [U2], [Y], [U1, Q]),
    )
    c3 = Constraint(
        "I(U1,U2;S1,S2|Q) < I(U1,U2;Y|Q)",
        conditional_mutual_information(j, [U1, U2], [S1, S2], [Q]),
        conditional_mutual_information(j, [U1, U2], [Y], [Q]),
    )
    constraints = (c1, c2, c3)
    slacks = [c.rhs - c.lhs for c in constraints]
    binding = constraints[int(np.argmin(slacks))].name
    satisfied = all(c.lhs + margin < c.rhs for c in constraints)

    # Expected distortions of the symbol-by-symbol reconstructions.
    p = j.marginal([0, 1, 2, 3, 4, 7]).probs  # (q, s1, s2, u1, u2, y)
    dist1 = d1.table[:, spec.dec1]            # (s1, q, u1, u2, y)
    dist2 = d2.table[:, spec.dec2]
    ed1 = float(np.einsum("qabuvy,aquvy->", p, dist1))
    ed2 = float(np.einsum("qabuvy,bquvy->", p, dist2))
    return BoundReport(
        constraints=constraints,
        satisfied=bool(satisfied),
        binding_constraint=binding,
        distortions=(ed1, ed2),
        info={"slacks": tuple(slacks)},
    )


# ---------------------------------------------------------------------------
# Blahut-Arimoto
# ---------------------------------------------------------------------------

def capacity(channel: ConditionalPmf, tol: float = BA_TOL,
             max_iter: int = BA_MAX_ITER) -> float:
    """Channel capacity in bits via Blahut-Arimoto with a duality-gap stop."""
    W = channel.rows
    nx = W.shape[0]
    p = np.full(nx, 1.0 / nx)
    logW = np.where(W > 0, np.log2(np.where(W > 0, W, 1.0)), 0.0)
    for _ in range(max_iter):
        q = p @ W
        with np.errstate(divide="ignore"):
            logq = np.where(q > 0, np.log2(np.where(q > 0, q, 1.0)), 0.0)
        div = np.sum(W * (logW - logq[None, :]), axis=1)
        lower = float(p @ div)
        upper = float(div.max())
        if upper - lower <= tol:
            return lower
        p = p * np.exp2(div - upper)
        p /= p.sum()
    # Iteration cap reached; return the certified lower value.
    return lower


def _rd_point(p_s: np.ndarray, dtab: np.ndarray, beta: float,
              tol: float = 1e-13, max_iter: int = BA_MAX_ITER) -> tuple[float, float]:
    """One Blahut-Arimoto rate-distortion point at Lagrange slope beta."""
    n_hat = dtab.shape[1]
    q = np.full(n_hat, 1.0 / n_hat)
    expd = np.exp2(-beta * dtab)
    prev_d = np.inf
    rate, dist = 0.0, 0.0
    for _ in range(max_iter):
        a = q[None, :] * expd
        denom = a.sum(axis=1, keepdims=True)
        cond = a / denom
        q = p_s @ cond
        dist = float(np.sum(p_s[:, None] * cond * dtab))
        if abs(dist - prev_d) <= tol:
            break
        prev_d = dist
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(cond > 0, cond / q[None, :], 1.0)
        rate = float(np.sum(p_s[:, None] * cond * np.log2(ratio)))
    return max(rate, 0.0), dist


def rd_function(source: Pmf, d: DistortionMeasure, D: float,
                tol: float = BA_TOL) -> float:
    """Rate-distortion function R(D) in bits via Blahut-Arimoto.

    Raises ValueError when D is below the minimum achievable distortion.
    """
    p_s = source.probs
    dtab = d.table
    if dtab.shape[0] != p_s.size:
        raise ValueError("distortion table does not match the source alphabet")
    d_min = float(p_s @ dtab.min(axis=1))
    d_max = float((p_s @ dtab).min())
    if D < d_min - 1e-12:
        raise ValueError(f"distortion {D} below minimum achievable {d_min}")
    if D >= d_max:
        return 0.0
    if D <= d_min + 1e-12:
        beta_hi = 1e5
        r, _ = _rd_point(p_s, dtab, beta_hi)
        return r
    lo, hi = 0.0, 1.0
    while _rd_point(p_s, dtab, hi)[1] > D:
        hi *= 2.0
        if hi > 1e7:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        _, dist = _rd_point(p_s, dtab, mid)
        if dist > D:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    rate, dist = _rd_point(p_s, dtab, hi)
    # Supporting-line correction at slope -beta.
    return max(rate + hi * (dist - D), 0.0)


# ---------------------------------------------------------------------------
# Exhaustive point-to-point optimizer
# ---------------------------------------------------------------------------

def _enc_map_array(u: int, s: int, x: int) -> np.ndarray:
    """All deterministic tables (u, s) -> x, lexicographic in C-order digits."""
    count = x ** (u * s)
    idx = np.arange(count)
    digits = np.zeros((count, u * s), dtype=int)
    for pos in range(u * s - 1, -1, -1):
        digits[:, pos] = idx % x
        idx //= x
    return digits.reshape(count, u, s)


def _entropy_rows(p: np.ndarray, axis) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -t.sum(axis=axis)


def _scan_p2p(source, channel, d, targets, aux_cap, grid_res, chunk=1024):
    """Stream all (aux kernel grid, enc map) candidates once.

    For each target distortion returns the best (max) slack achievable with
    minimal-distortion decoding, the lexicographically first argmax key
    (aux_size, kernel_index, enc_index), and whether an uncoded candidate
    meets the target.  Candidate order is aux_size asc, kernel asc, enc asc.
    """
    p_s = source.probs
    s_size = p_s.size
    x_size = channel.input_size
    y_size = channel.output_size
    W = channel.rows
    h_s = float(_entropy_rows(p_s, 0))
    results = [
        {"best_slack": -np.inf, "best_key": None, "best_ed": None, "uncoded_ed": np.inf}
        for _ in targets
    ]
    for u in range(1, aux_cap + 1):
        row_grid = simplex_grid_array(u, grid_res)      # (G, u)
        G = row_grid.shape[0]
        kernel_count = G ** s_size
        enc_maps = _enc_map_array(u, s_size, x_size)    # (NE, u, s)
        NE = enc_maps.shape[0]
        wm = W[enc_maps]                                # (NE, u, s, y)
        wm = wm.transpose(0, 2, 1, 3)                   # (NE, s, u, y)
        for start in range(0, kernel_count, chunk):
            stop = min(start + chunk, kernel_count)
            idx = np.arange(start, stop)
            # Decode kernel index into per-source-symbol grid rows (C order).
            rows = np.empty((idx.size, s_size), dtype=int)
            rem = idx.copy()
            for pos in range(s_size - 1, -1, -1):
                rows[:, pos] = rem % G
                rem //= G
            K = row_grid[rows]                          # (B, s, u)
            p_su = p_s[None, :, None] * K               # (B, s, u)
            h_u = _entropy_rows(p_su.sum(axis=1), 1)    # (B,)
            h_su = _entropy_rows(p_su, (1, 2))
            i_su = h_s + h_u - h_su                     # (B,)
            p_suy = p_su[:, None, :, :, None] * wm[None]  # (B, NE, s, u, y)
            p_uy = p_suy.sum(axis=2)                    # (B, NE, u, y)
            h_y = _entropy_rows(p_uy.sum(axis=2), 2)    # (B, NE)
            h_uy = _entropy_rows(p_uy, (2, 3))
            i_uy = h_u[:, None] + h_y - h_uy
            slack = i_uy - i_su[:, None]                # (B, NE)
            ed_t = np.einsum("besuy,sr->beuyr", p_suy, d.table)
            ed_min = ed_t.min(axis=-1).sum(axis=(2, 3))  # (B, NE)
            for t_i, target in enumerate(targets):
                res = results[t_i]
                feas = ed_min <= target + 1e-12
                if u == 1:
                    m = float(ed_min.min())
                    if m < res["uncoded_ed"]:
                        res["uncoded_ed"] = m
                if not feas.any():
                    continue
                masked = np.where(feas, slack, -np.inf)
                flat = int(np.argmax(masked))
                val = float(masked.flat[flat])
                if val > res["best_slack"]:
                    b, e = divmod(flat, NE)
                    res["best_slack"] = val
                    res["best_key"] = (u, start + b, int(e))
                    res["best_ed"] = float(ed_min[b, e])
    return results


def _spec_from_key(source, channel, d, key, grid_res) -> HybridCodeSpec:
    u, kern_idx, enc_idx = key
    s_size = source.alphabet_size
    x_size = channel.input_size
    row_grid = simplex_grid_array(u, grid_res)
    G = row_grid.shape[0]
    rows = []
    rem = kern_idx
    for _ in range(s_size):
        rows.append(rem % G)
        rem //= G
    rows = list(reversed(rows))
    kernel = ConditionalPmf(np.clip(row_grid[rows], 0, 1))
    enc = _enc_map_array(u, s_size, x_size)[enc_idx]
    spec_tmp = HybridCodeSpec(u, kernel, enc, np.zeros((u, channel.output_size), dtype=int), 0.0)
    joint = _p2p_joint(source, channel, spec_tmp)
    p_suy = joint.marginal([0, 1, 3]).probs
    # Minimal-expected-distortion reconstruction per (u, y).
    cost = np.einsum("suy,sr->uyr", p_suy, d.table)
    dec = cost.argmin(axis=-1)
    i_su = mutual_information(joint, [0], [1])
    i_uy = mutual_information(joint, [1], [3])
    rate = 0.5 * (i_su + i_uy)
    return HybridCodeSpec(u, kernel, enc, dec, rate)


def p2p_optimize(
    source: Pmf,
    channel: ConditionalPmf,
    d: DistortionMeasure,
    target_D: float,
    aux_cap: int = 4,
    grid_res: int = 12,
    margin: float = DEFAULT_MARGIN,
) -> tuple[BoundReport, HybridCodeSpec | None]:
    """Exhaustive search for the code spec maximizing I(U;Y) - I(S;U) with
    expected distortion at most target_D.

    Kernels range over per-symbol simplex grids of resolution 1/grid_res with
    aux alphabet up to aux_cap; enc maps are enumerated exhaustively and the
    reconstruction map is the per-(u, y) distortion minimizer.  Infeasibility
    at this resolution is reported, not raised.  Ties are broken by the
    lexicographically smallest candidate encoding.
    """
    if aux_cap < 1 or grid_res < 1:
        raise ValueError("aux_cap and grid_res must be >= 1")
    res = _scan_p2p(source, channel, d, [target_D], aux_cap, grid_res)[0]
    uncoded_ok = res["uncoded_ed"] <= target_D + 1e-12
    if res["best_key"] is None:
        report = BoundReport(
            constraints=(), satisfied=False, binding_constraint="feasibility",
            info={"achievable": False, "reason": "no candidate met the distortion target"},
        )
        return report, None
    spec = _spec_from_key(source, channel, d, res["best_key"], grid_res)
    achievable = uncoded_ok or res["best_slack"] > margin
    report = check_p2p(source, channel, d, spec, margin)
    info = dict(report.info)
    info.update({
        "achievable": bool(achievable),
        "best_slack": res["best_slack"],
        "best_distortion": res["best_ed"],
        "uncoded_distortion": res["uncoded_ed"],
    })
    return BoundReport(
        constraints=report.constraints,
        satisfied=report.satisfied,
        binding_constraint=report.binding_constraint,
        distortions=report.distortions,
        info=info,
    ), spec


def p2p_feasibility_sweep(
    source: Pmf,
    channel: ConditionalPmf,
    d: DistortionMeasure,
    targets: list[float],
    aux_cap: int = 4,
    grid_res: int = 12,
    margin: float = DEFAULT_MARGIN,
) -> list[bool]:
    """Achievability of each target distortion, sharing one candidate scan."""
    results = _scan_p2p(source, channel, d, list(targets), aux_cap, grid_res)
    out = []
    for target, res in zip(targets, results):
        uncoded_ok = res["uncoded_ed"] <= target + 1e-12
        coded_ok = res["best_key"] is not None and res["best_slack"] > margin
        out.append(bool(uncoded_ok or coded_ok))
    return out


# ---------------------------------------------------------------------------
# Discrete two-way relay region
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwrcSpec:
    px1: Pmf
    px2: Pmf
    relay_kernel: ConditionalPmf   # p(u3 | y3)
    relay_map: np.ndarray          # x3[u3, y3]

    def __post_init__(self):
        object.__setattr__(self, "relay_map", np.asarray(self.relay_map, dtype=int))


def twrc_region_check(
    uplink: ConditionalPmf,       # p(y3 | x1, x2), rows (x1, x2) C order
    downlink: ConditionalPmf,     # p(y1, y2 | x3), outputs (y1, y2) C order
    y1_size: int,
    y2_size: int,
    spec: TwrcSpec,
    margin: float = DEFAULT_MARGIN,
    r2_penalty_on_x2: bool = False,
) -> BoundReport:
    """Rate corner of the discrete two-way-relay achievability region.

    The second R2 expression subtracts I(Y3;U3|X1) exactly as printed; the
    r2_penalty_on_x2 switch conditions on X2 instead, for exploration only.
    """
    if y1_size * y2_size != downlink.output_size:
        raise ValueError("downlink output does not factor as (y1, y2)")
    x3_size = downlink.input_size
    if np.any(spec.relay_map >= x3_size):
        raise ValueError("relay map emits symbols outside the relay input alphabet")
    base = JointPmf.product(spec.px1, spec.px2)
    relay_enc = ConditionalPmf.deterministic(spec.relay_map, x3_size)
    j = compose_joint(base, [
        (uplink, [0, 1]),            # y3 -> axis 2
        (spec.relay_kernel, [2]),    # u3 -> axis 3
        (relay_enc, [3, 2]),         # x3 -> axis 4
        (downlink, [4]),             # (y1, y2) -> axis 5
    ]).split_axis(5, (y1_size, y2_size))
    X1, X2, Y3, U3, Y1, Y2 = 0, 1, 2, 3, 5, 6
    pen = conditional_mutual_information(j, [Y3], [U3], [X1])
    pen2 = conditional_mutual_information(j, [Y3], [U3], [X2]) if r2_penalty_on_x2 else pen
    a1 = conditional_mutual_information(j, [X1], [Y2, U3], [X2])
    b1 = mutual_information(j, [X1, U3], [X2, Y2]) - pen
    a2 = conditional_mutual_information(j, [X2], [Y1, U3], [X1])
    b2 = mutual_information(j, [X2, U3], [X1, Y1]) - pen2
    r1 = min(a1, b1)
    r2 = min(a2, b2)
    clamped = r1 < 0 or r2 < 0
    constraints = (
        Constraint("R1: I(X1;Y2,U3|X2)", None, a1),
        Constraint("R1: I(X1,U3;X2,Y2) - I(Y3;U3|X1)", None, b1),
        Constraint("R2: I(X2;Y1,U3|X1)", None, a2),
        Constraint("R2: I(X2,U3;X1,Y1) - penalty", None, b2),
    )
    return BoundReport(
        constraints=constraints,
        satisfied=True,
        binding_constraint=constraints[0 if a1 <= b1 else 1].name,
        value=None,
        info={
            "R1": max(r1, 0.0),
            "R2": max(r2, 0.0),
            "clamped": bool(clamped),
            "binding_R2": constraints[2 if a2 <= b2 else 3].name,
        },
    )


# ---------------------------------------------------------------------------
# Diamond network bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiamondSpec:
    px1: Pmf
    k2: ConditionalPmf             # p(u2 | y2)
    k3: ConditionalPmf             # p(u3 | y3)
    map2: np.ndarray               # x2[u2, y2]
    map3: np.ndarray               # x3[u3, y3]

    def __post_init__(self):
        object.__setattr__(self, "map2", np.asarray(self.map2, dtype=int))
        object.__setattr__(self, "map3", np.asarray(self.map3, dtype=int))


def diamond_bound(
    broadcast: ConditionalPmf,     # p(y2, y3 | x1), outputs (y2, y3) C order
    mac: ConditionalPmf,           # p(y4 | x2, x3), rows (x2, x3) C order
    y2_size: int,
    y3_size: int,
    x2_size: int,
    x3_size: int,
    spec: DiamondSpec,
) -> BoundReport:
    """Minimum of the four diamond-network rate expressions for a spec."""
    if y2_size * y3_size != broadcast.output_size:
        raise ValueError("broadcast output does not factor as (y2, y3)")
    if x2_size * x3_size != mac.input_size:
        raise ValueError("MAC rows must be indexed by (x2, x3)")
    j0 = compose_joint(JointPmf.from_pmf(spec.px1), [(broadcast, [0])])
    j0 = j0.split_axis(1, (y2_size, y3_size))       # (x1, y2, y3)
    enc2 = ConditionalPmf.deterministic(spec.map2, x2_size)
    enc3 = ConditionalPmf.deterministic(spec.map3, x3_size)
    j = compose_joint(j0, [
        (spec.k2, [1]),        # u2 -> 3
        (spec.k3, [2]),        # u3 -> 4
        (enc2, [3, 1]),        # x2 -> 5
        (enc3, [4, 2]),        # x3 -> 6
        (mac, [5, 6]),         # y4 -> 7
    ])
    X1, Y2, Y3, U2, U3, Y4 = 0, 1, 2, 3, 4, 7
    v1 = mutual_information(j, [X1], [U2, U3, Y4])
    v2 = mutual_information(j, [X1, U2], [U3, Y4]) \
        - conditional_mutual_information(j, [U2], [Y2], [X1])
    v3 = mutual_information(j, [X1, U3], [U2, Y4]) \
        - conditional_mutual_information(j, [U3], [Y3], [X1])
    v4 = mutual_information(j, [X1, U2, U3], [Y4]) \
        - conditional_mutual_information(j, [U2, U3], [Y2, Y3], [X1])
    names = (
        "I(X1;U2,U3,Y4)",
        "I(X1,U2;U3,Y4) - I(U2;Y2|X1)",
        "I(X1,U3;U2,Y4) - I(U3;Y3|X1)",
        "I(X1,U2,U3;Y4) - I(U2,U3;Y2,Y3|X1)",
    )
    vals = (v1, v2, v3, v4)
    k = int(np.argmin(vals))
    return BoundReport(
        constraints=tuple(Constraint(n, None, v) for n, v in zip(names, vals)),
        satisfied=True,
        binding_constraint=names[k],
        value=float(vals[k]),
    )


# ---------------------------------------------------------------------------
# Deterministic diamond bounds (hybrid / independent-relay / cutset)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetDiamondBounds:
    hybrid: float
    adt: float
    cutset: float
    hybrid_binding: str
    argmax: dict


_DIAMOND_TERM_NAMES = (
    "H(Y2,Y3)",
    "H(Y2)+H(Y4|X2,Y2)",
    "H(Y3)+H(Y4|X3,Y3)",
    "H(Y4)",
)


def _det_diamond_terms(px1, y2_map, y3_map, y4_onehot, cond_batch):
    """Four rate terms for a batch of conditionals c[n, y2, y3, x2, x3]."""
    y2_size = int(y2_map.max()) + 1 if y2_map.size else 1
    y2_size = max(y2_size, cond_batch.shape[1])
    y3_size = cond_batch.shape[2]
    p23 = np.zeros((cond_batch.shape[1], y3_size))
    np.add.at(p23, (y2_map, y3_map), px1)
    T = p23[None, :, :, None, None] * cond_batch     # (n, y2, y3, x2, x3)
    h23 = float(_entropy_rows(p23, (0, 1)))
    h2 = float(_entropy_rows(p23.sum(axis=1), 0))
    h3 = float(_entropy_rows(p23.sum(axis=0), 0))
    p_y2x2y4 = np.einsum("nabcd,cde->nace", T, y4_onehot)
    p_y2x2 = T.sum(axis=(2, 4))
    t2 = h2 + _entropy_rows(p_y2x2y4, (1, 2, 3)) - _entropy_rows(p_y2x2, (1, 2))
    p_y3x3y4 = np.einsum("nabcd,cde->nbde", T, y4_onehot)
    p_y3x3 = T.sum(axis=(1, 3))
    t3 = h3 + _entropy_rows(p_y3x3y4, (1, 2, 3)) - _entropy_rows(p_y3x3, (1, 2))
    p_y4 = np.einsum("nabcd,cde->ne", T, y4_onehot)
    t4 = _entropy_rows(p_y4, 1)
    stacked = np.stack([np.full_like(t2, h23), t2, t3, t4])   # (4, n)
    return stacked.min(axis=0), stacked.argmin(axis=0)


def _row_product_batch(row_grid: np.ndarray, num_rows: int) -> np.ndarray:
    """All kernels whose every row comes from row_grid: (G^rows, rows, k)."""
    combos = list(itertools.product(range(row_grid.shape[0]), repeat=num_rows))
    return row_grid[np.asarray(combos, dtype=int)]


def det_diamond_bounds(
    y2_map,
    y3_map,
    y4_map,
    x2_size: int,
    x3_size: int,
    px1_res: int = 6,
    relay_res: int = 6,
) -> DetDiamondBounds:
    """Grid maximization of the deterministic-diamond rate expression over the
    three input-distribution families (relay-dependent, independent, joint).

    Both network stages must be deterministic maps: y2_map/y3_map over the
    source alphabet, y4_map over (x2, x3).  Relay conditionals range over
    per-row simplex grids (which include all deterministic maps as corners).
    """
    y2_map = np.asarray(y2_map, dtype=int)
    y3_map = np.asarray(y3_map, dtype=int)
    y4_map = np.asarray(y4_map, dtype=int)
    if y4_map.shape != (x2_size, x3_size):
        raise ValueError("y4_map must have shape (x2_size, x3_size)")
    y2_size = int(y2_map.max()) + 1
    y3_size = int(y3_map.max()) + 1
    y4_size = int(y4_map.max()) + 1
    x1_size = y2_map.size
    y4_onehot = np.zeros((x2_size, x3_size, y4_size))
    y4_onehot[np.arange(x2_size)[:, None], np.arange(x3_size)[None, :], y4_map] = 1.0

    # Candidate conditionals per family, built once.
    a_batch = _row_product_batch(simplex_grid_array(x2_size, relay_res), y2_size)
    b_batch = _row_product_batch(simplex_grid_array(x3_size, relay_res), y3_size)
    hybrid_cond = np.einsum("iac,jbd->ijabcd", a_batch, b_batch).reshape(
        -1, y2_size, y3_size, x2_size, x3_size)
    a_const = simplex_grid_array(x2_size, relay_res)
    b_const = simplex_grid_array(x3_size, relay_res)
    adt_cond = np.einsum("ic,jd->ijcd", a_const, b_const).reshape(-1, x2_size, x3_size)
    adt_cond = np.broadcast_to(
        adt_cond[:, None, None, :, :], (adt_cond.shape[0], y2_size, y3_size, x2_size, x3_size))
    joint_grid = simplex_grid_array(x2_size * x3_size, relay_res).reshape(-1, x2_size, x3_size)
    cut_cond = np.broadcast_to(
        joint_grid[:, None, None, :, :], (joint_grid.shape[0], y2_size, y3_size, x2_size, x3_size))

    best = {"hybrid": (-np.inf, 0, None), "adt": (-np.inf, 0, None), "cutset": (-np.inf, 0, None)}
    px1_grid = simplex_grid_array(x1_size, px1_res)
    for pi, px1 in enumerate(px1_grid):
        for fam, cond in (("hybrid", hybrid_cond), ("adt", adt_cond), ("cutset", cut_cond)):
            vals, binds = _det_diamond_terms(px1, y2_map, y3_map, y4_onehot, cond)
            k = int(np.argmax(vals))
            if vals[k] > best[fam][0]:
                best[fam] = (float(vals[k]), int(binds[k]), (pi, k))
    return DetDiamondBounds(
        hybrid=best["hybrid"][0],
        adt=best["adt"][0],
        cutset=best["cutset"][0],
        hybrid_binding=_DIAMOND_TERM_NAMES[best["hybrid"][1]],
        argmax={
            fam: {"px1": px1_grid[key[0]].tolist(), "candidate_index": key[1],
                  "binding": _DIAMOND_TERM_NAMES[bind]}
            for fam, (_, bind, key) in best.items()
        },
    )


# ---------------------------------------------------------------------------
# MAC substitution builders: lossless and distributed-compression forms
# ---------------------------------------------------------------------------

def lossless_mac_spec(sources: JointPmf, px1: Pmf, px2: Pmf,
                      x1_size: int, x2_size: int, y_size: int) -> MacHybridSpec:
    """Auxiliary choice U_j = (X_j, S_j) with inputs independent of sources.

    Under this substitution the three region inequalities reduce to the
    lossless source-transmission conditions (conditional source entropies
    against channel informations); reconstructions read the source component
    of the auxiliary symbol directly.
    """
    s1_size, s2_size = sources.dims

    def aux(px, s_size):
        u_size = px.alphabet_size * s_size
        a = np.zeros((1, s_size, u_size))
        for s in range(s_size):
            for x in range(px.alphabet_size):
                a[0, s, x * s_size + s] = px.probs[x]
        return a

    def enc(px, s_size):
        u_size = px.alphabet_size * s_size
        e = np.zeros((1, u_size, s_size), dtype=int)
        for u in range(u_size):
            e[0, u, :] = u // s_size
        return e

    u1_size = x1_size * s1_size
    u2_size = x2_size * s2_size
    dec1 = np.zeros((1, u1_size, u2_size, y_size), dtype=int)
    dec1[0] = (np.arange(u1_size) % s1_size)[:, None, None]
    dec2 = np.zeros((1, u1_size, u2_size, y_size), dtype=int)
    dec2[0] = (np.arange(u2_size) % s2_size)[None, :, None]
    return MacHybridSpec(
        q_pmf=Pmf([1.0]),
        aux1=aux(px1, s1_size), aux2=aux(px2, s2_size),
        enc1=enc(px1, s1_size), enc2=enc(px2, s2_size),
        dec1=dec1, dec2=dec2,
    )


def lossless_reduced_values(sources: JointPmf, mac: ConditionalPmf,
                            px1: Pmf, px2: Pmf) -> tuple[tuple[float, float], ...]:
    """Reduced-form constraint pairs for the U_j = (X_j, S_j) substitution.

    Returns ((H(S1|S2), I(X1;Y|X2,S2)), (H(S2|S1), I(X2;Y|X1,S1)),
    (H(S1,S2), I(X1,X2;Y))), computed on an independently composed joint.
    """
    j = JointPmf.product(sources, px1, px2)              # (s1, s2, x1, x2)
    j = compose_joint(j, [(mac, [2, 3])])                # y -> axis 4
    h_s12 = entropy(j.marginal([0, 1]))
    h_s1_given_s2 = h_s12 - entropy(j.marginal([1]))
    h_s2_given_s1 = h_s12 - entropy(j.marginal([0]))
    return (
        (h_s1_given_s2, conditional_mutual_information(j, [2], [4], [3, 1])),
        (h_s2_given_s1, conditional_mutual_information(j, [3], [4], [2, 0])),
        (h_s12, mutual_information(j, [2, 3], [4])),
    )


def noiseless_pair_mac(x1_size: int, x2_size: int) -> ConditionalPmf:
    """Channel whose output is the input pair itself, y = (x1, x2) C order."""
    return ConditionalPmf.identity(x1_size * x2_size)


def distributed_mac_spec(k1: ConditionalPmf, k2: ConditionalPmf,
                         px1: Pmf, px2: Pmf) -> MacHybridSpec:
    """Auxiliary choice U_j = (X_j, Utilde_j) over the noiseless pair channel.

    k_j are the test channels p(utilde_j | s_j); channel inputs are drawn
    independently of the sources, so the region inequalities reduce to the
    distributed-compression (covering) conditions with rates H(X_j).
    Reconstruction maps are placeholders (index 0): only constraint values
    are meaningful for this form.
    """
    s1_size, s2_size = k1.input_size, k2.input_size
    ut1, ut2 = k1.output_size, k2.output_size
    y_size = px1.alphabet_size * px2.alphabet_size

    def aux(px, k):
        u_size = px.alphabet_size * k.output_size
        a = np.zeros((1, k.input_size, u_size))
        for s in range(k.input_size):
            for x in range(px.alphabet_size):
                for ut in range(k.output_size):
                    a[0, s, x * k.output_size + ut] = px.probs[x] * k.rows[s, ut]
        return a

    def enc(px, k, s_size):
        u_size = px.alphabet_size * k.output_size
        e = np.zeros((1, u_size, s_size), dtype=int)
        for u in range(u_size):
            e[0, u, :] = u // k.output_size
        return e

    u1_size = px1.alphabet_size * ut1
    u2_size = px2.alphabet_size * ut2
    dec = np.zeros((1, u1_size, u2_size, y_size), dtype=int)
    return MacHybridSpec(
        q_pmf=Pmf([1.0]),
        aux1=aux(px1, k1), aux2=aux(px2, k2),
        enc1=enc(px1, k1, s1_size), enc2=enc(px2, k2, s2_size),
        dec1=dec, dec2=dec,
        R1=float(entropy(px1)), R2=float(entropy(px2)),
    )


def distributed_reduced_values(sources: JointPmf, k1: ConditionalPmf,
                               k2: ConditionalPmf, px1: Pmf,
                               px2: Pmf) -> tuple[tuple[float, float], ...]:
    """Reduced-form pairs for the distributed-compression substitution.

    Returns ((I(Ut1;S1|Ut2), H(X1)), (I(Ut2;S2|Ut1), H(X2)),
    (I(Ut1,Ut2;S1,S2), H(X1)+H(X2))).
    """
    j = compose_joint(sources, [(k1, [0]), (k2, [1])])   # (s1, s2, ut1, ut2)
    h1, h2 = entropy(px1), entropy(px2)
    return (
        (conditional_mutual_information(j, [2], [0], [3]), h1),
        (conditional_mutual_information(j, [3], [1], [2]), h2),
        (mutual_information(j, [2, 3], [0, 1]), h1 + h2),
    )
