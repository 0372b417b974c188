"""Dense primal-dual interior point solver for the assembled programs.

Solves the pair

    (P) min <C,X>  s.t. <A_i,X> = b_i,  X PSD
    (D) max b'y    s.t. sum_i y_i A_i + S = C,  S PSD

with the HKM direction and a Mehrotra predictor-corrector step, where the
dual variables y are (lambda, upper-triangular block entries) and S is
block diagonal: one dense block per type plus one diagonal slack block
carrying the per-graph constraints.  The slack block stays diagonal under
every operation, and each data matrix touches one type block in a single
symmetric entry, so the Schur complement assembles from closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sdp import FloatSolution, SdpProblem, _variable_layout


class DimensionCapError(RuntimeError):
    """Instance too large for the internal solver; export it instead."""


@dataclass
class SolverConfig:
    max_iterations: int = 200
    duality_gap_tolerance: float = 1e-9
    feasibility_tolerance: float = 1e-9
    step_fraction: float = 0.98
    max_total_dimension: int = 200
    max_constraints: int = 2000

    def __post_init__(self):
        if self.duality_gap_tolerance <= 0 or self.feasibility_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if not (0 < self.step_fraction < 1):
            raise ValueError("step_fraction must lie in (0,1)")


class _Point:
    """Block-diagonal symmetric iterate: dense type blocks + diagonal slack."""

    def __init__(self, blocks, diag):
        self.blocks = blocks
        self.diag = diag

    @staticmethod
    def identity(dims, nslack, scale):
        return _Point([np.eye(d) * scale for d in dims], np.full(nslack, float(scale)))

    def copy(self):
        return _Point([b.copy() for b in self.blocks], self.diag.copy())

    def dot(self, other) -> float:
        tot = float(self.diag @ other.diag)
        for a, b in zip(self.blocks, other.blocks):
            tot += float(np.tensordot(a, b))
        return tot

    def axpy(self, alpha, other):
        for a, b in zip(self.blocks, other.blocks):
            a += alpha * b
        self.diag += alpha * other.diag

    def norm(self) -> float:
        tot = float(self.diag @ self.diag)
        for a in self.blocks:
            tot += float(np.sum(a * a))
        return float(np.sqrt(tot))


class _Data:
    """Vectorized constraint data for one assembled program."""

    def __init__(self, sdp: SdpProblem):
        self.dims = [blk.dim for blk in sdp.blocks]
        self.nslack = len(sdp.basis)
        layout = _variable_layout(sdp)
        self.m = 1 + len(layout)
        self.obj = np.array([float(v) for v in sdp.objective])
        # per-variable block coordinates; variable 0 (lambda) has none
        self.var_block = np.full(self.m, -1, dtype=int)
        self.var_i = np.zeros(self.m, dtype=int)
        self.var_j = np.zeros(self.m, dtype=int)
        self.var_scale = np.ones(self.m)  # 1/2 on diagonal entries
        for v, (b, i, j) in enumerate(layout, start=1):
            self.var_block[v] = b
            self.var_i[v], self.var_j[v] = i, j
            if i == j:
                self.var_scale[v] = 0.5
        self.block_vars = [
            [v for v in range(1, self.m) if self.var_block[v] == b]
            for b in range(len(self.dims))
        ]
        # slack coefficients: row v holds the folded coefficients over graphs
        rows = [sdp.constraint_row(g) for g in range(self.nslack)]
        self.aslk = np.zeros((self.m, self.nslack))
        self.aslk[0, :] = 1.0
        for v in range(1, self.m):
            b, i, j = self.var_block[v], self.var_i[v], self.var_j[v]
            for g in range(self.nslack):
                coeff = rows[g][b].get((i, j))
                if coeff:
                    self.aslk[v, g] = float(coeff)
        self.bvec = np.zeros(self.m)
        self.bvec[0] = 1.0

    def constraint_values(self, P: _Point) -> np.ndarray:
        """<A_v, P> for every variable v."""
        out = self.aslk @ P.diag
        for b, vars_b in enumerate(self.block_vars):
            Mb = P.blocks[b]
            for v in vars_b:
                i, j = self.var_i[v], self.var_j[v]
                out[v] -= Mb[i, j] if i == j else 2.0 * Mb[i, j]
        return out

    def add_combination(self, P: _Point, y: np.ndarray, sign: float = 1.0):
        """P += sign * sum_v y_v A_v."""
        P.diag += sign * (self.aslk.T @ y)
        for b, vars_b in enumerate(self.block_vars):
            Mb = P.blocks[b]
            for v in vars_b:
                if y[v]:
                    i, j = self.var_i[v], self.var_j[v]
                    Mb[i, j] -= sign * y[v]
                    if i != j:
                        Mb[j, i] -= sign * y[v]

    def schur(self, X: _Point, Sinv: _Point) -> np.ndarray:
        B = (self.aslk * (X.diag * Sinv.diag)) @ self.aslk.T
        for b, vars_b in enumerate(self.block_vars):
            if not vars_b:
                continue
            Xb, Zb = X.blocks[b], Sinv.blocks[b]
            T = (
                np.einsum("jk,li->ijkl", Xb, Zb)
                + np.einsum("jl,ki->ijkl", Xb, Zb)
                + np.einsum("ik,lj->ijkl", Xb, Zb)
                + np.einsum("il,kj->ijkl", Xb, Zb)
            )
            idx = np.array(vars_b)
            iu, ju = self.var_i[idx], self.var_j[idx]
            su = self.var_scale[idx]
            Bb = T[iu[:, None], ju[:, None], iu[None, :], ju[None, :]]
            B[np.ix_(idx, idx)] += (su[:, None] * su[None, :]) * Bb
        return (B + B.T) / 2


def _chol_inverse(mat: np.ndarray) -> np.ndarray:
    eye = np.eye(mat.shape[0])
    jitter = 0.0
    for _ in range(4):
        try:
            L = np.linalg.cholesky(mat + jitter * eye)
            return np.linalg.solve(L.T, np.linalg.solve(L, eye))
        except np.linalg.LinAlgError:
            jitter = max(jitter * 100, 1e-14 * (1 + abs(mat.diagonal()).max()))
    w, V = np.linalg.eigh(mat)
    floor = max(1e-14, 1e-14 * w.max())
    return (V / np.maximum(w, floor)) @ V.T


def _max_step(P: _Point, dP: _Point, frac: float) -> float:
    alpha = 1.0
    mask = dP.diag < 0
    if mask.any():
        alpha = min(alpha, float((-frac * P.diag[mask] / dP.diag[mask]).min()))
    for b, db in zip(P.blocks, dP.blocks):
        if not b.size:
            continue
        try:
            L = np.linalg.cholesky(b)
        except np.linalg.LinAlgError:
            w = np.linalg.eigvalsh(b)
            shift = max(1e-14, -w.min() * 1.01 + 1e-14 * max(1.0, w.max()))
            L = np.linalg.cholesky(b + shift * np.eye(b.shape[0]))
        W = np.linalg.solve(L, np.linalg.solve(L, db).T)
        lam = float(np.linalg.eigvalsh((W + W.T) / 2).min())
        if lam < 0:
            alpha = min(alpha, -frac / lam)
    return min(alpha, 1.0)


def solve(sdp: SdpProblem, cfg: SolverConfig | None = None) -> FloatSolution:
    """Maximize lambda over the assembled program with the internal IPM."""
    cfg = cfg or SolverConfig()
    total_dim = sum(blk.dim for blk in sdp.blocks) + len(sdp.basis)
    if total_dim > cfg.max_total_dimension or len(sdp.basis) > cfg.max_constraints:
        raise DimensionCapError(
            f"total dimension {total_dim} / {len(sdp.basis)} constraints exceed "
            "the internal caps; use export_sdpa and an external solver"
        )
    data = _Data(sdp)
    dims, nslack, m = data.dims, data.nslack, data.m
    ndim = sum(dims) + nslack
    scale = 1.0 + float(abs(data.obj).max(initial=0.0))
    X = _Point.identity(dims, nslack, scale)
    S = _Point.identity(dims, nslack, scale)
    y = np.zeros(m)

    status = "max_iterations"
    gap_history: list[float] = []
    best_y = y.copy()
    best_score = np.inf

    for _ in range(cfg.max_iterations):
        rp = data.bvec - data.constraint_values(X)
        Rd = _Point([np.zeros((d, d)) for d in dims], data.obj.copy())
        Rd.axpy(-1.0, S)
        data.add_combination(Rd, y, sign=-1.0)
        gap = X.dot(S)
        mu = gap / ndim
        pobj = float(data.obj @ X.diag)
        dobj = float(data.bvec @ y)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pinf = float(np.linalg.norm(rp)) / (1.0 + float(np.linalg.norm(data.bvec)))
        dinf = Rd.norm() / (1.0 + float(np.linalg.norm(data.obj)))
        score = relgap + pinf + dinf
        if score < best_score:
            best_score = score
            best_y = y.copy()
            if not gap_history or relgap < gap_history[-1]:
                gap_history.append(relgap)
        if (
            relgap <= cfg.duality_gap_tolerance
            and pinf <= cfg.feasibility_tolerance
            and dinf <= cfg.feasibility_tolerance
        ):
            status = "optimal"
            break
        if mu > 1e16 or not np.isfinite(mu):
            status = "diverged"
            break

        Sinv = _Point([_chol_inverse(sb) for sb in S.blocks], 1.0 / S.diag)
        B = data.schur(X, Sinv) + 1e-13 * np.eye(m)

        def newton(nu: float, E: _Point | None):
            R = _Point(
                [
                    nu * zb - xb - ((0 if E is None else eb) + xb @ rb) @ zb
                    for xb, zb, rb, eb in zip(
                        X.blocks,
                        Sinv.blocks,
                        Rd.blocks,
                        (E.blocks if E is not None else [0] * len(dims)),
                    )
                ],
                nu * Sinv.diag
                - X.diag
                - ((0 if E is None else E.diag) + X.diag * Rd.diag) * Sinv.diag,
            )
            for a in R.blocks:
                a += a.T
                a *= 0.5
            rhs = rp - data.constraint_values(R)
            try:
                dy = np.linalg.solve(B, rhs)
            except np.linalg.LinAlgError:
                dy = np.linalg.lstsq(B, rhs, rcond=None)[0]
            dS = Rd.copy()
            data.add_combination(dS, dy, sign=-1.0)
            # dX = R - X (dS - Rd) Sinv, which keeps A(sym dX) = rp exact
            dX = _Point(
                [
                    rb - xb @ (dsb - rdb) @ zb
                    for rb, xb, dsb, rdb, zb in zip(
                        R.blocks, X.blocks, dS.blocks, Rd.blocks, Sinv.blocks
                    )
                ],
                R.diag - X.diag * (dS.diag - Rd.diag) * Sinv.diag,
            )
            for a in dX.blocks:
                a += a.T
                a *= 0.5
            return dy, dX, dS

        dy_a, dX_a, dS_a = newton(0.0, None)
        ap = _max_step(X, dX_a, cfg.step_fraction)
        ad = _max_step(S, dS_a, cfg.step_fraction)
        Xa = X.copy()
        Xa.axpy(ap, dX_a)
        Sa = S.copy()
        Sa.axpy(ad, dS_a)
        sigma = max(0.0, min(1.0, (Xa.dot(Sa) / gap) ** 3)) if gap > 0 else 0.1

        E = _Point(
            [dx @ ds for dx, ds in zip(dX_a.blocks, dS_a.blocks)],
            dX_a.diag * dS_a.diag,
        )
        dy, dX, dS = newton(sigma * mu, E)
        ap = _max_step(X, dX, cfg.step_fraction)
        ad = _max_step(S, dS, cfg.step_fraction)
        X.axpy(ap, dX)
        y = y + ad * dy
        S.axpy(ad, dS)

    matrices = []
    pos = 1
    for blk in sdp.blocks:
        mat = np.zeros((blk.dim, blk.dim))
        for i in range(blk.dim):
            for j in range(i, blk.dim):
                mat[i, j] = mat[j, i] = best_y[pos]
                pos += 1
        matrices.append(mat)
    return FloatSolution(
        lam=float(best_y[0]),
        matrices=matrices,
        solver_status=status,
        gap_history=gap_history,
        iterations=len(gap_history),
    )
