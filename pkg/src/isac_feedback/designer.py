"""Feedback matrix design.

The transmit matrix V (M antennas x L channel uses, total energy P*L) must
simultaneously (a) push every decoded user's decision statistic positive and
every failed user's negative, and (b) keep enough beam energy on the sensing
sector that a target echo supports angle estimation. Both goals are scored
analytically: the communication side as an average Q-function error, the
sensing side as an approximate lower bound on angle-estimation MSE derived
from the deterministic CRB. The design loop is a normalized projected
gradient descent over a weighted sum of the two scores, with an adaptive
per-iteration threshold that concentrates the communication gradient on the
users currently worse than average.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import q_function, sample_cgauss, steering_vector, steering_derivative, substream
from .scenario import SenseGrid, SystemConfig, TargetScene, UserPopulation


@dataclass(frozen=True)
class FeedbackMatrix:
    """Transmit matrix with its energy budget (P*L, in mW-channel-uses)."""

    v: np.ndarray          # (M, L) complex
    power_budget: float

    def __post_init__(self):
        if self.v.ndim != 2:
            raise ValueError(f"v must be a matrix, got ndim={self.v.ndim}")
        if self.power_budget <= 0:
            raise ValueError(f"power budget must be > 0, got {self.power_budget}")

    @property
    def frobenius_sq(self) -> float:
        return float(np.sum(np.abs(self.v) ** 2))

    def project(self) -> "FeedbackMatrix":
        """Rescale onto the energy sphere ||v||_F^2 = power_budget."""
        norm = np.linalg.norm(self.v)
        if norm == 0:
            raise ValueError("cannot project the zero matrix onto the power sphere")
        return FeedbackMatrix(v=self.v * (np.sqrt(self.power_budget) / norm),
                              power_budget=self.power_budget)


@dataclass(frozen=True)
class DesignStep:
    k: int
    q_k: float
    n_active_decoded: int
    n_active_failed: int
    e_c: float
    e_s: float
    objective: float
    v_frob_sq: float


@dataclass(frozen=True)
class DesignTrace:
    steps: tuple

    def __len__(self) -> int:
        return len(self.steps)

    def to_records(self) -> list:
        return [
            {
                "k": s.k,
                "q_k": s.q_k,
                "n_active_decoded": s.n_active_decoded,
                "n_active_failed": s.n_active_failed,
                "e_c": s.e_c,
                "e_s": s.e_s,
                "objective": s.objective,
                "v_frob_sq": s.v_frob_sq,
            }
            for s in self.steps
        ]


def comm_margin(v: FeedbackMatrix, h_est: np.ndarray, hash_vec: np.ndarray) -> float:
    """Mean of the user's decision statistic: Re(h^T V p^H)."""
    m_ant, l_len = v.v.shape
    if h_est.shape != (m_ant,):
        raise ValueError(f"h_est: expected shape ({m_ant},), got {h_est.shape}")
    if hash_vec.shape != (l_len,):
        raise ValueError(f"hash: expected shape ({l_len},), got {hash_vec.shape}")
    return float(np.real(h_est @ v.v @ hash_vec.conj()))


def _margins(v: np.ndarray, pop: UserPopulation) -> np.ndarray:
    k, m_ant = pop.h_est.shape
    if v.shape[0] != m_ant or v.shape[1] != pop.hashes.shape[1]:
        raise ValueError(
            f"matrix shape {v.shape} does not match population "
            f"(M={m_ant}, L={pop.hashes.shape[1]})")
    return np.real(((pop.h_est @ v) * pop.hashes.conj()).sum(axis=1))


def per_user_error(v: FeedbackMatrix, pop: UserPopulation, sigma_ch2: float) -> np.ndarray:
    """Each user's analytic probability of a wrong acknowledgment decision.

    A zero noise variance is handled as the exact limit: error 0 when the
    margin sits strictly on the user's correct side, 1 when strictly wrong,
    1/2 on the boundary.
    """
    if sigma_ch2 < 0:
        raise ValueError(f"decision noise variance must be >= 0, got {sigma_ch2}")
    margins = _margins(v.v, pop)
    if sigma_ch2 == 0:
        signed = np.where(pop.decoded, margins, -margins)
        return np.where(signed > 0, 0.0, np.where(signed < 0, 1.0, 0.5))
    scaled = margins / np.sqrt(sigma_ch2)
    return np.where(pop.decoded, q_function(scaled), q_function(-scaled))


def analytic_comm_error(v: FeedbackMatrix, pop: UserPopulation, sigma_ch2: float) -> float:
    """Average decision-error probability over all K users."""
    return float(per_user_error(v, pop, sigma_ch2).mean())


def q_threshold(v_prev: FeedbackMatrix, pop: UserPopulation, sigma_ch2: float) -> float:
    """Adaptive active-set threshold: the mean per-user error at v_prev."""
    return analytic_comm_error(v_prev, pop, sigma_ch2)


def grad_comm(v: FeedbackMatrix, pop: UserPopulation, sigma_ch2: float,
              q_k: float) -> np.ndarray:
    """Communication gradient restricted to users with error strictly above q_k.

    Active decoded users contribute -conj(h)p, active failed users +conj(h)p;
    with no active users the gradient is the zero matrix.
    """
    perr = per_user_error(v, pop, sigma_ch2)
    active = perr > q_k
    weights = np.where(pop.decoded, -1.0, 1.0) * active
    return (pop.h_est.conj().T * weights) @ pop.hashes


def _grid_steering(m_ant: int, grid: SenseGrid) -> np.ndarray:
    return np.exp(1j * np.pi * np.outer(np.arange(m_ant), np.cos(grid.angles)))


def _beam_energy(v: np.ndarray, a: np.ndarray) -> tuple:
    """Per-angle transmit responses a^T V (G x L) and energies y = ||a^T V||^2."""
    rows = a.T @ v
    y = (np.abs(rows) ** 2).sum(axis=1)
    return rows, y


def _grid_response(v: np.ndarray, grid: SenseGrid) -> tuple:
    a = _grid_steering(v.shape[0], grid)
    rows, y = _beam_energy(v, a)
    return a, rows, y


def _sense_gradient(a: np.ndarray, rows: np.ndarray, y: np.ndarray,
                    s2: np.ndarray) -> np.ndarray:
    return -(a.conj() @ (rows / (y ** 2 * s2)[:, None]))


def grad_sense(v: FeedbackMatrix, grid: SenseGrid) -> np.ndarray:
    """Sensing gradient: sum over grid angles of -a* a^T V / (y^2 sin^2 theta).

    The linearization point for each angle's beam energy is its value at the
    current matrix, so constant factors of the analytic sensing score drop
    out; the design loop normalizes this matrix anyway.
    """
    if grid.size < 1:
        raise ValueError("sensing grid is empty")
    a, rows, y = _grid_response(v.v, grid)
    if np.any(y == 0):
        raise ValueError("zero beam energy toward a grid angle; sensing gradient undefined")
    s2 = np.sin(grid.angles) ** 2
    return _sense_gradient(a, rows, y, s2)


def approx_sense_error(v: FeedbackMatrix, theta: float, sigma_e2: float,
                       rho0: float, d_t: float, alpha_t: float) -> float:
    """Approximate lower bound on angle-estimation MSE (rad^2) at one angle."""
    s = np.sin(theta)
    if s == 0:
        raise ValueError("sin(theta) = 0: bound undefined at array endfire")
    m_ant = v.v.shape[0]
    a = steering_vector(theta, m_ant)
    y = float(np.sum(np.abs(a @ v.v) ** 2))
    if y == 0:
        raise ValueError("zero beam energy toward theta; approximate bound is infinite")
    v_theta = sigma_e2 / (2.0 * rho0 * d_t ** (-2.0 * alpha_t) * np.pi ** 2 * s ** 2)
    return v_theta / y


def mean_sense_error(v: FeedbackMatrix, grid: SenseGrid, sigma_e2: float,
                     rho0: float, d_t: float, alpha_t: float) -> float:
    """Uniform average of approx_sense_error over the sensing grid (rad^2)."""
    if grid.size < 1:
        raise ValueError("sensing grid is empty")
    _, _, y = _grid_response(v.v, grid)
    if np.any(y == 0):
        raise ValueError("zero beam energy toward a grid angle; approximate bound is infinite")
    s2 = np.sin(grid.angles) ** 2
    v_theta = sigma_e2 / (2.0 * rho0 * d_t ** (-2.0 * alpha_t) * np.pi ** 2 * s2)
    return float((v_theta / y).mean())


def crlb_matrix(v: FeedbackMatrix, scene: TargetScene, sigma_e2: float,
                rho0: float, alpha_t: float) -> np.ndarray:
    """Exact deterministic angle-estimation bound; returns the diagonal (rad^2).

    For targets t with steering columns B and derivative columns D, the bound
    is (sigma_e^2/2) * inv(Re(G o conj(W))) with G = D^H (I - B(B^H B)^-1 B^H) D
    and W the Gram matrix of the per-target transmit responses.
    """
    m_ant = v.v.shape[0]
    t_count = scene.n_targets
    if t_count < 1:
        raise ValueError("scene has no targets")
    if t_count >= m_ant:
        raise ValueError(f"need more antennas than targets: T={t_count}, M={m_ant}")
    b = np.column_stack([steering_vector(th, m_ant) for th in scene.angles])
    d = np.column_stack([steering_derivative(th, m_ant) for th in scene.angles])
    gram = b.conj().T @ b
    try:
        proj = d - b @ np.linalg.solve(gram, b.conj().T @ d)
    except np.linalg.LinAlgError as e:
        raise np.linalg.LinAlgError(
            f"steering matrix Gram is singular (coincident target angles?): {e}") from e
    g = d.conj().T @ proj  # (T, T)
    gains = np.sqrt(rho0 * np.asarray(scene.distances) ** (-2.0 * alpha_t))
    rows = gains[:, None] * (b.T @ v.v)  # (T, L) transmit response per target
    w = rows @ rows.conj().T
    inner = np.real(g * w.conj())
    try:
        c = (sigma_e2 / 2.0) * np.linalg.inv(inner)
    except np.linalg.LinAlgError as e:
        raise np.linalg.LinAlgError(
            f"singular information matrix; bound undefined: {e}") from e
    return np.diag(c).copy()


def initial_v(pop: UserPopulation, power_budget: float, init_sign: str = "paper",
              rng: np.random.Generator | None = None) -> FeedbackMatrix:
    """Matched-filter style starting matrix, projected onto the power sphere.

    With init_sign="paper" the raw matrix is sum over failed users of
    conj(h)p minus the same sum over decoded users; "negated" flips it, which
    aligns every user's expected decision statistic with its decode flag.
    Degenerate all-zero channels fall back to a random matrix on the sphere.
    """
    if init_sign not in ("paper", "negated"):
        raise ValueError(f"init_sign must be 'paper' or 'negated', got {init_sign!r}")
    weights = np.where(pop.decoded, -1.0, 1.0)
    raw = (pop.h_est.conj().T * weights) @ pop.hashes
    if init_sign == "negated":
        raw = -raw
    if np.linalg.norm(raw) == 0:
        if rng is None:
            rng = substream(0, 0, "initial-v-fallback")
        shape = raw.shape
        raw = sample_cgauss(rng, raw.size, 1.0).reshape(shape)
    return FeedbackMatrix(v=raw, power_budget=power_budget).project()


def matched_filter_baseline(pop: UserPopulation, power_budget: float,
                            init_sign: str = "paper") -> FeedbackMatrix:
    """Zero-iteration design used as the comparison curve."""
    return initial_v(pop, power_budget, init_sign=init_sign)


def design_feedback(cfg: SystemConfig, pop: UserPopulation,
                    grid: SenseGrid) -> tuple:
    """Run the normalized projected-gradient design; returns (matrix, trace).

    Each iteration: threshold q_k = mean per-user error at the current
    iterate; active-set communication gradient and sensing gradient, each
    divided by its own Frobenius norm (a zero-norm term is skipped); update
    V/||V|| - eta * (mu * Gc + (1-mu) * Gs); project back onto
    ||V||_F^2 = P*L. Deterministic in its inputs.
    """
    sigma_ch2 = cfg.decision_noise_var
    budget = cfg.power_budget
    fb = initial_v(pop, budget, init_sign=cfg.init_sign,
                   rng=substream(cfg.seed, 0, "initial-v-fallback"))
    mu = cfg.mu
    sign_weights = np.where(pop.decoded, -1.0, 1.0)
    a_grid = _grid_steering(cfg.m, grid)
    s2 = np.sin(grid.angles) ** 2
    v_theta = cfg.sigma_e2_mw / (2.0 * cfg.rho0_linear
                                 * cfg.target_dist ** (-2.0 * cfg.alpha_t)
                                 * np.pi ** 2 * s2)

    def sense_pieces(v_arr):
        rows, y = _beam_energy(v_arr, a_grid)
        if mu < 1 and np.any(y == 0):
            raise ValueError(
                "zero beam energy toward a grid angle; sensing gradient undefined")
        return rows, y

    def sense_score(y):
        # recorded even for comm-only runs; a blind grid angle scores inf there
        with np.errstate(divide="ignore"):
            return float(np.mean(np.where(y > 0, v_theta / y, np.inf)))

    perr = per_user_error(fb, pop, sigma_ch2)
    rows, y = sense_pieces(fb.v)
    steps = []
    for k in range(1, cfg.n_stp + 1):
        q_k = float(perr.mean())
        active = perr > q_k
        n_act_dec = int(np.count_nonzero(active & pop.decoded))
        n_act_fail = int(np.count_nonzero(active & ~pop.decoded))
        step = np.zeros_like(fb.v)
        if mu > 0:
            delta_c = (pop.h_est.conj().T * (sign_weights * active)) @ pop.hashes
            norm_c = np.linalg.norm(delta_c)
            if norm_c > 0:
                step += (mu / norm_c) * delta_c
        if mu < 1:
            delta_s = _sense_gradient(a_grid, rows, y, s2)
            norm_s = np.linalg.norm(delta_s)
            if norm_s > 0:
                step += ((1.0 - mu) / norm_s) * delta_s
        new_v = fb.v / np.linalg.norm(fb.v) - cfg.eta * step
        fb = FeedbackMatrix(v=new_v, power_budget=budget).project()
        perr = per_user_error(fb, pop, sigma_ch2)
        rows, y = sense_pieces(fb.v)
        e_c = float(perr.mean())
        e_s = sense_score(y)
        steps.append(DesignStep(
            k=k, q_k=q_k, n_active_decoded=n_act_dec, n_active_failed=n_act_fail,
            e_c=e_c, e_s=e_s, objective=mu * e_c + (1.0 - mu) * e_s,
            v_frob_sq=fb.frobenius_sq))
    return fb, DesignTrace(steps=tuple(steps))
