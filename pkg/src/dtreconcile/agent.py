"""Tabular TD agent that revises a monthly forecast from daily actuals.

An episode is one monthly cycle walked day by day. The state is the day
index; each day the agent picks one of three adjustments to the daily
base forecast (up one unit, keep, down one unit) under an epsilon-greedy
policy over a Q table, receives the day's actual as reward, and applies
an on-policy one-step TD update. After every observed day the revised
monthly forecast (RMF) is the sum of the adjusted daily forecasts.

Learning is carried by Q keyed on (day index, action); a state-value
table V is updated with the same rule purely as a diagnostic.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DistributionError, ShapeError, StreamOrderError
from .errors import InsufficientDataError
from .forecasting import ForecastSet
from .seeding import rng_for

MAX_CYCLE_DAYS = 31
N_ACTIONS = 3

ACTION_INCREASE = 0
ACTION_KEEP = 1
ACTION_DECREASE = 2

_ACTION_DELTAS = np.array([1.0, 0.0, -1.0])
# Argmax ties resolve conservatively to "keep", then toward "decrease":
# with collapsing actuals a freshly penalized greedy action must not
# flip the policy to "increase".
_TIE_PREFERENCE = (ACTION_KEEP, ACTION_DECREASE, ACTION_INCREASE)


@dataclass(frozen=True)
class AgentConfig:
    """Hyperparameters for training and online revision.

    ``tolerance`` is the action bucketing width in forecast units;
    ``adjustment_unit`` (default: the tolerance) is the actual step each
    action moves a daily forecast by.
    """

    tolerance: float
    exploration: float = 0.05
    step_size: float = 0.1
    discount: float = 1.0
    episodes: int = 1
    seed: int = 0
    online_updates: bool = True
    adjustment_unit: float | None = None
    clamp_nonnegative: bool = False

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0.0 <= self.exploration <= 1.0:
            raise ValueError("exploration probability must be in [0, 1]")
        if not 0.0 < self.step_size <= 1.0:
            raise ValueError("step size must be in (0, 1]")
        if self.episodes < 0:
            raise ValueError("episodes must be nonnegative")
        if self.adjustment_unit is not None and not self.adjustment_unit > 0:
            raise ValueError("adjustment unit must be positive")

    @property
    def unit(self) -> float:
        return self.tolerance if self.adjustment_unit is None else self.adjustment_unit

    def config_hash(self) -> str:
        payload = json.dumps(
            {k: v for k, v in sorted(self.__dict__.items())}, sort_keys=True
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class EpisodeState:
    """Day index t (1-based) plus the remaining monthly total payload."""

    day_index: int
    remaining_total: float

    def __post_init__(self) -> None:
        if not 1 <= self.day_index <= MAX_CYCLE_DAYS:
            raise ValueError(f"day index {self.day_index} outside 1..{MAX_CYCLE_DAYS}")
        if not np.isfinite(self.remaining_total):
            raise ValueError("remaining total must be finite")


@dataclass(frozen=True)
class ActionSet:
    """The three candidate adjusted daily forecasts, ordered
    (increase, keep, decrease)."""

    candidates: tuple[float, float, float]


@dataclass
class ValueTable:
    """Q(s, a) over (day, action) plus the diagnostic V(s) per day."""

    q: np.ndarray  # (MAX_CYCLE_DAYS, N_ACTIONS)
    v: np.ndarray  # (MAX_CYCLE_DAYS,)

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.q.shape != (MAX_CYCLE_DAYS, N_ACTIONS):
            raise ShapeError(f"Q table must be {MAX_CYCLE_DAYS}x{N_ACTIONS}")
        if self.v.shape != (MAX_CYCLE_DAYS,):
            raise ShapeError(f"V table must have {MAX_CYCLE_DAYS} entries")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.v))):
            raise ValueError("value tables must be finite")

    def q_row(self, day_index: int) -> np.ndarray:
        return self.q[day_index - 1]

    def copy(self) -> "ValueTable":
        return ValueTable(self.q.copy(), self.v.copy())


@dataclass(frozen=True)
class CycleData:
    """One monthly episode: daily forecasts, daily actuals, monthly total."""

    forecasts: np.ndarray
    actuals: np.ndarray
    monthly_total: float
    label: str = ""

    def __post_init__(self) -> None:
        forecasts = np.atleast_1d(np.asarray(self.forecasts, dtype=float))
        actuals = np.atleast_1d(np.asarray(self.actuals, dtype=float))
        object.__setattr__(self, "forecasts", forecasts)
        object.__setattr__(self, "actuals", actuals)
        if forecasts.size != actuals.size:
            raise ShapeError(
                f"{forecasts.size} forecasts but {actuals.size} actuals"
            )
        if not 1 <= forecasts.size <= MAX_CYCLE_DAYS:
            raise ShapeError(f"cycle length {forecasts.size} outside 1..{MAX_CYCLE_DAYS}")


@dataclass(frozen=True)
class DayRecord:
    day_index: int
    action: int
    adjusted_forecast: float
    actual: float
    rmf: float


@dataclass(frozen=True)
class ReconciliationTrace:
    """Per-day revision record for one traversed cycle."""

    records: tuple[DayRecord, ...]
    monthly_total: float

    def __len__(self) -> int:
        return len(self.records)

    @property
    def rmf(self) -> np.ndarray:
        return np.array([rec.rmf for rec in self.records])

    @property
    def final_rmf(self) -> float:
        if not self.records:
            raise ValueError("empty trace has no final revised forecast")
        return self.records[-1].rmf


def init_state_values(monthly_total: float, daily_forecasts) -> ValueTable:
    """Initialize V(S_t) = M minus cumulative forecasts through day t.

    Q rows start equal to their day's V for all three actions. Days past
    the cycle length keep the end-of-cycle remainder so the table always
    covers the maximum cycle length.
    """
    daily = np.atleast_1d(np.asarray(daily_forecasts, dtype=float))
    if daily.size == 0:
        raise InsufficientDataError("cannot initialize values for an empty cycle")
    if daily.size > MAX_CYCLE_DAYS:
        raise ShapeError(f"cycle length {daily.size} exceeds {MAX_CYCLE_DAYS}")
    remaining = monthly_total - np.cumsum(daily)
    v = np.full(MAX_CYCLE_DAYS, remaining[-1])
    v[: daily.size] = remaining
    q = np.repeat(v[:, None], N_ACTIONS, axis=1)
    return ValueTable(q=q, v=v)


def build_action_set(y_hat_t: float, cfg: AgentConfig) -> ActionSet:
    """Candidate adjusted forecasts (y+u, y, y-u) for one day."""
    u = cfg.unit
    return ActionSet((y_hat_t + u, y_hat_t, y_hat_t - u))


def adjusted_forecast(y_hat_t: float, action: int, cfg: AgentConfig) -> float:
    value = y_hat_t + _ACTION_DELTAS[action] * cfg.unit
    if cfg.clamp_nonnegative:
        value = max(value, 0.0)
    return float(value)


def greedy_action(q_row: np.ndarray) -> int:
    """Argmax with ties resolved keep > decrease > increase."""
    best = np.max(q_row)
    for action in _TIE_PREFERENCE:
        if q_row[action] == best:
            return action
    raise AssertionError("unreachable")


def egreedy_probabilities(q_row, epsilon: float) -> np.ndarray:
    """Epsilon-greedy selection probabilities over the three actions."""
    q_row = np.asarray(q_row, dtype=float)
    if q_row.shape != (N_ACTIONS,) or not np.all(np.isfinite(q_row)):
        raise DistributionError("need a finite Q row with one entry per action")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    probs = np.full(N_ACTIONS, epsilon / N_ACTIONS)
    probs[greedy_action(q_row)] += 1.0 - epsilon
    return probs


def select_action(probs, rng: np.random.Generator) -> int:
    """Draw one action index; consumes exactly one uniform variate."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (N_ACTIONS,):
        raise DistributionError(f"need {N_ACTIONS} probabilities")
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise DistributionError("probabilities must be finite and nonnegative")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise DistributionError(f"probabilities sum to {probs.sum()}, not 1")
    u = rng.random()
    edge = 0.0
    for action in range(N_ACTIONS - 1):
        edge += probs[action]
        if u < edge:
            return action
    return N_ACTIONS - 1


def sarsa_step(
    table: ValueTable,
    s: EpisodeState,
    a: int,
    r: float,
    s_next: EpisodeState | None,
    a_next: int | None,
    cfg: AgentConfig,
) -> ValueTable:
    """One on-policy TD(0) update; ``s_next=None`` is the terminal case.

    Q(s,a) moves toward r + gamma * Q(s',a'); V(s) is updated with the
    same rule against V(s') as a diagnostic.
    """
    alpha, gamma = cfg.step_size, cfg.discount
    t = s.day_index - 1
    if s_next is None:
        q_next = 0.0
        v_next = 0.0
    else:
        if a_next is None:
            raise ValueError("non-terminal update needs the successor action")
        q_next = table.q[s_next.day_index - 1, a_next]
        v_next = table.v[s_next.day_index - 1]
    table.q[t, a] += alpha * (r + gamma * q_next - table.q[t, a])
    table.v[t] += alpha * (r + gamma * v_next - table.v[t])
    return table


def _state(day_index: int, monthly_total: float, forecasts: np.ndarray) -> EpisodeState:
    remaining = monthly_total - float(np.sum(forecasts[:day_index]))
    return EpisodeState(day_index=day_index, remaining_total=remaining)


def _policy_action(table: ValueTable, day_index: int, cfg: AgentConfig,
                   rng: np.random.Generator) -> int:
    probs = egreedy_probabilities(table.q_row(day_index), cfg.exploration)
    return select_action(probs, rng)


def _greedy_sum(table: ValueTable, forecasts: np.ndarray, cfg: AgentConfig,
                days: Iterable[int]) -> float:
    return sum(
        adjusted_forecast(forecasts[t - 1], greedy_action(table.q_row(t)), cfg)
        for t in days
    )


def run_episode(
    cycle: CycleData,
    table: ValueTable,
    cfg: AgentConfig,
    rng: np.random.Generator,
) -> tuple[ValueTable, ReconciliationTrace]:
    """Traverse one training cycle, updating the table in place.

    The trace's RMF for day t sums the committed adjusted forecasts of
    days 1..t plus greedy adjustments of the remaining days under the
    current Q.
    """
    n = len(cycle.forecasts)
    m = cycle.monthly_total
    records: list[DayRecord] = []
    committed_sum = 0.0
    action = _policy_action(table, 1, cfg, rng)
    for t in range(1, n + 1):
        reward = float(cycle.actuals[t - 1])
        state = _state(t, m, cycle.forecasts)
        if t < n:
            action_next = _policy_action(table, t + 1, cfg, rng)
            state_next = _state(t + 1, m, cycle.forecasts)
        else:
            action_next = None
            state_next = None
        sarsa_step(table, state, action, reward, state_next, action_next, cfg)
        committed_sum += adjusted_forecast(cycle.forecasts[t - 1], action, cfg)
        rmf = committed_sum + _greedy_sum(table, cycle.forecasts, cfg, range(t + 1, n + 1))
        records.append(
            DayRecord(
                day_index=t,
                action=action,
                adjusted_forecast=adjusted_forecast(cycle.forecasts[t - 1], action, cfg),
                actual=reward,
                rmf=rmf,
            )
        )
        action = action_next
    return table, ReconciliationTrace(tuple(records), monthly_total=m)


def train(history: Sequence[CycleData], cfg: AgentConfig) -> ValueTable:
    """Run ``cfg.episodes`` chronological passes over the training cycles.

    The table is initialized from the first cycle's monthly total and
    base forecasts, then updated across all passes.
    """
    if cfg.episodes > 0 and len(history) == 0:
        raise InsufficientDataError("training requires at least one cycle")
    if not history:
        raise InsufficientDataError("cannot initialize a table without data")
    first = history[0]
    table = init_state_values(first.monthly_total, first.forecasts)
    max_reward = max(float(np.max(np.abs(c.actuals))) for c in history)
    value_scale = float(np.max(np.abs(table.v)))
    if cfg.step_size * max_reward > max(value_scale, 1e-12):
        warnings.warn(
            f"step size {cfg.step_size} times max reward {max_reward} exceeds "
            f"the initial value scale {value_scale}; updates may diverge",
            stacklevel=2,
        )
    rng = rng_for(cfg.seed, "train")
    for _ in range(cfg.episodes):
        for cycle in history:
            run_episode(cycle, table, cfg, rng)
    return table


def _iter_stream(actual_stream) -> Iterable[tuple[int | None, float]]:
    for item in actual_stream:
        if isinstance(item, (tuple, list)) and len(item) == 2:
            yield int(item[0]), float(item[1])
        else:
            yield None, float(item)


def reconcile_online(
    table: ValueTable,
    forecast: ForecastSet,
    actual_stream,
    cfg: AgentConfig,
    rng: np.random.Generator,
) -> ReconciliationTrace:
    """Stream a test cycle's actuals and emit a revised total per day.

    After each observed day the greedy action for every day of the cycle
    is recomputed from the current Q, and RMF is the sum of all n
    adjusted daily forecasts. Actuals influence the revision only
    through the TD updates (enabled by ``cfg.online_updates``), never by
    direct substitution.

    The stream may cover only part of the cycle; items are either bare
    values or (day_index, value) pairs, which must arrive in day order.
    """
    n = len(forecast)
    if n > MAX_CYCLE_DAYS:
        raise ShapeError(f"cycle length {n} exceeds {MAX_CYCLE_DAYS}")
    daily = forecast.daily
    m = forecast.monthly_total
    records: list[DayRecord] = []
    action: int | None = None
    for expected_day, (day, actual) in enumerate(_iter_stream(actual_stream), start=1):
        if day is not None and day != expected_day:
            raise StreamOrderError(
                f"expected day {expected_day}, got day {day}"
            )
        t = expected_day
        if t > n:
            raise StreamOrderError(f"day {t} beyond the {n}-day cycle")
        if action is None:
            action = _policy_action(table, t, cfg, rng)
        if t < n:
            action_next = _policy_action(table, t + 1, cfg, rng)
            state_next = _state(t + 1, m, daily)
        else:
            action_next = None
            state_next = None
        if cfg.online_updates:
            state = _state(t, m, daily)
            sarsa_step(table, state, action, actual, state_next, action_next, cfg)
        rmf = _greedy_sum(table, daily, cfg, range(1, n + 1))
        records.append(
            DayRecord(
                day_index=t,
                action=action,
                adjusted_forecast=adjusted_forecast(daily[t - 1], action, cfg),
                actual=actual,
                rmf=rmf,
            )
        )
        action = action_next
    return ReconciliationTrace(tuple(records), monthly_total=m)


def save_table(table: ValueTable, path, cfg: AgentConfig) -> None:
    """Write the Q table as `day_index,action_index,q_value` rows.

    The single header line carries the config hash and seed so a
    snapshot can be matched back to the run that produced it.
    """
    lines = [f"# config_hash={cfg.config_hash()} seed={cfg.seed}"]
    for t in range(1, MAX_CYCLE_DAYS + 1):
        for a in range(N_ACTIONS):
            lines.append(f"{t},{a},{float(table.q[t - 1, a])!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_table(path) -> tuple[ValueTable, dict]:
    """Load a Q snapshot; V is rebuilt as the per-day Q maximum."""
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing snapshot header line")
    meta = {}
    for token in lines[0].lstrip("# ").split():
        if "=" in token:
            key, value = token.split("=", 1)
            meta[key] = value
    q = np.zeros((MAX_CYCLE_DAYS, N_ACTIONS))
    for line in lines[1:]:
        day_str, action_str, value_str = line.split(",")
        q[int(day_str) - 1, int(action_str)] = float(value_str)
    return ValueTable(q=q, v=q.max(axis=1)), meta
