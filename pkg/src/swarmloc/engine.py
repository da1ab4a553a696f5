"""World state, random-waypoint mobility, neighbor discovery and the per-tick
pipeline: move -> observe -> tamper -> localize -> detect -> record."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import RangingChannel
from .defense import (CloudRegistry, ReputationTable, TadConfig,
                      propagate_reputation, tad_update, upload_reputation)
from .errors import ConfigError
from .localizers import ObservationSet, convert_error
from .magd import MagdConfig, MagdState, magd_init, magd_tick
from .model import (PositionNoiseModel, UavState, observe,
                    sample_position_offset)
from .threat import AttackerConfig, attack_active, stalk_waypoint, tamper_report

DT = 1.0  # seconds per tick
STALKER_STOP_RADIUS = 1.0  # m; prevents overshoot oscillation around the victim
# With the trust defense enabled, a refined estimate further than this many
# sigma_p from the target's own position sensor is discarded in favor of the
# sensor reading.  The threshold sits well above the combined spread of honest
# estimation error and sensor noise, so it only catches hijacked estimates.
SENSOR_GATE_SIGMA = 10.0

METRICS_HEADER = ["run_id", "rep", "t", "target_id", "err_m", "n_in_range",
                  "alpha_hat", "d_bar", "coasting"]
REPUTATION_TRACE_HEADER = ["t", "owner", "neighbor", "r", "r_blended"]


@dataclass
class DefenseConfig:
    tad_enabled: bool = False
    rp_enabled: bool = False
    tad: TadConfig = field(default_factory=TadConfig)
    malicious_share_inverted: bool = True


@dataclass
class ScenarioConfig:
    seed: int = 42
    reps: int = 10
    map_size: tuple = (300.0, 300.0, 10.0)
    n_anchors: int = 100
    n_targets: int = 10
    speed_min: float = 0.3
    speed_max: float = 1.7
    speed_redraw_period: int | None = None
    sigma_p_min: float = 0.1 ** 0.5
    sigma_p_max: float = 3.0 ** 0.5
    total_steps: int = 100
    loc_range: float = 50.0
    channel: RangingChannel = field(default_factory=RangingChannel)
    magd: MagdConfig = field(default_factory=MagdConfig)
    attacker: AttackerConfig | None = None
    defense: DefenseConfig = field(default_factory=DefenseConfig)

    def __post_init__(self):
        if self.n_anchors < 0 or self.n_targets < 0:
            raise ConfigError("fleet counts must be non-negative")
        if self.total_steps < 1:
            raise ConfigError("total_steps must be >= 1")
        if self.loc_range <= 0:
            raise ConfigError("loc_range must be positive")
        if self.attacker is not None:
            if self.attacker.n_malicious > self.n_anchors:
                raise ConfigError("more malicious anchors than anchors")
            if self.attacker.n_malicious_targets > self.n_targets:
                raise ConfigError("more malicious targets than targets")

    def noise_model(self) -> PositionNoiseModel:
        return PositionNoiseModel(self.sigma_p_min, self.sigma_p_max)


@dataclass
class MetricsRecord:
    run_id: str
    rep: int
    t: int
    target_id: int
    err_m: float
    n_in_range: int
    alpha_hat: float
    d_bar: float
    coasting: bool

    def as_row(self):
        return [self.run_id, self.rep, self.t, self.target_id,
                f"{self.err_m:.6f}", self.n_in_range,
                f"{self.alpha_hat:.6f}", f"{self.d_bar:.6f}",
                int(self.coasting)]


@dataclass
class WorldState:
    cfg: ScenarioConfig
    uavs: list
    target_ids: list
    victim_id: int | None
    estimators: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    cloud: CloudRegistry = field(default_factory=CloudRegistry)

    def uav(self, uav_id: int) -> UavState:
        return self.uavs[uav_id]


def _uniform_point(map_size, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, 1.0, 3) * np.asarray(map_size, dtype=float)


def init_world(cfg: ScenarioConfig, rng: np.random.Generator) -> WorldState:
    """Place the fleet uniformly in the map volume, draw per-UAV noise/speed
    and assign malicious roles."""
    noise = cfg.noise_model()
    uavs = []
    n_total = cfg.n_anchors + cfg.n_targets
    for uid in range(n_total):
        is_target = uid >= cfg.n_anchors
        sigma_p = cfg.sigma_p_max if is_target else noise.draw_sigma_p(rng)
        uavs.append(UavState(
            id=uid,
            true_pos=_uniform_point(cfg.map_size, rng),
            sigma_p=sigma_p,
            speed=float(rng.uniform(cfg.speed_min, cfg.speed_max)),
            destination=_uniform_point(cfg.map_size, rng),
            role="target" if is_target else "anchor",
        ))
    target_ids = list(range(cfg.n_anchors, n_total))
    victim_id = None
    if cfg.attacker is not None:
        atk = cfg.attacker
        for uid in rng.choice(cfg.n_anchors, size=atk.n_malicious, replace=False):
            uavs[uid].malicious = True
        if atk.strategy.kind == "stalking":
            victim_id = atk.strategy.victim_id
            if victim_id is None:
                victim_id = target_ids[0]
                # Write the resolution back so attack scheduling sees it.
                atk.strategy.victim_id = victim_id
        if atk.n_malicious_targets > 0:
            candidates = [tid for tid in target_ids if tid != victim_id]
            for tid in rng.choice(candidates, size=atk.n_malicious_targets,
                                  replace=False):
                uavs[tid].malicious = True
    world = WorldState(cfg=cfg, uavs=uavs, target_ids=target_ids,
                       victim_id=victim_id)
    for tid in target_ids:
        world.tables[tid] = ReputationTable(owner_id=tid)
    return world


def step_mobility(world: WorldState, rng: np.random.Generator, t: int):
    """Advance every UAV one tick of random-waypoint motion.  Stalkers re-aim
    at the victim's true position each tick and hold a 1 m stop radius."""
    cfg = world.cfg
    stalking = (cfg.attacker is not None
                and cfg.attacker.strategy.kind == "stalking")
    if (cfg.speed_redraw_period and t > 1
            and (t - 1) % cfg.speed_redraw_period == 0):
        for tid in world.target_ids:
            world.uavs[tid].speed = float(rng.uniform(cfg.speed_min, cfg.speed_max))
    hi = np.asarray(cfg.map_size, dtype=float)
    for uav in world.uavs:
        is_stalker = stalking and uav.malicious
        if is_stalker:
            uav.destination = stalk_waypoint(world.uav(world.victim_id).true_pos)
        remaining = float(np.linalg.norm(uav.destination - uav.true_pos))
        if is_stalker and remaining <= STALKER_STOP_RADIUS:
            continue
        if remaining <= 1e-12:
            uav.destination = _uniform_point(cfg.map_size, rng)
            remaining = float(np.linalg.norm(uav.destination - uav.true_pos))
            if remaining <= 1e-12:
                continue
        step = min(uav.speed * DT, remaining)
        if is_stalker:
            # Close in no further than the stop radius so a stalker never
            # lands exactly on the victim.
            step = min(step, remaining - STALKER_STOP_RADIUS)
        uav.true_pos = uav.true_pos + (uav.destination - uav.true_pos) / remaining * step
        uav.true_pos = np.clip(uav.true_pos, 0.0, hi)
        if step >= remaining - 1e-12 and not is_stalker:
            uav.destination = _uniform_point(cfg.map_size, rng)


def neighbors_in_range(world: WorldState, target: UavState, loc_range: float):
    """Every other UAV (anchors and targets alike) within true distance
    loc_range of the target."""
    if loc_range <= 0:
        raise ConfigError("loc_range must be positive")
    out = []
    for uav in world.uavs:
        if uav.id == target.id:
            continue
        if np.linalg.norm(uav.true_pos - target.true_pos) <= loc_range:
            out.append(uav)
    return out


def tick(world: WorldState, t: int, rng: np.random.Generator,
         run_id: str = "run", rep: int = 0, reputation_trace: list | None = None):
    """One simulation step; returns one MetricsRecord per target."""
    cfg = world.cfg
    atk = cfg.attacker
    defense = cfg.defense
    step_mobility(world, rng, t)
    records = []
    pending_uploads = []
    map_center = np.asarray(cfg.map_size, dtype=float) / 2.0

    for tid in world.target_ids:
        target = world.uav(tid)
        nbrs = neighbors_in_range(world, target, cfg.loc_range)
        reports = []
        for nb in nbrs:
            rep_nb = observe(nb, target.true_pos, cfg.channel, rng)
            if (atk is not None and atk.enabled and nb.malicious
                    and attack_active(atk.strategy, nb.id, tid, t, rng,
                                      cfg.total_steps)):
                rep_nb = tamper_report(atk.mode, rep_nb, rng)
            reports.append(rep_nb)
        obs = ObservationSet(tid, reports) if reports else None

        table = world.tables[tid]
        if defense.tad_enabled:
            if defense.rp_enabled:
                reputations = [propagate_reputation(table, world.cloud, nb.id)
                               for nb in nbrs]
            else:
                reputations = [table.get(nb.id) for nb in nbrs]
        else:
            reputations = [1.0] * len(nbrs)

        est = world.estimators.get(tid)
        if est is None:
            # Seed the estimate from the target's own (noisy) position sensor,
            # not from neighbor reports, so tampered reports cannot poison the
            # starting point.
            p0 = target.true_pos + sample_position_offset(target.sigma_p, rng)
            est = magd_init(cfg.magd, len(obs) if obs is not None else 1, p0)
            world.estimators[tid] = est

        p_hat = magd_tick(est, obs, reputations, cfg.channel, cfg.magd)
        # Fall back to the target's own position sensor when there are no
        # trusted anchors -- coasting would otherwise serve an ever-staler
        # held estimate.  With the anomaly-detection defense enabled, the
        # sensor additionally gates the refined estimate: an irreconcilable
        # estimate is treated as hijacked and discarded.  Either way the
        # detector then scores neighbors against a sane reference, so
        # unfairly condemned neighbors can rehabilitate instead of being
        # judged by a frozen or captured position.
        sensor_pos = target.true_pos + sample_position_offset(target.sigma_p, rng)
        gate = (defense.tad_enabled
                and np.linalg.norm(est.p_hat - sensor_pos) > SENSOR_GATE_SIGMA * target.sigma_p)
        if est.coasting or gate:
            est.p_hat = sensor_pos
            p_hat = est.p_hat

        if defense.tad_enabled and obs is not None:
            for rep_nb in obs.reports:
                conv = convert_error(rep_nb.measured_distance,
                                     rep_nb.reported_sigma_p, cfg.channel)
                tad_update(table, rep_nb, p_hat, conv, defense.tad)
            invert = target.malicious and defense.malicious_share_inverted
            pending_uploads.append((table, invert))
            if reputation_trace is not None:
                for nb, r_blend in zip(nbrs, reputations):
                    reputation_trace.append(
                        [t, tid, nb.id, table.get(nb.id), r_blend])

        records.append(MetricsRecord(
            run_id=run_id, rep=rep, t=t, target_id=tid,
            err_m=float(np.linalg.norm(p_hat - target.true_pos)),
            n_in_range=len(nbrs),
            alpha_hat=est.alpha_hat,
            d_bar=est.d_hist[-1] if est.d_hist else 0.0,
            coasting=est.coasting,
        ))

    # Uploads commit after every target's pass: readers within a tick only
    # observe the previous tick's snapshots.
    for table, invert in pending_uploads:
        upload_reputation(table, world.cloud, t, invert=invert)
    return records


def run_scenario(cfg: ScenarioConfig, rep: int = 0, run_id: str = "run",
                 reputation_trace: list | None = None):
    """One full repetition; returns (records, world).  The record stream is a
    pure function of (config, seed, rep)."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, rep]))
    world = init_world(cfg, rng)
    records = []
    for t in range(1, cfg.total_steps + 1):
        records.extend(tick(world, t, rng, run_id=run_id, rep=rep,
                            reputation_trace=reputation_trace))
    return records, world


def honest_target_ids(world: WorldState) -> set:
    return {tid for tid in world.target_ids if not world.uav(tid).malicious}


def mean_error(records, target_ids=None, t_min: int | None = None) -> float:
    """Mean localization error over records, optionally filtered."""
    errs = [r.err_m for r in records
            if (target_ids is None or r.target_id in target_ids)
            and (t_min is None or r.t >= t_min)]
    return float(np.mean(errs))


def run_repetitions(cfg: ScenarioConfig, run_id: str = "run",
                    reputation_trace: list | None = None):
    """All configured repetitions; returns (records, per-rep mean error over
    honest targets)."""
    all_records = []
    rep_means = []
    for rep in range(cfg.reps):
        records, world = run_scenario(cfg, rep=rep, run_id=run_id,
                                      reputation_trace=reputation_trace)
        all_records.extend(records)
        rep_means.append(mean_error(records, target_ids=honest_target_ids(world)))
    return all_records, rep_means
