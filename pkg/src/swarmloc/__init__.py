"""Multi-UAV mutual localization simulator and numerics library."""

__version__ = "0.1.0"

from .benchmarks import (GeometryBenchConfig, StepsizeBenchConfig,
                         box_half_extents, run_geometry_benchmark,
                         run_stepsize_benchmark, stepsize_summary)
from .channel import (RangingChannel, SigmaDTable, build_sigma_d_table,
                      invert_rssi, measure_distance, rssi_at_distance,
                      sample_rssi_sigma)
from .config import (config_from_dict, config_hash, config_to_dict,
                     load_config, load_preset, save_config)
from .defense import (CloudRegistry, ReputationTable, TadConfig, plausibility,
                      propagate_reputation, tad_update, upload_reputation)
from .engine import (DefenseConfig, MetricsRecord, ScenarioConfig, WorldState,
                     honest_target_ids, init_world, mean_error,
                     neighbors_in_range, run_repetitions, run_scenario,
                     step_mobility, tick)
from .errors import (ConfigError, DegenerateGeometryError,
                     NoTrustedAnchorError, SingularGeometryError,
                     SwarmlocError)
from .localizers import (AdmmConfig, ConvertedError, GdConfig, ObservationSet,
                         convert_error, error_weights, localize_gd,
                         localize_l1_admm, localize_ls, soft_threshold)
from .magd import (MagdConfig, MagdState, magd_adapt, magd_init,
                   magd_inner_descent, magd_tick)
from .model import (AnchorReport, PositionNoiseModel, UavState, observe,
                    sample_position_offset, vec3)
from .threat import (AttackerConfig, AttackMode, AttackStrategy,
                     attack_active, stalk_waypoint, tamper_report)
