"""Coverage simulation and Q-learning divergence control for a ceiling
VCSEL-array optical wireless downlink."""

from .agent import ExplorationSchedule, Policy, QTable, TrainLog, epsilon, select_action, train, update
from .baseline import exhaustive_policy
from .env import EnvState, RewardCache, VCSELEnv
from .errors import ConfigError, ContractError, GeometryError
from .optics import FrontEnd, angular_deviation, concentrator_gain, irradiance, received_power
from .radio_map import SinrMap, coverage, power_matrix, sinr_map
from .scene import BeamSet, ReceiverGrid, SceneConfig, build_beams, build_grid, grid_vector, load_config

__version__ = "0.1.0"
