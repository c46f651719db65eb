from .ddpg import DdpgAgent, DdpgConfig
from .loop import DivergenceError, EpisodeStats, evaluate_agent, train
from .replay import Batch, ReplayBuffer, Transition
from .sac import SacAgent, SacConfig

ddpg_train = train

__all__ = [
    "Batch",
    "DdpgAgent",
    "DdpgConfig",
    "DivergenceError",
    "EpisodeStats",
    "ReplayBuffer",
    "SacAgent",
    "SacConfig",
    "Transition",
    "ddpg_train",
    "evaluate_agent",
    "train",
]
