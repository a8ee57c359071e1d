from .schedule import NoiseSchedule, ScheduleError
from .attention import PairedCrossAttention, AttentionError
from .backbone import DenoiserBackbone
from .model import GeneratedImage, LotsModel, SampleError, VARIANTS
from .trainer import AdapterTrainer, TrainStepError

__all__ = [
    "NoiseSchedule",
    "ScheduleError",
    "PairedCrossAttention",
    "AttentionError",
    "DenoiserBackbone",
    "GeneratedImage",
    "LotsModel",
    "SampleError",
    "VARIANTS",
    "AdapterTrainer",
    "TrainStepError",
]
