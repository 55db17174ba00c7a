from typing import Dict, Optional, Type, Union

from core.constants import SchedulerConstants
from core.types import SchedulerId, SimulationConfig
from .anki import AnkiScheduler
from .base import Scheduler
from .fsrs import FsrsScheduler
from .hlr import HlrScheduler
from .lector import LectorScheduler
from .sm2 import Sm2Scheduler
from .sspmmc import SspmmcScheduler
from .threshold import ThresholdScheduler

SCHEDULERS: Dict[SchedulerId, Type[Scheduler]] = {
    SchedulerId.LECTOR: LectorScheduler,
    SchedulerId.SM2: Sm2Scheduler,
    SchedulerId.HLR: HlrScheduler,
    SchedulerId.FSRS: FsrsScheduler,
    SchedulerId.ANKI: AnkiScheduler,
    SchedulerId.THRESHOLD: ThresholdScheduler,
    SchedulerId.SSPMMC: SspmmcScheduler,
}


def build_scheduler(
    scheduler_id: Union[SchedulerId, str],
    cfg: SimulationConfig,
    constants: Optional[SchedulerConstants] = None,
) -> Scheduler:
    """
    Creates a scheduler instance from its identifier.

    Args:
        scheduler_id: One of the SchedulerId values (enum or its string form).
        cfg: Simulation configuration supplying interval bounds and target recall.
        constants: Optional constant overrides; defaults otherwise.

    Raises:
        NotImplementedError: If no scheduler is registered under the identifier.
    """
    try:
        key = SchedulerId(scheduler_id)
    except ValueError:
        raise NotImplementedError(f"Scheduler '{scheduler_id}' is not implemented.") from None
    return SCHEDULERS[key](cfg, constants)
