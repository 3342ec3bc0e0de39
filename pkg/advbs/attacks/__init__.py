from .attack import Attack  # noqa
from .config import (  # noqa
    AttackParams,
    BpParams,
    CwParams,
    DdnParams,
    FgsmParams,
    IfgsmParams,
    Pgd2Params,
)
from .outcome import AttackOutcome, Trace, TraceEntry  # noqa
from .fgsm import FGSM, IFGSM, fgsm, ifgsm  # noqa
from .pgd import PGD2, pgd2  # noqa
from .cw import AdamState, CarliniWagner, cw  # noqa
from .ddn import DDN, ddn  # noqa
from .bp import (  # noqa
    BoundaryProjection,
    bp,
    bp_case_in,
    bp_case_out,
    bp_stage1,
    bp_stage2,
    gamma_schedule,
)
