"""Pre-computed diffusion scores from a lattice solve of the log-density
evolution equation, score-embedded training, and ODE denoising."""

from .errors import (
    AssemblyError,
    DivergedTrajectory,
    FormatError,
    FpscoreError,
    GridTooSmall,
    InvalidInput,
    NotConvergedWarning,
    NumericalError,
    ShapeError,
    SingularSystem,
)
from .fields import (
    ImageField,
    LogDensityField,
    ScoreField,
    SdeSpec,
    TimeGrid,
    flatten_index,
    load_image,
    normalize_image,
    save_image,
    unflatten_index,
)
from .kde import KdeConfig, kde_log_density, scott_bandwidth
from .metrics import SsimConstants, SsimResult, mse, ssim
from .network import (
    ScoreNetParams,
    TrainConfig,
    TrainResult,
    adam_step,
    forward,
    init_network,
    lambda_schedule,
    load_checkpoint,
    save_checkpoint,
    sliced_loss,
    train,
)
from .solver import (
    BandedSystem,
    PolicyIterationResult,
    SolverConfig,
    assemble_system,
    central_difference_score,
    policy_iteration,
    solve_banded,
)
from .transport import EmbeddedTrajectory, average_drift, embed_forward, ode_denoise

__version__ = "0.1.0"
