"""otasim: over-the-air computation simulation toolkit.

Simulates function computation over multiple-access channels (adder-MAC
separation failure, nomographic aggregation, analog vs. digital distributed
estimation, distributed detection) and couples the schemes to LEO Walker
constellation geometry.
"""

__version__ = "0.1.0"

from .rng import substream
from .sources import (
    CorrelatedBinaryPair,
    GaussianCeoModel,
    SensorReadings,
    adder_mac_preset,
    sample_ceo,
    sample_pair,
    sample_pairs,
)
from .separation import (
    RateRegion,
    SeparationVerdict,
    adder_mac_sum_capacity,
    joint_entropy,
    separation_fails,
    slepian_wolf_region,
    uncoded_transceive,
)
from .nomographic import NomographicSpec, builtin, evaluate_direct, evaluate_ota
from .channels import (
    CoherentMacChannel,
    Precompensation,
    computation_rate,
    precompensate,
    transmit_coherent,
    transmit_pac,
)
from .estimation import (
    DistortionResult,
    EstimationConfig,
    analog_power_scale,
    analytic_analog_distortion,
    mmse_coefficient,
    run_analog_ceo,
    run_digital_baseline,
    scaling_exponent,
)
from .detection import (
    DetectionConfig,
    DetectionOutcome,
    analytic_bpsk_error,
    fuse_global,
    local_decision,
    psk_map,
    run_detection,
)
from .constellation import (
    GroundStation,
    LosProfile,
    SyncImpairmentModel,
    WalkerConstellation,
    count_los,
    load_preset,
    los_profile,
    ota_downlink_mse,
    propagate,
    slant_metrics,
)
from .experiments import ExperimentConfig, ResultTable, run, validate
