"""Door-to-door commute infection risk estimation with uncertainty bounds.

The library estimates the probability that a commuter is infected during
a multimodal trip (transit, walking, biking, ride-hailing, driving) and
the standard error of that estimate, over a synthetic urban data bundle.

Layers, bottom up: closed-form contact/surface physics (`physics`),
per-mode segment risk and path composition (`segments`), declared random
inputs and bootstrap variance (`sampling`, `uncertainty`), routing and
route choice (`network`, `planner`), synthetic data (`synth`, `demo`),
file schemas (`dataio`), and the end-to-end evaluator (`pipeline`) with
batch analysis (`analysis`), a CLI (`cli`) and an HTTP API (`service`).
"""

from .network import MultimodalNetwork, TripQuery
from .physics import (
    AirborneParams,
    Contact,
    FomiteParams,
    contact_infection_prob,
    fomite_infection_prob,
    multi_contact_prob,
)
from .pipeline import DataBundle, evaluate_batch, evaluate_trip
from .planner import ChoiceModel, NoPathError, PlannerConfig, choose, commonality_factor, plan
from .sampling import RandomInput, derive_stream
from .segments import (
    ActiveLeg,
    ExposureContext,
    RideHailLeg,
    RiskBreakdown,
    Segment,
    TransitLeg,
    TravelMode,
    path_risk,
    segment_surface_risk,
    trip_risk,
)
from .uncertainty import (
    BootstrapConfig,
    UncertainRiskEstimate,
    bootstrap_variance,
    trip_variance,
)

__version__ = "0.1.0"

__all__ = [
    "AirborneParams",
    "Contact",
    "FomiteParams",
    "contact_infection_prob",
    "multi_contact_prob",
    "fomite_infection_prob",
    "Segment",
    "TravelMode",
    "TransitLeg",
    "ActiveLeg",
    "RideHailLeg",
    "ExposureContext",
    "RiskBreakdown",
    "path_risk",
    "segment_surface_risk",
    "trip_risk",
    "RandomInput",
    "derive_stream",
    "BootstrapConfig",
    "UncertainRiskEstimate",
    "bootstrap_variance",
    "trip_variance",
    "MultimodalNetwork",
    "TripQuery",
    "plan",
    "choose",
    "commonality_factor",
    "PlannerConfig",
    "ChoiceModel",
    "NoPathError",
    "DataBundle",
    "evaluate_trip",
    "evaluate_batch",
]
