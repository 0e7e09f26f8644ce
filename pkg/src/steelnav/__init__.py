"""Autonomous navigation decisions for a two-footed steel-surface robot.

The pipeline turns a raw point cloud of a steel structure into a locomotion
decision: find the dominant planar patch, trace its non-convex boundary,
test whether the robot's foot rectangle fits, compare the patch height with
the robot base, and pick the wheeled (mobile) or stepping (inch-worm)
transformation.  Companion simulators close the loop for path tracking,
magnet gap control, and the inch-worm jump sequence.
"""

from .boundary import BoundaryEstimate, directed_hausdorff, estimate_boundary
from .cloud import (
    FilterConfig,
    Frame,
    PlanarPatch,
    PointCloud,
    RigidTransform,
    centroid,
    load_cloud,
    passthrough,
    plane_normal,
    ransac_plane,
    save_cloud,
    transform_point,
    voxel_downsample,
)
from .drive import (
    DriveCommand,
    DriveGains,
    DriveState,
    Pose2D,
    TrackingError,
    TrackResult,
    error_rate,
    mixed_pid_step,
    simulate_track,
    tracking_error,
    trace_to_csv,
    wrap_angle,
    write_trace_csv,
)
from .actuate import (
    CANONICAL_JUMP_SEQUENCE,
    DEFAULT_MAGNET_GAINS,
    InchwormPhase,
    InchwormState,
    JumpEvent,
    JumpPlanConfig,
    MagnetArrayState,
    MagnetMode,
    MagnetPlant,
    inchworm_step,
    initial_jump_state,
    magnet_pid_step,
    plan_jump_trajectory,
    run_jump_sequence,
    simulate_magnet,
)
from .errors import (
    ConfigError,
    DegenerateAnchorError,
    DomainError,
    NavError,
    ParseError,
    TrajectoryError,
    TransitionError,
)
from .footprint import (
    CandidateRectangle,
    FootGeometry,
    FootPose,
    PlacementReport,
    build_candidate,
    check_placeability,
    closest_points,
    place_foot,
)
from .pid import PIDGains, PIDState, pid_step
from .switching import (
    HeightConfig,
    SwitchDecision,
    Transformation,
    decide,
    decision_to_dict,
    decision_to_json,
    height_availability,
    plane_availability,
    switching_function,
)
from .synth import CloudShape, SyntheticCloudSpec, generate_cloud, surface_grid, surface_point_count

__version__ = "0.1.0"

__all__ = [
    "BoundaryEstimate",
    "CANONICAL_JUMP_SEQUENCE",
    "CandidateRectangle",
    "CloudShape",
    "ConfigError",
    "DEFAULT_MAGNET_GAINS",
    "DegenerateAnchorError",
    "DomainError",
    "DriveCommand",
    "DriveGains",
    "DriveState",
    "FilterConfig",
    "FootGeometry",
    "FootPose",
    "Frame",
    "HeightConfig",
    "InchwormPhase",
    "InchwormState",
    "JumpEvent",
    "JumpPlanConfig",
    "MagnetArrayState",
    "MagnetMode",
    "MagnetPlant",
    "NavError",
    "PIDGains",
    "PIDState",
    "ParseError",
    "PlacementReport",
    "PlanarPatch",
    "PointCloud",
    "Pose2D",
    "RigidTransform",
    "SwitchDecision",
    "SyntheticCloudSpec",
    "TrackResult",
    "TrackingError",
    "TrajectoryError",
    "Transformation",
    "TransitionError",
    "build_candidate",
    "centroid",
    "check_placeability",
    "closest_points",
    "decide",
    "decision_to_dict",
    "decision_to_json",
    "directed_hausdorff",
    "error_rate",
    "estimate_boundary",
    "generate_cloud",
    "height_availability",
    "inchworm_step",
    "initial_jump_state",
    "load_cloud",
    "magnet_pid_step",
    "mixed_pid_step",
    "passthrough",
    "pid_step",
    "place_foot",
    "plan_jump_trajectory",
    "plane_availability",
    "plane_normal",
    "ransac_plane",
    "run_jump_sequence",
    "save_cloud",
    "simulate_magnet",
    "simulate_track",
    "surface_grid",
    "surface_point_count",
    "switching_function",
    "trace_to_csv",
    "tracking_error",
    "transform_point",
    "voxel_downsample",
    "wrap_angle",
    "write_trace_csv",
]
