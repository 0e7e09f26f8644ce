"""Foot-rectangle placeability on a planar patch.

Given the estimated boundary of a patch, try to place the robot's
rectangular foot flat near the patch centroid.  Candidate rectangles hang
off the boundary points nearest the centroid and extend inward; a candidate
is accepted when all of its corners and edge midpoints pass an interior test
against the local boundary distance.  The first accepted candidate yields
the landing pose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boundary import BoundaryEstimate
from .errors import DegenerateAnchorError, DomainError


@dataclass(frozen=True)
class FootGeometry:
    """Foot rectangle dimensions and placeability test parameters.

    ``width`` spans the foot side-to-side and ``length`` front-to-back, in
    meters.  ``candidate_count`` boundary anchors are tried.  Each probe
    point is judged against the mean centroid-distance of its
    ``neighbor_count`` nearest boundary points, with relative slack
    ``tolerance``.
    """

    width: float = 0.10
    length: float = 0.15
    tolerance: float = 0.02
    candidate_count: int = 5
    neighbor_count: int = 3

    def __post_init__(self):
        if self.width <= 0 or self.length <= 0:
            raise DomainError("foot width and length must be positive")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")
        if self.candidate_count < 1:
            raise DomainError("candidate_count must be at least 1")
        if self.neighbor_count < 1:
            raise DomainError("neighbor_count must be at least 1")


@dataclass(frozen=True, eq=False)
class CandidateRectangle:
    """One candidate foot placement: anchor, frame, corners, edge midpoints.

    Frame columns are (outward axis from the patch center toward the anchor,
    lateral axis, patch normal), right-handed and orthonormal.  The four
    corners run cyclically around the rectangle; midpoints pair consecutive
    corners.  Corners and midpoints together are the 8 probe points of the
    interior test.
    """

    anchor: np.ndarray
    frame: np.ndarray
    corners: np.ndarray
    midpoints: np.ndarray

    def __post_init__(self):
        for name, arr, shape in (
            ("anchor", self.anchor, (3,)),
            ("frame", self.frame, (3, 3)),
            ("corners", self.corners, (4, 3)),
            ("midpoints", self.midpoints, (4, 3)),
        ):
            a = np.array(np.asarray(arr, dtype=np.float64).reshape(shape), copy=True)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        rot = self.frame
        if np.abs(rot.T @ rot - np.eye(3)).max() > 1e-9:
            raise DomainError("candidate frame must be orthonormal")
        if abs(np.linalg.det(rot) - 1.0) > 1e-9:
            raise DomainError("candidate frame must be right-handed")

    @property
    def probes(self) -> np.ndarray:
        """All 8 interior-test points: corners then midpoints."""
        return np.vstack([self.corners, self.midpoints])


@dataclass(frozen=True, eq=False)
class FootPose:
    """A placed foot: position and a right-handed orientation frame.

    ``orientation`` columns match the accepted candidate's frame.
    """

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        pos = np.array(np.asarray(self.position, dtype=np.float64).reshape(3), copy=True)
        rot = np.array(np.asarray(self.orientation, dtype=np.float64).reshape(3, 3), copy=True)
        if np.abs(rot.T @ rot - np.eye(3)).max() > 1e-9:
            raise DomainError("orientation must be orthonormal")
        if abs(np.linalg.det(rot) - 1.0) > 1e-9:
            raise DomainError("orientation must be right-handed")
        pos.flags.writeable = False
        rot.flags.writeable = False
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", rot)


@dataclass(frozen=True, eq=False)
class PlacementReport:
    """Outcome of the placeability check.

    ``pose`` is present exactly when ``placeable``.  ``candidates_tried``
    counts anchors examined; ``accepted_anchor`` is the winning anchor.
    """

    placeable: bool
    pose: Optional[FootPose]
    candidates_tried: int
    accepted_anchor: Optional[np.ndarray]

    def __post_init__(self):
        if self.placeable != (self.pose is not None):
            raise DomainError("pose must be present exactly when placeable")
        if not self.placeable and self.accepted_anchor is not None:
            raise DomainError("a rejected report cannot name an accepted anchor")


def closest_points(points: np.ndarray, query, count: int) -> np.ndarray:
    """The ``count`` points nearest ``query``, ascending by distance.

    Exact distance ties fall back to lexicographic point order so the
    selection never depends on input ordering.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise DomainError("points must form an (M, 3) array")
    if count < 1:
        raise DomainError("count must be at least 1")
    if len(pts) < count:
        raise DomainError(f"point set has {len(pts)} points, need {count}")
    q = np.asarray(query, dtype=np.float64).reshape(3)
    d = np.linalg.norm(pts - q, axis=1)
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0], d))
    return pts[order[:count]]


def build_candidate(anchor, center, normal, geometry: FootGeometry) -> CandidateRectangle:
    """Construct the candidate rectangle hanging off one boundary anchor.

    The outward axis runs from ``center`` toward ``anchor`` (projected into
    the plane so the frame stays orthonormal on noisy patches); the anchor
    sits at the midpoint of the rectangle's outer edge and the body extends
    inward by the foot length.  Raises :class:`DegenerateAnchorError` when
    the anchor is too close to the center to define a direction.
    """
    a = np.asarray(anchor, dtype=np.float64).reshape(3)
    c = np.asarray(center, dtype=np.float64).reshape(3)
    e_z = np.asarray(normal, dtype=np.float64).reshape(3)
    e_z = e_z / np.linalg.norm(e_z)
    delta = a - c
    if np.linalg.norm(delta) < 1e-9:
        raise DegenerateAnchorError("candidate anchor coincides with the patch center")
    in_plane = delta - (delta @ e_z) * e_z
    norm = np.linalg.norm(in_plane)
    if norm < 1e-9:
        raise DegenerateAnchorError("candidate anchor sits on the normal through the patch center")
    e_x = in_plane / norm
    e_y = np.cross(e_z, e_x)
    frame = np.column_stack([e_x, e_y, e_z])

    half_w = 0.5 * geometry.width
    r1 = a + half_w * e_y
    r2 = a - half_w * e_y
    r3 = r2 - geometry.length * e_x
    r4 = r1 - geometry.length * e_x
    corners = np.array([r1, r2, r3, r4])
    midpoints = 0.5 * (corners + np.roll(corners, -1, axis=0))
    return CandidateRectangle(anchor=a, frame=frame, corners=corners, midpoints=midpoints)


def probe_passes(probe, center, boundary_points: np.ndarray, geometry: FootGeometry) -> bool:
    """Interior test for one probe point.

    ``d_r`` is the probe's distance to the patch center; ``d_q`` is the mean
    center-distance of the ``neighbor_count`` boundary points nearest the
    probe.  The probe passes when it sits closer than that local boundary
    distance, or overshoots it by a relative margin under ``tolerance``.
    """
    p = np.asarray(probe, dtype=np.float64).reshape(3)
    c = np.asarray(center, dtype=np.float64).reshape(3)
    d_r = float(np.linalg.norm(p - c))
    neighbors = closest_points(boundary_points, p, geometry.neighbor_count)
    d_q = float(np.linalg.norm(neighbors - c, axis=1).mean())
    if d_r < d_q:
        return True
    return d_r > 0 and (d_r - d_q) / d_r < geometry.tolerance


def check_placeability(boundary_points, center, normal, geometry: FootGeometry = FootGeometry()) -> PlacementReport:
    """Decide whether the foot rectangle fits inside the boundary.

    The ``candidate_count`` boundary points nearest the patch center are
    tried in ascending-distance order; the first candidate whose 8 probe
    points all pass the interior test wins.  Its pose takes the candidate
    frame as orientation, positioned at the probe centroid pulled a quarter
    length further inward along the outward axis.  Anchors that leave the
    outward direction undefined are skipped.  Raises a domain error when the
    boundary is too small for the configured counts; returns a rejected
    report when no candidate fits, which is a decision rather than an error.
    """
    pts = np.asarray(boundary_points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise DomainError("boundary_points must form an (M, 3) array")
    needed = max(geometry.candidate_count, geometry.neighbor_count)
    if len(pts) < needed:
        raise DomainError(f"boundary has {len(pts)} points, need at least {needed}")

    anchors = closest_points(pts, center, geometry.candidate_count)
    tried = 0
    for anchor in anchors:
        tried += 1
        try:
            candidate = build_candidate(anchor, center, normal, geometry)
        except DegenerateAnchorError:
            continue
        probes = candidate.probes
        if all(probe_passes(p, center, pts, geometry) for p in probes):
            e_x = candidate.frame[:, 0]
            position = probes.mean(axis=0) - 0.25 * geometry.length * e_x
            pose = FootPose(position=position, orientation=candidate.frame)
            return PlacementReport(placeable=True, pose=pose, candidates_tried=tried, accepted_anchor=anchor)
    return PlacementReport(placeable=False, pose=None, candidates_tried=tried, accepted_anchor=None)


def place_foot(estimate: BoundaryEstimate, geometry: FootGeometry = FootGeometry()) -> PlacementReport:
    """Placeability check wired to a boundary estimate's own patch."""
    patch = estimate.source_patch
    if patch.inliers.is_empty:
        raise DomainError("cannot place a foot on an empty patch")
    return check_placeability(estimate.points, patch.centroid, patch.normal, geometry)
