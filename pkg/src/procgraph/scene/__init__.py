"""Scene assembly: rooms, arrangement, collision, planning and cameras."""

from .arrange import Wall, align
from .cameras import CameraSpec, circular_rig, path_to_cameras, random_cameras
from .collision import ColliderCache, CollisionWorld, SceneObject, brute_force_collisions, check_collision
from .generate import Scene, sample_room
from .planning import BoxWorld, PlanResult, rrt_star
from .room import Window, make_room

__all__ = [
    "BoxWorld", "CameraSpec", "ColliderCache", "CollisionWorld", "PlanResult", "Scene", "SceneObject", "Wall",
    "Window", "align", "brute_force_collisions", "check_collision", "circular_rig", "make_room",
    "path_to_cameras", "random_cameras", "rrt_star", "sample_room",
]
