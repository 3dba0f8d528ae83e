"""Plan where limited mobile sensors should go to cover weighted targets
while staying connected to a data sink."""
from .geometry import EPS, Point
from .harness import InstanceParams, ScenarioSpec, gen_instance, run_sweep
from .io import load_instance, load_plan, save_instance, save_plan
from .model import DeploymentPlan, Instance, PlanMetrics, Target, ValidationError
from .planners import PLANNERS, evaluate_plan, gba, stba, wmcba

__all__ = [
    "EPS", "Point", "InstanceParams", "ScenarioSpec", "gen_instance", "run_sweep",
    "load_instance", "load_plan", "save_instance", "save_plan",
    "DeploymentPlan", "Instance", "PlanMetrics", "Target", "ValidationError",
    "PLANNERS", "evaluate_plan", "gba", "stba", "wmcba",
]
