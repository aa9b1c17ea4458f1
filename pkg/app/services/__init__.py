from app.services.baseline_service import StaticPSOService, plan_static_pso
from app.services.planner_service import PlannerService, plan

__all__ = [
    "PlannerService",
    "StaticPSOService",
    "plan",
    "plan_static_pso",
]
