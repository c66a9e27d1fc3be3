from .instance import Instance, Schedule

__all__ = ["Instance", "Schedule"]
