"""Feasibility analysis of 5G NR procedures over a LEO satellite backhaul."""

from .scenario import PhysicalConstants, ScenarioConfig, ScenarioError, load_scenario, render_scenario

__version__ = "0.1.0"

__all__ = ["PhysicalConstants", "ScenarioConfig", "ScenarioError", "load_scenario", "render_scenario"]
