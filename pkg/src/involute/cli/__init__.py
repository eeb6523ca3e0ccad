from .report import AnalysisReport, analyze, render
from .spec import GENERATORS, ParseError, ShapeError, SpecError, SystemSpec, UnknownGenerator, parse_spec

__all__ = ["AnalysisReport", "GENERATORS", "ParseError", "ShapeError", "SpecError", "SystemSpec",
           "UnknownGenerator", "analyze", "parse_spec", "render"]
