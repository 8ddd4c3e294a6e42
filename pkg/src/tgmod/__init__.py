"""Finite ternary Γ-semirings, their modules, and a homotopical workbench on top."""

from .config import DEFAULT, WorkbenchConfig
from .core import (AxiomReport, BudgetError, Check, CommutativeMonoid, ModuleMorphism,
                   PreconditionError, StructureError, TernaryGammaModule, TernaryGammaSemiring,
                   check_module, check_morphism, check_semiring, replay)

__all__ = ["DEFAULT", "WorkbenchConfig", "AxiomReport", "BudgetError", "Check",
           "CommutativeMonoid", "ModuleMorphism", "PreconditionError", "StructureError",
           "TernaryGammaModule", "TernaryGammaSemiring", "check_module", "check_morphism",
           "check_semiring", "replay"]
__version__ = "0.1.0"
