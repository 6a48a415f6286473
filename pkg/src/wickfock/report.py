"""Certificate reports: one named check, its constants and its worst residual."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a check; ``passed`` iff ``worst_residual <= tolerance``.

    For inequality checks the residual is the signed violation (negative means
    slack). A composite report carries its sub-checks in ``parts``; its residual
    is the largest ``residual / tolerance`` ratio of the parts and its tolerance
    is 1.
    """

    name: str
    constants: dict[str, float]
    worst_residual: float
    tolerance: float
    passed: bool
    n_probes: int = 0
    notes: str = ""
    parts: tuple["CertificateReport", ...] = field(default=())

    @classmethod
    def make(cls, name, constants, worst_residual, tolerance, n_probes=0, notes=""):
        worst = float(worst_residual)
        return cls(name, {k: float(v) for k, v in constants.items()}, worst, float(tolerance),
                   bool(worst <= tolerance), n_probes, notes)

    @classmethod
    def combine(cls, name, parts, constants=None, notes=""):
        parts = tuple(parts)
        ratio = max((p.worst_residual / p.tolerance if p.tolerance > 0 else
                     (0.0 if p.passed else float("inf"))) for p in parts)
        return cls(name, {k: float(v) for k, v in (constants or {}).items()}, float(ratio), 1.0,
                   all(p.passed for p in parts), sum(p.n_probes for p in parts), notes, parts)

    def leaves(self, prefix: str = ""):
        """Flattened ``(qualified_name, report)`` pairs for tabular output."""
        qual = f"{prefix}{self.name}"
        if not self.parts:
            yield qual, self
            return
        for p in self.parts:
            yield from p.leaves(qual + "/")

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst residual {self.worst_residual:.3e} (tol {self.tolerance:.1e})"
