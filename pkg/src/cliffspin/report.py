"""Verification reports: identity name, parameters and any nonzero residuals."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    identity: str
    params: dict
    fields_checked: int = 0
    residuals: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.residuals

    def add_residual(self, label, value):
        self.residuals.append({"field": label, "residual": value.to_latex() if hasattr(value, "to_latex") else str(value)})

    def to_json(self):
        out = {
            "identity": self.identity,
            "params": self.params,
            "fields_checked": self.fields_checked,
            "residuals": self.residuals,
        }
        if self.notes:
            out["notes"] = self.notes
        return out

    def summary(self) -> str:
        status = "ok" if self.ok else f"FAIL ({len(self.residuals)} nonzero)"
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.identity} [{params}]: {self.fields_checked} fields, {status}"


def check_operator(identity, params, residual_op, sweep, max_residuals=5):
    """Apply ``residual_op`` to every ``(label, field)`` in ``sweep``; zero images pass."""
    rep = Report(identity, dict(params))
    for label, f in sweep:
        rep.fields_checked += 1
        r = residual_op(f)
        if not r.is_zero():
            if len(rep.residuals) < max_residuals:
                rep.add_residual(_label(label), r)
            else:
                rep.notes["truncated"] = rep.notes.get("truncated", 0) + 1
    return rep


def _label(label):
    if isinstance(label, tuple) and len(label) == 2:
        alpha, idx = label
        return f"x^{list(alpha)} * b{idx}"
    return str(label)
