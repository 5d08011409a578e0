"""Ring presentations and their text / JSON / LaTeX renderings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .exactalg import LaurentPoly


@dataclass
class Presentation:
    """Generators and relations of a quotient ring.

    ``relations`` is a list of ``(family, poly)`` where ``family`` is the
    relation numbering ``"i"`` or ``"ii"``. ``coefficients`` names the
    coefficient ring (``"Z"``, ``"H*(B)"``, ...). Base-ring basis elements
    appear as extra variables listed in ``base_variables``.
    """

    title: str
    generators: tuple[str, ...]
    relations: list[tuple[str, LaurentPoly]]
    coefficients: str = "Z"
    laurent: bool = False
    base_variables: tuple[str, ...] = ()
    notes: list[str] = field(default_factory=list)
    extras: dict[str, Any] = field(default_factory=dict)

    def family(self, label: str) -> list[LaurentPoly]:
        return [p for f, p in self.relations if f == label]

    def relation_strings(self) -> list[str]:
        return [str(p) for _, p in self.relations]

    def to_text(self) -> str:
        ring = f"{self.coefficients}[{', '.join(self.generators)}]"
        if self.laurent:
            ring = f"{self.coefficients}[{', '.join(g + '^±1' for g in self.generators)}]"
        lines = [self.title, f"  ring: {ring} / I"]
        for label in ("i", "ii"):
            fam = self.family(label)
            if fam:
                lines.append(f"  ({label})")
                lines.extend(f"    {p}" for p in fam)
        for k, v in self.extras.items():
            lines.append(f"  {k}: {v}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "generators": list(self.generators),
            "coefficients": self.coefficients,
            "laurent": self.laurent,
            "base_variables": list(self.base_variables),
            "relations": [{"family": f, "poly": p.to_json(), "text": str(p)} for f, p in self.relations],
            "notes": list(self.notes),
            "extras": self.extras,
        }

    @classmethod
    def from_json(cls, data: dict) -> Presentation:
        return cls(
            title=data["title"],
            generators=tuple(data["generators"]),
            relations=[(r["family"], LaurentPoly.from_json(r["poly"])) for r in data["relations"]],
            coefficients=data.get("coefficients", "Z"),
            laurent=bool(data.get("laurent", False)),
            base_variables=tuple(data.get("base_variables", ())),
            notes=list(data.get("notes", ())),
            extras=dict(data.get("extras", {})),
        )

    def to_latex(self) -> str:
        gens = ", ".join(_latex_name(g) + (r"^{\pm 1}" if self.laurent else "") for g in self.generators)
        coeff = {"Z": r"\mathbb{Z}"}.get(self.coefficients, self.coefficients)
        out = [f"% {self.title}", r"\[", rf"  {coeff}[{gens}] \big/ I", r"\]", r"\begin{itemize}"]
        for label in ("i", "ii"):
            fam = self.family(label)
            if fam:
                body = ";\\quad ".join(p.to_latex() for p in fam)
                out.append(rf"  \item[({label})] ${body}$")
        out.append(r"\end{itemize}")
        out.extend(f"% note: {n}" for n in self.notes)
        return "\n".join(out)

    def render(self, fmt: str) -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "latex":
            return self.to_latex()
        if fmt == "json":
            import json

            return json.dumps(self.to_json(), indent=2)
        raise ValueError(f"unknown format {fmt!r}")


def _latex_name(name: str) -> str:
    if len(name) > 1 and name[0].isalpha():
        return f"{name[0]}_{{{name[1:].lstrip('_')}}}"
    return name
