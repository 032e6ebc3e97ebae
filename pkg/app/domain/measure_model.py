"""
Medidas con signo sobre exponentes s ∈ [0,1].

μ = μ⁺ − μ⁻, cada componente es una suma finita de átomos más densidades
lineales a trozos. Los objetos son inmutables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple


@dataclass(frozen=True)
class DensityPiece:
    """Densidad φ(s) ≥ 0, lineal entre puntos de quiebre consecutivos."""

    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.breakpoints) < 2 or len(self.breakpoints) != len(self.values):
            raise ValueError("DENSIDAD_INVALIDA: se requieren ≥ 2 puntos de quiebre con un valor cada uno")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("DENSIDAD_INVALIDA: puntos de quiebre no estrictamente crecientes")
        if self.breakpoints[0] < 0.0 or self.breakpoints[-1] > 1.0:
            raise ValueError("DENSIDAD_INVALIDA: soporte fuera de [0,1]")
        if any(v < 0.0 for v in self.values):
            raise ValueError("DENSIDAD_INVALIDA: valores negativos")

    @property
    def lo(self) -> float:
        return self.breakpoints[0]

    @property
    def hi(self) -> float:
        return self.breakpoints[-1]

    def segments(self) -> Iterator[Tuple[float, float, float, float]]:
        """(a, b, φ(a), φ(b)) por cada tramo lineal."""
        pts = self.breakpoints
        vals = self.values
        for i in range(len(pts) - 1):
            yield pts[i], pts[i + 1], vals[i], vals[i + 1]

    def total_mass(self) -> float:
        return sum(0.5 * (va + vb) * (b - a) for a, b, va, vb in self.segments())

    def scaled(self, factor: float) -> "DensityPiece":
        return DensityPiece(self.breakpoints, tuple(factor * v for v in self.values))


@dataclass(frozen=True)
class MeasureComponent:
    """Medida no negativa: átomos ordenados por s más densidades."""

    atoms: Tuple[Tuple[float, float], ...] = ()
    densities: Tuple[DensityPiece, ...] = ()

    def __post_init__(self) -> None:
        exps = [s for s, _ in self.atoms]
        if any(not 0.0 <= s <= 1.0 for s in exps):
            raise ValueError("ATOMO_INVALIDO: exponente fuera de [0,1]")
        if any(w < 0.0 for _, w in self.atoms):
            raise ValueError("ATOMO_INVALIDO: peso negativo")
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError("ATOMO_INVALIDO: exponentes sin ordenar o repetidos")

    @classmethod
    def build(
        cls,
        atoms: Iterable[Tuple[float, float]] = (),
        densities: Iterable[DensityPiece] = (),
    ) -> "MeasureComponent":
        """Ordena los átomos, suma pesos de exponentes repetidos y descarta pesos nulos."""
        merged: dict[float, float] = {}
        for s, w in atoms:
            s, w = float(s), float(w)
            if not 0.0 <= s <= 1.0:
                raise ValueError(f"ATOMO_INVALIDO: exponente {s} fuera de [0,1]")
            if w < 0.0:
                raise ValueError(f"ATOMO_INVALIDO: peso {w} negativo")
            merged[s] = merged.get(s, 0.0) + w
        ordered = tuple((s, w) for s, w in sorted(merged.items()) if w > 0.0)
        return cls(atoms=ordered, densities=tuple(densities))

    @property
    def is_zero(self) -> bool:
        return self.total_mass() == 0.0

    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + sum(p.total_mass() for p in self.densities)

    def support_bounds(self) -> Tuple[float, float] | None:
        """Extremos del soporte (mín, máx), o None si la medida es nula."""
        points = [s for s, _ in self.atoms]
        for piece in self.densities:
            for a, b, va, vb in piece.segments():
                if va > 0.0 or vb > 0.0:
                    points.extend([a, b])
        if not points:
            return None
        return min(points), max(points)

    def scaled(self, factor: float) -> "MeasureComponent":
        if factor < 0.0:
            raise ValueError("ESCALA_INVALIDA: factor negativo")
        return MeasureComponent.build(
            ((s, factor * w) for s, w in self.atoms),
            tuple(p.scaled(factor) for p in self.densities),
        )


@dataclass(frozen=True)
class SignedMeasure:
    plus: MeasureComponent
    minus: MeasureComponent
    s_bar: float
    dimension: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.s_bar <= 1.0:
            raise ValueError(f"S_BAR_INVALIDO: {self.s_bar} fuera de (0,1]")
        if self.dimension < 1:
            raise ValueError("DIMENSION_INVALIDA: N debe ser ≥ 1")

    @classmethod
    def from_atoms(
        cls,
        atoms: Iterable[Tuple[float, float]],
        s_bar: float,
        dimension: int = 1,
    ) -> "SignedMeasure":
        """Construye μ a partir de átomos con peso con signo."""
        plus: list[Tuple[float, float]] = []
        minus: list[Tuple[float, float]] = []
        for s, w in atoms:
            if w >= 0.0:
                plus.append((s, w))
            else:
                minus.append((s, -w))
        return cls(
            plus=MeasureComponent.build(plus),
            minus=MeasureComponent.build(minus),
            s_bar=s_bar,
            dimension=dimension,
        )

    def positive_part(self) -> "SignedMeasure":
        return SignedMeasure(self.plus, MeasureComponent(), self.s_bar, self.dimension)

    def with_negative_scaled(self, eps: float) -> "SignedMeasure":
        """μ⁺ − ε·μ⁻."""
        return SignedMeasure(self.plus, self.minus.scaled(eps), self.s_bar, self.dimension)
