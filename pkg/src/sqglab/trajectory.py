from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .spectral import SpectralField


@dataclass
class Trajectory:
    """Time samples of a field on one grid; ``times`` strictly increasing."""

    times: list[float]
    states: list[SpectralField]
    blew_up: bool = False
    message: str = ""
    monitors: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        for a, b in zip(self.times, self.times[1:]):
            if not b > a:
                raise ValueError("times must be strictly increasing")
        if self.states:
            g = self.states[0].grid
            if any(st.grid != g for st in self.states):
                raise ValueError("all states must share one grid")

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[tuple[float, SpectralField]]:
        return iter(zip(self.times, self.states))

    @property
    def grid(self):
        if not self.states:
            raise ValueError("empty trajectory has no grid")
        return self.states[0].grid

    def until(self, t_max: float) -> "Trajectory":
        keep = [i for i, t in enumerate(self.times) if t <= t_max]
        return Trajectory([self.times[i] for i in keep], [self.states[i] for i in keep])

    def at(self, t: float, *, atol: float = 1e-12) -> SpectralField:
        for ti, st in self:
            if abs(ti - t) <= atol * max(1.0, abs(t)):
                return st
        raise KeyError(f"no snapshot at t={t}")
