"""Observation and control channel configurations.

A configuration is a FIFO tuple of ``(event, age)`` pairs, front first.  The
age of an entry is the accumulated minimum occurring time of everything that
happened in the plant while the entry waited in the channel.  Operators return
``None`` where the corresponding update is undefined.
"""
from __future__ import annotations

from typing import NamedTuple, Optional, Sequence

Config = tuple  # tuple[tuple[int, int], ...]

EMPTY: Config = ()


class DelayBounds(NamedTuple):
    no: int  # observation channel bound, time units
    nc: int  # control channel bound, time units

    def check(self) -> "DelayBounds":
        if self.no < 0 or self.nc < 0:
            raise ValueError(f"delay bounds must be non-negative, got {tuple(self)}")
        return self


def front_age(theta: Config) -> int:
    """MAX^obs / MAX^ctr: age of the front entry, 0 for the empty channel."""
    return theta[0][1] if theta else 0


def _aged(theta: Config, dt: int) -> Config:
    return tuple((e, n + dt) for e, n in theta)


def in_obs(theta: Config, q: int, sigma: int, model, bound: int) -> Optional[Config]:
    """Occurrence of ``sigma`` at ``q``: age every entry, then append (sigma, 0)."""
    if not theta:
        return ((sigma, 0),)
    aged = _aged(theta, model.t_min[q, sigma])
    if aged[0][1] > bound:
        return None
    return aged + ((sigma, 0),)


def out_obs(theta: Config, sigma: int) -> Optional[Config]:
    """Delivery of the front occurrence to the agent."""
    if theta and theta[0][0] == sigma:
        return theta[1:]
    return None


def plus(theta: Config, q: int, sigma: int, model, bound: int) -> Optional[Config]:
    """Age the pending commands by the occurring time of ``sigma`` at ``q``."""
    if not theta:
        return theta
    aged = _aged(theta, model.t_min[q, sigma])
    if aged[0][1] > bound:
        return None
    return aged


def in_ctr(theta: Config, sigma: int) -> Config:
    return theta + ((sigma, 0),)


def out_ctr(theta: Config, sigma: int) -> Optional[Config]:
    if theta and theta[0][0] == sigma:
        return theta[1:]
    return None


def render(theta: Config, names: Sequence[str] | None = None) -> str:
    """Compact rendering, e.g. ``(b,1)(f,0)``; the empty channel is ``ε``."""
    if not theta:
        return "ε"
    name = (lambda e: names[e]) if names is not None else str
    return "".join(f"({name(e)},{n})" for e, n in theta)
