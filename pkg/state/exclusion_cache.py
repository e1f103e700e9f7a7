"""
Exclusion-Integral Cache

The inner integral E_i(b) = int_0^b p_i(rho) rho drho is needed at thousands of
upper limits per coverage evaluation. Instead of re-integrating from zero each
time, an `ExclusionTable` tabulates the antiderivative once on a panel grid
(adaptive Gauss-Legendre per panel) and completes any query with one
Gauss-Legendre rule on the last partial panel, so lookups are exact to the
panel tolerance rather than interpolated.

Tables depend only on (channel parameters, state, altitude, tolerances) and
are shared through an LRU cache:

    table = get_exclusion_table(params, LinkState.LOS, h=200.0, settings=settings)
    table.value(500.0)
"""

import logging
from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from cachetools import LRUCache

from core.exceptions import QuadratureError
from services.channel import los_probability_horizontal
from state.params import ChannelParams, LinkState, QuadratureSettings

logger = logging.getLogger(__name__)

Integrand = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]

_GL_COARSE = np.polynomial.legendre.leggauss(8)
_GL_FINE = np.polynomial.legendre.leggauss(16)

# Uniform panels of width scale/4 out to 40*scale, then panels growing by 5%
_FINE_PANELS_PER_SCALE = 4
_FINE_EXTENT_SCALES = 40
_GROWTH = 1.05

_CACHE_SIZE = 256
_table_cache: LRUCache = LRUCache(maxsize=_CACHE_SIZE)


def _gauss_legendre(
    f: Integrand,
    a: npt.NDArray[np.float64],
    b: npt.NDArray[np.float64],
    rule: tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]],
) -> npt.NDArray[np.float64]:
    """Integrate f over every panel [a_k, b_k] at once."""
    nodes, weights = rule
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    values = f(x.ravel()).reshape(x.shape)
    return half * (values * weights).sum(axis=1)


class ExclusionTable:
    """Tabulated antiderivative of a nonnegative integrand on [0, inf)."""

    def __init__(
        self,
        integrand: Integrand,
        scale: float,
        abs_tol: float = 1e-8,
        rel_tol: float = 1e-8,
        max_depth: int = 30,
        name: str = "exclusion_integral",
    ):
        self._f = integrand
        self._scale = max(float(scale), 1.0)
        self._abs_tol = abs_tol
        self._rel_tol = rel_tol
        self._max_depth = max_depth
        self.name = name
        self._nodes = np.zeros(1)
        self._cum = np.zeros(1)

    @property
    def extent(self) -> float:
        """Largest tabulated upper limit."""
        return float(self._nodes[-1])

    def _next_edges(self, target: float) -> npt.NDArray[np.float64]:
        fine_end = _FINE_EXTENT_SCALES * self._scale
        step = self._scale / _FINE_PANELS_PER_SCALE
        edges: list[float] = []
        last = self.extent
        while last < target:
            nxt = last + step if last < fine_end else last * _GROWTH
            if last < fine_end < nxt:
                nxt = fine_end
            edges.append(nxt)
            last = nxt
        return np.asarray(edges)

    def _integrate_panels(
        self, a: npt.NDArray[np.float64], b: npt.NDArray[np.float64]
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """
        Adaptive panel integration: bisect panels whose 8- and 16-point results
        disagree beyond tolerance. Returns the final panel edges and integrals.
        """
        done_a: list[npt.NDArray[np.float64]] = []
        done_b: list[npt.NDArray[np.float64]] = []
        done_v: list[npt.NDArray[np.float64]] = []
        for depth in range(self._max_depth + 1):
            fine = _gauss_legendre(self._f, a, b, _GL_FINE)
            coarse = _gauss_legendre(self._f, a, b, _GL_COARSE)
            ok = np.abs(fine - coarse) <= np.maximum(self._abs_tol, self._rel_tol * np.abs(fine))
            done_a.append(a[ok])
            done_b.append(b[ok])
            done_v.append(fine[ok])
            if np.all(ok):
                break
            a, b = a[~ok], b[~ok]
            mid = 0.5 * (a + b)
            a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
            logger.debug("%s: bisecting %d panels at depth %d", self.name, a.size // 2, depth + 1)
        else:
            raise QuadratureError(
                f"{self.name} did not converge within {self._max_depth} bisections "
                f"near rho={float(a.min()):.6g} m",
                integral=self.name,
            )
        edges_a = np.concatenate(done_a)
        order = np.argsort(edges_a)
        return edges_a[order], np.concatenate(done_b)[order], np.concatenate(done_v)[order]

    def extend_to(self, b_upper: float) -> None:
        """Tabulate up to at least `b_upper`."""
        if b_upper <= self.extent:
            return
        edges = self._next_edges(b_upper)
        starts = np.concatenate([[self.extent], edges[:-1]])
        _, b, values = self._integrate_panels(starts, edges)
        self._nodes = np.concatenate([self._nodes, b])
        # Sequential running sum: lookups do not depend on the growth history
        running = np.cumsum(np.concatenate([self._cum[-1:], values]))[1:]
        self._cum = np.concatenate([self._cum, running])

    def value(self, b_upper: float) -> float:
        """E(b_upper) = int_0^b_upper f(rho) drho."""
        if b_upper <= 0.0:
            return 0.0
        self.extend_to(b_upper)
        k = int(np.searchsorted(self._nodes, b_upper, side="right")) - 1
        base = float(self._cum[k])
        lower = float(self._nodes[k])
        if b_upper == lower:
            return base
        partial = _gauss_legendre(self._f, np.array([lower]), np.array([b_upper]), _GL_FINE)
        return base + float(partial[0])


def _los_integrand(params: ChannelParams, state: LinkState, h: float) -> Integrand:
    if state is LinkState.LOS:
        return lambda rho: los_probability_horizontal(params, h, rho) * rho
    return lambda rho: (1.0 - los_probability_horizontal(params, h, rho)) * rho


def build_exclusion_table(
    integrand: Integrand,
    h: float,
    settings: QuadratureSettings,
    name: str,
) -> ExclusionTable:
    """Uncached table, for integrands that are not a plain channel model."""
    return ExclusionTable(
        integrand,
        scale=h,
        abs_tol=settings.abs_tol,
        rel_tol=settings.rel_tol,
        max_depth=settings.max_depth,
        name=name,
    )


def get_exclusion_table(
    params: ChannelParams,
    state: LinkState,
    h: float,
    settings: QuadratureSettings,
) -> ExclusionTable:
    """Shared table for the channel-model integrand p_i(rho) * rho at altitude h."""
    key = (params, state, float(h), settings.abs_tol, settings.rel_tol, settings.max_depth)
    table = _table_cache.get(key)
    if table is None:
        table = build_exclusion_table(
            _los_integrand(params, state, float(h)),
            h,
            settings,
            name=f"exclusion_integral[{state.value}]",
        )
        _table_cache[key] = table
    return table


def clear_exclusion_cache() -> None:
    """Drop every memoized table."""
    _table_cache.clear()


def cached_table_count() -> int:
    return len(_table_cache)
