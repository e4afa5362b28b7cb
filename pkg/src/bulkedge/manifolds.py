"""Parameter manifolds with oriented chart atlases for scanning and refinement.

Tori carry the identity chart with the standard orientation of their angle
coordinates.  Spheres use the orthographic charts that drop one ambient
coordinate; the chart dropping the last coordinate on the upper hemisphere is
declared positively oriented, which fixes the orientation factor of every
other chart to (-1)**(d + j - 1) * sign(dropped coordinate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
CHART_RADIUS = 0.95


@dataclass(frozen=True)
class Chart:
    """One oriented chart: an identifier plus bookkeeping for spheres."""

    key: str
    drop: int = -1
    hemisphere: int = +1


class Torus:
    """Flat torus (R/2pi Z)^d with the single wrap-around chart."""

    kind = "torus"

    def __init__(self, dim: int):
        self.dim = dim
        self.ambient_dim = dim
        self.charts = (Chart(key="torus"),)

    def chart_grid(self, chart: Chart, resolution: int) -> np.ndarray:
        axes = [TWO_PI * np.arange(resolution) / resolution] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def grid_shape(self, resolution: int) -> tuple[int, ...]:
        return (resolution,) * self.dim

    def periodic(self) -> bool:
        return True

    def embed(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        return np.mod(u, TWO_PI)

    def embed_jacobian(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        return np.eye(self.dim)

    def orientation(self, chart: Chart, u: np.ndarray) -> int:
        return +1

    def chart_valid(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        return np.ones(u.shape[:-1], dtype=bool)

    def best_chart(self, point: np.ndarray) -> tuple[Chart, np.ndarray]:
        return self.charts[0], np.mod(point, TWO_PI)

    def canonical(self, point: np.ndarray) -> np.ndarray:
        p = np.mod(point, TWO_PI)
        # collapse values indistinguishable from the period onto zero
        p[np.abs(p - TWO_PI) < 1e-9] = 0.0
        return p

    def distance(self, p: np.ndarray, q: np.ndarray) -> float:
        d = np.abs(np.mod(p - q + np.pi, TWO_PI) - np.pi)
        return float(np.linalg.norm(d))


class Sphere:
    """Unit sphere S^d embedded in R^(d+1), covered by 2(d+1) orthographic charts."""

    kind = "sphere"

    def __init__(self, dim: int):
        self.dim = dim
        self.ambient_dim = dim + 1
        charts = []
        for j in range(dim + 1):
            for s in (+1, -1):
                charts.append(Chart(key=f"drop{j}{'+' if s > 0 else '-'}", drop=j, hemisphere=s))
        self.charts = tuple(charts)

    def chart_grid(self, chart: Chart, resolution: int) -> np.ndarray:
        axes = [np.linspace(-CHART_RADIUS, CHART_RADIUS, resolution)] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def grid_shape(self, resolution: int) -> tuple[int, ...]:
        return (resolution,) * self.dim

    def periodic(self) -> bool:
        return False

    def chart_valid(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        return np.sum(u * u, axis=-1) <= CHART_RADIUS**2

    def embed(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        r2 = np.sum(u * u, axis=-1)
        last = chart.hemisphere * np.sqrt(np.maximum(0.0, 1.0 - r2))
        out = np.empty(u.shape[:-1] + (self.ambient_dim,), dtype=float)
        out[..., : chart.drop] = u[..., : chart.drop]
        out[..., chart.drop] = last
        out[..., chart.drop + 1:] = u[..., chart.drop:]
        return out

    def embed_jacobian(self, chart: Chart, u: np.ndarray) -> np.ndarray:
        """d(ambient)/d(chart coords) at a single chart point, (d+1) x d."""
        u = np.asarray(u, dtype=float)
        r2 = float(np.sum(u * u))
        last = chart.hemisphere * np.sqrt(max(1e-300, 1.0 - r2))
        jac = np.zeros((self.ambient_dim, self.dim))
        rows = [i for i in range(self.ambient_dim) if i != chart.drop]
        for col, row in enumerate(rows):
            jac[row, col] = 1.0
        jac[chart.drop, :] = -u / last
        return jac

    def orientation(self, chart: Chart, u: np.ndarray) -> int:
        sign = 1 if (self.dim + chart.drop) % 2 == 0 else -1
        return sign * chart.hemisphere

    def best_chart(self, point: np.ndarray) -> tuple[Chart, np.ndarray]:
        point = np.asarray(point, dtype=float)
        point = point / np.linalg.norm(point)
        j = int(np.argmax(np.abs(point)))
        s = +1 if point[j] >= 0 else -1
        chart = next(c for c in self.charts if c.drop == j and c.hemisphere == s)
        u = np.delete(point, j)
        return chart, u

    def canonical(self, point: np.ndarray) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        return point / np.linalg.norm(point) + 0.0

    def distance(self, p: np.ndarray, q: np.ndarray) -> float:
        return float(np.linalg.norm(p - q))
