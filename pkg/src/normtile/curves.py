"""Parametric edge curves.

Every curve is parametrized on ``t in [0, 1]`` and knows its endpoint
half-tangents: unit vectors at each end pointing *into* the curve.  Plane
and torus curves live in 2D chart coordinates (torus curves are stored
unwrapped, i.e. they may leave the fundamental rectangle); sphere curves
are great-circle arcs in 3D.
"""
from __future__ import annotations

import math

import numpy as np


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return v / n


class Curve:
    kind = "curve"

    def point(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def sample(self, n: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, max(int(n), 2))
        return np.array([self.point(ti) for ti in t])

    @property
    def start(self) -> np.ndarray:
        return self.point(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.point(1.0)

    def tangent_start(self) -> np.ndarray:
        return _unit(self.derivative(0.0))

    def tangent_end(self) -> np.ndarray:
        return _unit(-self.derivative(1.0))

    @property
    def length(self) -> float:
        pts = self.sample(257)
        return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))

    def reversed(self) -> "Curve":
        raise NotImplementedError

    def translated(self, offset) -> "Curve":
        raise NotImplementedError

    def to_record(self) -> dict:
        raise NotImplementedError


class Segment(Curve):
    kind = "segment"

    def __init__(self, p0, p1):
        self.p0 = np.asarray(p0, dtype=float)
        self.p1 = np.asarray(p1, dtype=float)

    def point(self, t):
        if t == 0.0:
            return self.p0.copy()
        if t == 1.0:
            return self.p1.copy()
        return self.p0 + t * (self.p1 - self.p0)

    def derivative(self, t):
        return self.p1 - self.p0

    def sample(self, n: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, max(int(n), 2))[:, None]
        pts = self.p0 + t * (self.p1 - self.p0)
        pts[0], pts[-1] = self.p0, self.p1
        return pts

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))

    def reversed(self):
        return Segment(self.p1, self.p0)

    def translated(self, offset):
        off = np.asarray(offset, dtype=float)
        return Segment(self.p0 + off, self.p1 + off)

    def to_record(self):
        return {"type": "segment", "p0": self.p0.tolist(), "p1": self.p1.tolist()}


class CircularArc(Curve):
    """Arc of the circle ``center + radius * (cos a, sin a)`` for
    ``a = start_angle + t * sweep``; negative sweep runs clockwise."""

    kind = "circular_arc"

    def __init__(self, center, radius: float, start_angle: float, sweep: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.start_angle = float(start_angle)
        self.sweep = float(sweep)

    def point(self, t):
        a = self.start_angle + t * self.sweep
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    def derivative(self, t):
        a = self.start_angle + t * self.sweep
        return self.radius * self.sweep * np.array([-math.sin(a), math.cos(a)])

    def sample(self, n: int) -> np.ndarray:
        a = self.start_angle + np.linspace(0.0, 1.0, max(int(n), 2)) * self.sweep
        return self.center + self.radius * np.column_stack([np.cos(a), np.sin(a)])

    @property
    def length(self) -> float:
        return abs(self.radius * self.sweep)

    def reversed(self):
        return CircularArc(self.center, self.radius,
                           self.start_angle + self.sweep, -self.sweep)

    def translated(self, offset):
        return CircularArc(self.center + np.asarray(offset, dtype=float),
                           self.radius, self.start_angle, self.sweep)

    def to_record(self):
        return {"type": "circular_arc", "center": self.center.tolist(),
                "radius": self.radius, "start_angle": self.start_angle,
                "sweep": self.sweep}


class GreatCircleArc(Curve):
    """Shorter great-circle arc between two points of a sphere centred at 0."""

    kind = "great_circle"

    def __init__(self, a, b):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.radius = float(np.linalg.norm(self.a))
        ua, ub = self.a / self.radius, self.b / np.linalg.norm(self.b)
        self._omega = math.acos(max(-1.0, min(1.0, float(ua @ ub))))
        if self._omega == 0.0 or abs(self._omega - math.pi) < 1e-12:
            raise ValueError("great-circle arc needs distinct, non-antipodal ends")
        self._ua, self._ub = ua, ub

    def point(self, t):
        if t == 0.0:
            return self.a.copy()
        if t == 1.0:
            return self.b.copy()
        w, s = self._omega, math.sin(self._omega)
        u = (math.sin((1 - t) * w) * self._ua + math.sin(t * w) * self._ub) / s
        return self.radius * u

    def derivative(self, t):
        w, s = self._omega, math.sin(self._omega)
        du = w * (-math.cos((1 - t) * w) * self._ua + math.cos(t * w) * self._ub) / s
        return self.radius * du

    def sample(self, n: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, max(int(n), 2))
        w, s = self._omega, math.sin(self._omega)
        u = (np.sin((1 - t) * w)[:, None] * self._ua + np.sin(t * w)[:, None] * self._ub) / s
        pts = self.radius * u
        pts[0], pts[-1] = self.a, self.b
        return pts

    @property
    def length(self) -> float:
        return self.radius * self._omega

    def reversed(self):
        return GreatCircleArc(self.b, self.a)

    def translated(self, offset):
        if np.any(np.asarray(offset) != 0):
            raise ValueError("sphere curves cannot be translated")
        return self

    def to_record(self):
        return {"type": "great_circle", "a": self.a.tolist(), "b": self.b.tolist()}


class Polyline(Curve):
    """Curve known only through samples, parametrized by normalized arclength.

    Explicit half-tangents may be attached; otherwise the first and last
    chords stand in for them.
    """

    kind = "polyline"

    def __init__(self, points, tangent_start=None, tangent_end=None):
        self.points = np.asarray(points, dtype=float)
        if len(self.points) < 2:
            raise ValueError("polyline needs at least two points")
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])
        self._t0 = None if tangent_start is None else np.asarray(tangent_start, dtype=float)
        self._t1 = None if tangent_end is None else np.asarray(tangent_end, dtype=float)

    def _locate(self, t):
        total = self._cum[-1]
        if total == 0.0:
            raise ValueError("polyline has zero length")
        s = min(max(t, 0.0), 1.0) * total
        k = int(np.searchsorted(self._cum, s, side="right")) - 1
        k = min(max(k, 0), len(self.points) - 2)
        return k, s

    def point(self, t):
        if t <= 0.0:
            return self.points[0].copy()
        if t >= 1.0:
            return self.points[-1].copy()
        k, s = self._locate(t)
        h = self._cum[k + 1] - self._cum[k]
        u = 0.0 if h == 0 else (s - self._cum[k]) / h
        return self.points[k] + u * (self.points[k + 1] - self.points[k])

    def derivative(self, t):
        k, _ = self._locate(t)
        return (self.points[k + 1] - self.points[k]) / (self._cum[k + 1] - self._cum[k]) * self._cum[-1]

    def sample(self, n: int) -> np.ndarray:
        # the samples are the geometry; resampling would not add information
        return self.points.copy()

    def tangent_start(self):
        if self._t0 is not None:
            return self._t0.copy()
        return _unit(self.points[1] - self.points[0])

    def tangent_end(self):
        if self._t1 is not None:
            return self._t1.copy()
        return _unit(self.points[-2] - self.points[-1])

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def reversed(self):
        return Polyline(self.points[::-1], self._t1, self._t0)

    def translated(self, offset):
        return Polyline(self.points + np.asarray(offset, dtype=float), self._t0, self._t1)

    def to_record(self):
        rec = {"type": "polyline", "points": self.points.tolist()}
        if self._t0 is not None:
            rec["tangent_start"] = self._t0.tolist()
        if self._t1 is not None:
            rec["tangent_end"] = self._t1.tolist()
        return rec


def _smootherstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6 * u - 15) + 10)


def _rotate(v: np.ndarray, angle) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    x, y = v[..., 0], v[..., 1]
    return np.stack([c * x - s * y, s * x + c * y], axis=-1)


class BlendedCurve(Curve):
    """A planar curve twisted about one or both endpoints.

    Near an endpoint ``P`` each point ``p`` at distance ``r < R`` from ``P``
    is rotated about ``P`` by ``delta * (1 - g(r / R))`` with ``g`` the
    smootherstep ramp, so the end tangent turns by exactly ``delta`` and
    the curve is untouched beyond the first point at distance ``R``.  Ends
    are given as ``(delta, R)`` or None.
    """

    kind = "blended"

    def __init__(self, base: Curve, start=None, end=None):
        self.base = base
        self.start_blend = None if start is None else (float(start[0]), float(start[1]))
        self.end_blend = None if end is None else (float(end[0]), float(end[1]))
        self._p0 = np.asarray(base.point(0.0), dtype=float)
        self._p1 = np.asarray(base.point(1.0), dtype=float)
        self._t0 = 0.0 if start is None else self._exit(self._p0, self.start_blend[1], False)
        self._t1 = 1.0 if end is None else self._exit(self._p1, self.end_blend[1], True)

    def _exit(self, center, radius, from_end) -> float:
        """Parameter where the curve first leaves the disk about one endpoint."""
        base = self.base
        if base.kind == "segment":
            u = radius / base.length
        elif base.kind == "circular_arc" and 2 * base.radius > radius:
            u = 2 * math.asin(radius / (2 * base.radius)) / abs(base.sweep)
        else:
            u = None
        if u is not None:
            if u >= 1.0:
                raise ValueError("blend radius exceeds the curve")
            return 1.0 - u if from_end else u
        t = np.linspace(0.0, 1.0, 1025)
        if from_end:
            t = t[::-1]
        r = np.array([np.linalg.norm(base.point(x) - center) for x in t])
        out = np.nonzero(r >= radius)[0]
        if not len(out):
            raise ValueError("blend radius exceeds the curve")
        lo, hi = t[out[0] - 1], t[out[0]]
        for _ in range(60):
            mid = (lo + hi) / 2
            if np.linalg.norm(base.point(mid) - center) >= radius:
                hi = mid
            else:
                lo = mid
        return float(hi)

    def _twist(self, t: np.ndarray, pts: np.ndarray) -> np.ndarray:
        pts = np.array(pts, dtype=float)
        for blend, center, mask in ((self.start_blend, self._p0, t < self._t0),
                                    (self.end_blend, self._p1, t > self._t1)):
            if blend is None or not mask.any():
                continue
            delta, radius = blend
            d = pts[mask] - center
            u = np.hypot(d[:, 0], d[:, 1]) / radius
            pts[mask] = center + _rotate(d, delta * (1 - _smootherstep(u)))[..., :2]
        return pts

    def point(self, t):
        return self._twist(np.array([t]), np.asarray(self.base.point(t))[None])[0]

    def derivative(self, t):
        h = 1e-6
        a, b = max(t - h, 0.0), min(t + h, 1.0)
        return (self.point(b) - self.point(a)) / (b - a)

    def sample(self, n: int) -> np.ndarray:
        n = max(int(n), 2)
        t = np.linspace(0.0, 1.0, n)
        if self.base.kind in ("segment", "circular_arc"):
            pts = self.base.sample(n)
        else:
            pts = np.array([self.base.point(x) for x in t])
        return self._twist(t, pts)

    def tangent_start(self):
        t = self.base.tangent_start()
        return t if self.start_blend is None else _rotate(t, self.start_blend[0])

    def tangent_end(self):
        t = self.base.tangent_end()
        return t if self.end_blend is None else _rotate(t, self.end_blend[0])

    def reversed(self):
        return BlendedCurve(self.base.reversed(), self.end_blend, self.start_blend)

    def translated(self, offset):
        return BlendedCurve(self.base.translated(offset), self.start_blend, self.end_blend)

    def to_record(self):
        return {"type": "blended", "base": self.base.to_record(),
                "start": None if self.start_blend is None else list(self.start_blend),
                "end": None if self.end_blend is None else list(self.end_blend)}


def curve_from_record(rec: dict) -> Curve:
    kind = rec["type"]
    if kind == "segment":
        return Segment(rec["p0"], rec["p1"])
    if kind == "circular_arc":
        return CircularArc(rec["center"], rec["radius"], rec["start_angle"], rec["sweep"])
    if kind == "great_circle":
        return GreatCircleArc(rec["a"], rec["b"])
    if kind == "polyline":
        return Polyline(rec["points"], rec.get("tangent_start"), rec.get("tangent_end"))
    if kind == "blended":
        return BlendedCurve(curve_from_record(rec["base"]), rec.get("start"), rec.get("end"))
    raise ValueError(f"unknown curve type {kind!r}")
