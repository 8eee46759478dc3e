#!/usr/bin/env python
"""
SVG output for plane polygon orbits and leapfrog circle patterns

Everything is written with fixed precision and in a fixed order, so the
same input always yields the same bytes. The viewport is the bounding box
of the drawn data plus a 5% margin; y is flipped so the picture reads like
the usual affine chart.
"""

import logging
import os
from typing import Dict, List, Sequence, Tuple, Union

from errors import DegenerateConfiguration
from geometry import PlanePolygon, to_affine
from leapfrog import Circle, Line

logger = logging.getLogger(__name__)

MARGIN = 0.05
LAYER_COLORS = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf']

Box = Tuple[float, float, float, float]


def _fmt(v: float) -> str:
    text = f"{v:.6f}".rstrip('0').rstrip('.')
    return '0' if text in ('-0', '') else text


def _bounding_box(points: Sequence[Tuple[float, float]]) -> Box:
    if not points:
        raise DegenerateConfiguration("nothing to render")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def viewport(points: Sequence[Tuple[float, float]]) -> Box:
    """(x, y, width, height) of the bounding box grown by MARGIN on every side, in SVG coordinates"""
    x0, y0, x1, y1 = _bounding_box(points)
    width, height = x1 - x0, y1 - y0
    mx = MARGIN * width if width > 0 else 1.0
    my = MARGIN * height if height > 0 else 1.0
    return x0 - mx, -(y1 + my), width + 2 * mx, height + 2 * my


def _header(box: Box) -> List[str]:
    x, y, w, h = box
    stroke = max(w, h) / 500
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x)} {_fmt(y)} {_fmt(w)} {_fmt(h)}" '
        f'stroke-width="{_fmt(stroke)}">',
    ]


def _dot_radius(box: Box) -> float:
    return max(box[2], box[3]) / 150


def _segment(a, b, color: str, css: str, extra: str = '') -> str:
    return (f'<line class="{css}" x1="{_fmt(a[0])}" y1="{_fmt(-a[1])}" x2="{_fmt(b[0])}" y2="{_fmt(-b[1])}" '
            f'stroke="{color}"{extra} />')


def polygon_orbit_svg(polygons: Sequence[PlanePolygon]) -> str:
    """One layer per step: vertices, edges (V_i, V_{i+1}) and diagonals (V_i, V_{i+k-1})"""
    layers = []
    for P in polygons:
        layers.append((P, to_affine(P, P.n + P.k)))
    box = viewport([p for _, points in layers for p in points])
    dot = _dot_radius(box)
    lines = _header(box)
    for step, (P, points) in enumerate(layers):
        color = LAYER_COLORS[step % len(LAYER_COLORS)]
        lines.append(f'<g class="layer" id="step-{step}" fill="none">')
        for i in range(P.n):
            lines.append(_segment(points[i], points[i + 1], color, 'edge'))
        if P.k > 2:
            for i in range(P.n):
                lines.append(_segment(points[i], points[i + P.k - 1], color, 'diagonal',
                                      ' stroke-dasharray="2,2" opacity="0.5"'))
        for i in range(P.n):
            x, y = points[i]
            lines.append(f'<circle class="vertex" cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{_fmt(dot)}" fill="{color}" />')
        lines.append('</g>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def _circle_extent(shape: Union[Circle, Line]) -> List[Tuple[float, float]]:
    if isinstance(shape, Circle):
        c, r = shape.center, shape.radius
        return [(c.real - r, c.imag - r), (c.real + r, c.imag + r)]
    return []


def circle_pattern_svg(pattern: Dict) -> str:
    """The four construction circles of one leapfrog site and its five points"""
    points = pattern['points']
    data = [(z.real, z.imag) for z in points.values()]
    for shape in pattern['circles']:
        data.extend(_circle_extent(shape))
    box = viewport(data)
    x, y, w, h = box
    reach = 2 * max(w, h)
    dot = _dot_radius(box)
    lines = _header(box)
    lines.append(f'<g class="circles" fill="none" id="site-{pattern["site"]}">')
    for j, shape in enumerate(pattern['circles']):
        color = LAYER_COLORS[j // 2]
        if isinstance(shape, Circle):
            lines.append(f'<circle class="construction" cx="{_fmt(shape.center.real)}" '
                         f'cy="{_fmt(-shape.center.imag)}" r="{_fmt(shape.radius)}" stroke="{color}" />')
        else:
            d = shape.direction / abs(shape.direction)
            a, b = shape.point - reach * d, shape.point + reach * d
            lines.append(_segment((a.real, a.imag), (b.real, b.imag), color, 'construction'))
    lines.append('</g>')
    lines.append('<g class="points">')
    for name in sorted(points):
        z = points[name]
        lines.append(f'<circle class="point" id="{name}" cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" '
                     f'r="{_fmt(dot)}" fill="black" />')
    lines.append('</g>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def write_svg(text: str, path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='\n') as f:
        f.write(text)
    logger.debug("wrote %d bytes of SVG to %s", len(text), path)
