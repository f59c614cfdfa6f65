import numpy as np

from carrier_lab import packing, potential, render


def test_k4_circles(k4):
    t, p = k4
    svg = render.render(packing.to_embedded_graph(p, t), p)
    assert svg.count("<circle") == 5  # four packing circles and the unit circle
    assert svg.startswith("<?xml")


def test_deterministic(hex7_d3):
    t, p, g = hex7_d3
    assert render.render(g, p) == render.render(g, p)


def test_heatmap_one_disc_per_vertex(hex7_d4):
    g = hex7_d4[2]
    col = potential.green(potential.exhaust(g, 0.05), 0).values
    svg = render.render(g, None, render.RenderSpec(heatmap=col, edges=False))
    block = svg.split('<g id="heatmap">')[1].split("</g>")[0]
    assert block.count("<circle") == g.n


def test_ramp_is_monotone_in_luminance():
    def lum(hexcol):
        r, g, b = (int(hexcol[i:i + 2], 16) for i in (1, 3, 5))
        return 0.2126 * r + 0.7152 * g + 0.0722 * b

    vals = [lum(render.color(t)) for t in np.linspace(0, 1, 101)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert render.color(0) == "#ffffcc" and render.color(1) == "#800026"
