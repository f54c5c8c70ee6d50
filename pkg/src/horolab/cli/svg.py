"""Standalone SVG charts: bars and polylines, nothing else."""

from __future__ import annotations

from xml.sax.saxutils import escape

W, H, PAD = 480, 300, 48


def _frame(title, xlabel, ylabel, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">\n'
        f'<rect width="{W}" height="{H}" fill="white"/>\n'
        f'<text x="{W // 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>\n'
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD // 2}" y2="{H - PAD}" stroke="black"/>\n'
        f'<line x1="{PAD}" y1="{PAD // 2}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>\n'
        f'<text x="{W // 2}" y="{H - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>\n'
        f'<text x="14" y="{H // 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {H // 2})">{escape(ylabel)}</text>\n'
        + "".join(body) + "</svg>\n"
    )


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1
    return lambda v: a + (v - lo) * (b - a) / span


def _fmt(v):
    return f"{v:.1f}".rstrip("0").rstrip(".")


def bar_chart(pairs, title="", xlabel="", ylabel="") -> str:
    pairs = list(pairs)
    body = []
    if pairs:
        top = max(v for _, v in pairs) or 1
        y = _scale(0, top, H - PAD, PAD)
        step = (W - 1.5 * PAD) / len(pairs)
        for k, (lab, v) in enumerate(pairs):
            x = PAD + k * step
            body.append(f'<rect x="{_fmt(x + step * 0.1)}" y="{_fmt(y(v))}" width="{_fmt(step * 0.8)}" '
                        f'height="{_fmt(H - PAD - y(v))}" fill="steelblue"/>\n')
            body.append(f'<text x="{_fmt(x + step / 2)}" y="{H - PAD + 14}" text-anchor="middle" font-size="10">{escape(str(lab))}</text>\n')
        body.append(f'<text x="{PAD - 4}" y="{PAD + 4}" text-anchor="end" font-size="10">{top}</text>\n')
    return _frame(title, xlabel, ylabel, body)


def line_chart(points, title="", xlabel="", ylabel="") -> str:
    pts = [(x, y) for x, y in points if y is not None]
    body = []
    if pts:
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        fx = _scale(min(xs), max(xs), PAD + 10, W - PAD)
        fy = _scale(min(0, min(ys)), max(ys), H - PAD, PAD)
        line = " ".join(f"{_fmt(fx(x))},{_fmt(fy(y))}" for x, y in pts)
        body.append(f'<polyline points="{line}" fill="none" stroke="steelblue" stroke-width="2"/>\n')
        for x, y in pts:
            body.append(f'<circle cx="{_fmt(fx(x))}" cy="{_fmt(fy(y))}" r="3" fill="steelblue"/>\n')
            body.append(f'<text x="{_fmt(fx(x))}" y="{H - PAD + 14}" text-anchor="middle" font-size="10">{escape(str(x))}</text>\n')
        body.append(f'<text x="{PAD - 4}" y="{PAD + 4}" text-anchor="end" font-size="10">{max(ys)}</text>\n')
    return _frame(title, xlabel, ylabel, body)
