"""
R-squared vs retained-percentage line charts, written as plain SVG text.

Coordinates are formatted with fixed precision so the same report always
renders to the same bytes.
"""
import json
from html import escape

from benchmark.schemas import MethodTrajectory, SensitivityReport
from feature_selection.schemas import FAMILIES

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39",
    "#7b4173", "#3182bd", "#e6550d", "#31a354",
)

MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 170, 50, 60
CHART_WIDTH, CHART_HEIGHT = 560, 320
GRID_LINES = 5

GROUP_TITLES = {
    "filter": "Filter methods",
    "wrapper": "Wrapper methods",
    "embedded": "Embedded methods",
    "similarity": "Similarity-measure methods",
    "all": "All methods",
}


def chart_groups(report: SensitivityReport) -> dict[str, list[MethodTrajectory]]:
    """Family groups that have at least one method, then ``all``."""
    by_id = {t.method_id: t for t in report.trajectories}
    groups = {}
    for family, members in FAMILIES.items():
        present = [by_id[m] for m in members if m in by_id]
        if present:
            groups[family] = present
    groups["all"] = list(report.trajectories)
    return groups


def _y_range(trajectories: list[MethodTrajectory]) -> tuple[float, float]:
    values = [r for t in trajectories for _, r in t.valid_points()]
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    if hi - lo < 1e-9:
        lo, hi = lo - 0.05, hi + 0.05
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_chart(title: str, trajectories: list[MethodTrajectory], config: dict | None = None) -> str:
    width = MARGIN_LEFT + CHART_WIDTH + MARGIN_RIGHT
    height = MARGIN_TOP + CHART_HEIGHT + MARGIN_BOTTOM
    y_lo, y_hi = _y_range(trajectories)

    def px(fraction: float) -> float:
        # 20% at the left edge, 100% at the right
        return MARGIN_LEFT + (fraction - 0.2) / 0.8 * CHART_WIDTH

    def py(r2: float) -> float:
        return MARGIN_TOP + CHART_HEIGHT - (r2 - y_lo) / (y_hi - y_lo) * CHART_HEIGHT

    svg = []
    svg.append(f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" font-family="system-ui, -apple-system, sans-serif">')
    svg.append(f'  <title>{escape(title)}</title>')
    if config:
        svg.append(f'  <metadata>{escape(json.dumps(config, sort_keys=True, separators=(",", ":")))}</metadata>')
    svg.append(f'  <rect width="{width}" height="{height}" fill="#ffffff"/>')
    svg.append(f'  <text x="{MARGIN_LEFT + CHART_WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16" font-weight="600" fill="#333">{escape(title)}</text>')

    for i in range(GRID_LINES + 1):
        y = MARGIN_TOP + CHART_HEIGHT - i / GRID_LINES * CHART_HEIGHT
        val = y_lo + i / GRID_LINES * (y_hi - y_lo)
        svg.append(f'  <line x1="{MARGIN_LEFT}" y1="{y:.2f}" x2="{MARGIN_LEFT + CHART_WIDTH}" y2="{y:.2f}" stroke="#e0e0e0" stroke-width="1"/>')
        svg.append(f'  <text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11" fill="#666">{val:.3f}</text>')
    for pct in range(20, 101, 10):
        x = px(pct / 100)
        svg.append(f'  <line x1="{x:.2f}" y1="{MARGIN_TOP + CHART_HEIGHT}" x2="{x:.2f}" y2="{MARGIN_TOP + CHART_HEIGHT + 5}" stroke="#333" stroke-width="1"/>')
        svg.append(f'  <text x="{x:.2f}" y="{MARGIN_TOP + CHART_HEIGHT + 20}" text-anchor="middle" font-size="11" fill="#333">{pct}%</text>')

    svg.append(f'  <text x="18" y="{MARGIN_TOP + CHART_HEIGHT / 2:.1f}" text-anchor="middle" font-size="12" fill="#666" transform="rotate(-90, 18, {MARGIN_TOP + CHART_HEIGHT / 2:.1f})">R-squared (10-fold CV)</text>')
    svg.append(f'  <text x="{MARGIN_LEFT + CHART_WIDTH / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12" fill="#666">Retained data</text>')

    for i, t in enumerate(trajectories):
        color = PALETTE[i % len(PALETTE)]
        points = t.valid_points()
        if points:
            coords = " ".join(f"{px(f):.2f},{py(r):.2f}" for f, r in points)
            svg.append(f'  <polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if t.slope is not None and t.intercept is not None:
            f0, f1 = min(f for f, _ in points), max(f for f, _ in points)
            svg.append(
                f'  <line x1="{px(f0):.2f}" y1="{py(t.intercept + t.slope * f0):.2f}" '
                f'x2="{px(f1):.2f}" y2="{py(t.intercept + t.slope * f1):.2f}" '
                f'stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>'
            )
        legend_y = MARGIN_TOP + 14 * i
        legend_x = MARGIN_LEFT + CHART_WIDTH + 16
        svg.append(f'  <rect x="{legend_x}" y="{legend_y}" width="12" height="3" fill="{color}"/>')
        svg.append(f'  <text x="{legend_x + 18}" y="{legend_y + 5}" font-size="11" fill="#333">{escape(t.method_id)}</text>')

    svg.append(f'  <line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{MARGIN_TOP + CHART_HEIGHT}" stroke="#333" stroke-width="1"/>')
    svg.append(f'  <line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP + CHART_HEIGHT}" x2="{MARGIN_LEFT + CHART_WIDTH}" y2="{MARGIN_TOP + CHART_HEIGHT}" stroke="#333" stroke-width="1"/>')
    svg.append('</svg>')
    return "\n".join(svg) + "\n"


def render_charts(report: SensitivityReport) -> dict[str, str]:
    """File name to SVG text, one chart per group."""
    return {
        f"{group}.svg": render_chart(GROUP_TITLES[group], trajectories, report.config)
        for group, trajectories in chart_groups(report).items()
    }
