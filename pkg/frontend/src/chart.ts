/**
 * Deterministic SVG chart assembly: one median line plus a shaded
 * interquartile band per series, shared axes, tick labels, and a legend.
 * No DOM involved; output depends only on the input data.
 */

import { PolicySeries } from "./stats.js";

export interface ChartOptions {
    title: string;
    xLabel: string;
    yLabel: string;
    width?: number;
    height?: number;
}

const MARGIN = { top: 44, right: 24, bottom: 52, left: 68 };

const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

export function seriesColor(order: number): string {
    return PALETTE[order % PALETTE.length];
}

function extent(values: number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    if (!(hi > lo)) {
        hi = lo + 1;
    }
    return [lo, hi];
}

function ticks(lo: number, hi: number, count = 6): number[] {
    const rawStep = (hi - lo) / (count - 1);
    const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const candidates = [1, 2, 2.5, 5, 10].map((m) => m * power);
    const step = candidates.find((s) => (hi - lo) / s <= count - 1) ?? candidates[4];
    const first = Math.ceil(lo / step) * step;
    const result: number[] = [];
    for (let v = first; v <= hi + 1e-9 * step; v += step) {
        result.push(Number(v.toPrecision(12)));
    }
    return result;
}

function fmt(value: number): string {
    return Number(value.toPrecision(6)).toString();
}

function escapeXml(text: string): string {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(series: readonly PolicySeries[], options: ChartOptions): string {
    const width = options.width ?? 760;
    const height = options.height ?? 480;
    const plotW = width - MARGIN.left - MARGIN.right;
    const plotH = height - MARGIN.top - MARGIN.bottom;

    const xs = series.flatMap((s) => s.points.map((p) => p.budget));
    const ys = series.flatMap((s) => s.points.flatMap((p) => [p.q1, p.median, p.q3]));
    const [xLo, xHi] = extent(xs);
    let [yLo, yHi] = extent(ys);
    const pad = 0.05 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;

    const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
    const sy = (y: number) => MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;
    const pt = (x: number, y: number) => `${sx(x).toFixed(2)},${sy(y).toFixed(2)}`;

    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    );
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    parts.push(
        `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16">` +
        `${escapeXml(options.title)}</text>`,
    );

    // gridlines and axis ticks
    for (const t of ticks(yLo, yHi)) {
        const y = sy(t).toFixed(2);
        parts.push(
            `<line x1="${MARGIN.left}" y1="${y}" x2="${width - MARGIN.right}" y2="${y}" ` +
            `stroke="#dddddd" stroke-width="1"/>`,
        );
        parts.push(
            `<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
            `font-size="11">${fmt(t)}</text>`,
        );
    }
    for (const t of ticks(xLo, xHi)) {
        const x = sx(t).toFixed(2);
        parts.push(
            `<line x1="${x}" y1="${height - MARGIN.bottom}" x2="${x}" ` +
            `y2="${height - MARGIN.bottom + 5}" stroke="#333333" stroke-width="1"/>`,
        );
        parts.push(
            `<text x="${x}" y="${height - MARGIN.bottom + 18}" text-anchor="middle" ` +
            `font-size="11">${fmt(t)}</text>`,
        );
    }
    parts.push(
        `<line x1="${MARGIN.left}" y1="${height - MARGIN.bottom}" ` +
        `x2="${width - MARGIN.right}" y2="${height - MARGIN.bottom}" stroke="#333333"/>`,
    );
    parts.push(
        `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
        `y2="${height - MARGIN.bottom}" stroke="#333333"/>`,
    );
    parts.push(
        `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" text-anchor="middle" ` +
        `font-size="13">${escapeXml(options.xLabel)}</text>`,
    );
    parts.push(
        `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
        `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${escapeXml(options.yLabel)}</text>`,
    );

    series.forEach((s, order) => {
        const color = seriesColor(order);
        const forward = s.points.map((p) => pt(p.budget, p.q3));
        const back = [...s.points].reverse().map((p) => pt(p.budget, p.q1));
        parts.push(
            `<path class="iqr-band" d="M${[...forward, ...back].join(" L")} Z" ` +
            `fill="${color}" fill-opacity="0.18" stroke="none"/>`,
        );
        const line = s.points.map((p) => pt(p.budget, p.median)).join(" ");
        parts.push(
            `<polyline class="median-line" points="${line}" fill="none" ` +
            `stroke="${color}" stroke-width="2"/>`,
        );
    });

    series.forEach((s, order) => {
        const y = MARGIN.top + 10 + 18 * order;
        const x = MARGIN.left + 12;
        parts.push(
            `<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" ` +
            `stroke="${seriesColor(order)}" stroke-width="2"/>`,
        );
        parts.push(
            `<text x="${x + 28}" y="${y + 4}" font-size="12">${escapeXml(s.policy)}</text>`,
        );
    });

    parts.push("</svg>");
    return parts.join("\n") + "\n";
}
