import * as echarts from "echarts";

import { CsvFormatError, ParsedSweep, xAxisLabel } from "./csv.js";

export interface CurveSpec {
    x: string;
    y: string;
    group: string;
    title?: string;
    width?: number;
    height?: number;
}

export interface Series {
    name: string;
    points: [number, number][];
}

/** Group rows by the group column and sort each curve by x ascending. */
export function buildSeries(parsed: ParsedSweep, spec: CurveSpec): Series[] {
    for (const col of [spec.x, spec.y, spec.group]) {
        if (!parsed.columns.includes(col)) {
            throw new CsvFormatError(
                `column ${JSON.stringify(col)} not in CSV header [${parsed.columns.join(", ")}]`,
            );
        }
    }
    const groups = new Map<number, [number, number][]>();
    for (const row of parsed.rows) {
        const key = row[spec.group];
        if (!groups.has(key)) {
            groups.set(key, []);
        }
        groups.get(key)!.push([row[spec.x], row[spec.y]]);
    }
    const keys = [...groups.keys()].sort((a, b) => a - b);
    return keys.map((key) => ({
        name: `${spec.group} = ${key}`,
        points: groups.get(key)!.sort((a, b) => a[0] - b[0]),
    }));
}

export function buildOption(parsed: ParsedSweep, spec: CurveSpec): echarts.EChartsOption {
    const series = buildSeries(parsed, spec);
    return {
        animation: false,
        title: { text: spec.title ?? `${spec.y} vs ${spec.x}`, left: "center" },
        legend: { bottom: 0, data: series.map((s) => s.name) },
        grid: { left: 70, right: 30, top: 50, bottom: 60 },
        xAxis: {
            type: "value",
            name: xAxisLabel(spec.x, parsed.meta),
            nameLocation: "middle",
            nameGap: 30,
        },
        yAxis: {
            type: "value",
            name: spec.y,
            nameLocation: "middle",
            nameGap: 45,
        },
        series: series.map((s) => ({
            type: "line",
            name: s.name,
            data: s.points,
            symbolSize: 7,
        })),
    };
}

/** Render the sweep to an SVG string with echarts server-side rendering. */
export function renderSweepSvg(parsed: ParsedSweep, spec: CurveSpec): string {
    const chart = echarts.init(null, null, {
        renderer: "svg",
        ssr: true,
        width: spec.width ?? 800,
        height: spec.height ?? 520,
    });
    try {
        chart.setOption(buildOption(parsed, spec));
        return chart.renderToSVGString();
    } finally {
        chart.dispose();
    }
}
