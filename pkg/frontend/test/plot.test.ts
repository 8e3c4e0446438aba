import { describe, expect, it } from "vitest";

import { CsvFormatError, parseSweepCsv } from "../src/csv.js";
import { buildOption, buildSeries, renderSweepSvg } from "../src/plot.js";

const TWO_N = [
    "# rule=logn_over_n model=bipartite trials=30 base_seed=1 algorithm=auto",
    "C,n,trials,successes,success_rate,mean_size",
    "8.0,300,30,30,1.0,100.0",
    "0.3,300,30,0,0.0,38.6",
    "0.3,600,30,2,0.066667,80.1",
    "8.0,600,30,30,1.0,200.0",
].join("\n");

const SPEC = { x: "C", y: "success_rate", group: "n" };

describe("buildSeries", () => {
    it("groups by n and sorts each curve by x", () => {
        const series = buildSeries(parseSweepCsv(TWO_N), SPEC);
        expect(series.map((s) => s.name)).toEqual(["n = 300", "n = 600"]);
        expect(series[0].points).toEqual([
            [0.3, 0.0],
            [8.0, 1.0],
        ]);
        expect(series[1].points).toEqual([
            [0.3, 0.066667],
            [8.0, 1.0],
        ]);
    });

    it("rejects a missing column", () => {
        expect(() => buildSeries(parseSweepCsv(TWO_N), { ...SPEC, y: "nope" })).toThrow(
            CsvFormatError,
        );
    });
});

describe("buildOption", () => {
    it("labels the axes from the metadata rule", () => {
        const option = buildOption(parseSweepCsv(TWO_N), SPEC) as any;
        expect(option.xAxis.name).toContain("log(n)/n");
        expect(option.yAxis.name).toBe("success_rate");
        expect(option.legend.data).toEqual(["n = 300", "n = 600"]);
        expect(option.series).toHaveLength(2);
    });
});

describe("renderSweepSvg", () => {
    it("produces an SVG with one legend entry per n and axis labels", () => {
        const svg = renderSweepSvg(parseSweepCsv(TWO_N), SPEC);
        expect(svg.startsWith("<svg")).toBe(true);
        expect(svg).toContain("n = 300");
        expect(svg).toContain("n = 600");
        expect(svg).toContain("success_rate");
        expect(svg).toContain("log(n)/n");
    });

    it("renders a single-point sweep", () => {
        const svg = renderSweepSvg(
            parseSweepCsv("C,n,success_rate\n1,30,1.0\n"),
            SPEC,
        );
        expect(svg.startsWith("<svg")).toBe(true);
        expect(svg).toContain("n = 30");
    });
});
