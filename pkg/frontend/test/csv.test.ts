import { describe, expect, it } from "vitest";

import { CsvFormatError, parseSweepCsv, xAxisLabel } from "../src/csv.js";

const SAMPLE = [
    "# rule=logn_over_n model=bipartite trials=30 base_seed=11001 algorithm=auto",
    "C,n,trials,successes,success_rate,mean_size",
    "0.3,300,30,0,0.000000,38.633333",
    "8.0,300,30,30,1.000000,100.000000",
    "",
].join("\n");

describe("parseSweepCsv", () => {
    it("extracts metadata, columns, and typed rows", () => {
        const parsed = parseSweepCsv(SAMPLE);
        expect(parsed.meta.rule).toBe("logn_over_n");
        expect(parsed.meta.model).toBe("bipartite");
        expect(parsed.columns).toEqual(["C", "n", "trials", "successes", "success_rate", "mean_size"]);
        expect(parsed.rows).toHaveLength(2);
        expect(parsed.rows[0].C).toBe(0.3);
        expect(parsed.rows[1].success_rate).toBe(1.0);
    });

    it("accepts a single-row CSV", () => {
        const parsed = parseSweepCsv("C,n,trials,successes,success_rate,mean_size\n1,30,5,5,1.0,10\n");
        expect(parsed.rows).toHaveLength(1);
    });

    it("works without a metadata comment", () => {
        const parsed = parseSweepCsv("C,n\n1,30\n");
        expect(parsed.meta).toEqual({});
        expect(parsed.rows[0].n).toBe(30);
    });

    it("rejects an empty CSV", () => {
        expect(() => parseSweepCsv("")).toThrow(CsvFormatError);
        expect(() => parseSweepCsv("# rule=fixed\n")).toThrow(CsvFormatError);
    });

    it("rejects a header-only CSV", () => {
        expect(() => parseSweepCsv("C,n,success_rate\n")).toThrow(CsvFormatError);
    });

    it("rejects non-numeric cells", () => {
        expect(() => parseSweepCsv("C,n\noops,30\n")).toThrow(CsvFormatError);
    });

    it("rejects ragged rows", () => {
        expect(() => parseSweepCsv("C,n\n1,2,3\n")).toThrow(CsvFormatError);
    });
});

describe("xAxisLabel", () => {
    it("names the probability rule from the metadata", () => {
        expect(xAxisLabel("C", { rule: "logn_over_n" })).toContain("log(n)/n");
        expect(xAxisLabel("C", { rule: "one_over_n" })).toContain("C/n");
        expect(xAxisLabel("C", { rule: "fixed" })).toBe("C  (p = C)");
        expect(xAxisLabel("C", {})).toBe("C");
        expect(xAxisLabel("p", { rule: "fixed" })).toBe("p");
    });
});
