import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { main, parseArgs } from "../src/cli.js";

const GOOD = [
    "# rule=logn_over_n model=bipartite trials=30 base_seed=1 algorithm=auto",
    "C,n,trials,successes,success_rate,mean_size",
    "0.3,300,30,0,0.0,38.6",
    "8.0,300,30,30,1.0,100.0",
].join("\n");

function tmp(): string {
    return mkdtempSync(join(tmpdir(), "plots-"));
}

describe("parseArgs", () => {
    it("applies the documented defaults", () => {
        const args = parseArgs(["--csv", "a.csv", "--out", "b.svg"]);
        expect(args.x).toBe("C");
        expect(args.y).toBe("success_rate");
        expect(args.group).toBe("n");
    });

    it("requires csv and out", () => {
        expect(() => parseArgs(["--csv", "a.csv"])).toThrow(/usage/);
    });

    it("rejects png output paths", () => {
        expect(() => parseArgs(["--csv", "a.csv", "--out", "fig.png"])).toThrow(/svg/);
    });
});

describe("main", () => {
    it("renders a figure and exits 0", () => {
        const dir = tmp();
        const csv = join(dir, "results.csv");
        const out = join(dir, "fig.svg");
        writeFileSync(csv, GOOD);
        expect(main(["--csv", csv, "--out", out])).toBe(0);
        const svg = readFileSync(out, "utf8");
        expect(svg.startsWith("<svg")).toBe(true);
        expect(svg).toContain("n = 300");
    });

    it("exits nonzero on an empty CSV", () => {
        const dir = tmp();
        const csv = join(dir, "empty.csv");
        writeFileSync(csv, "");
        expect(main(["--csv", csv, "--out", join(dir, "fig.svg")])).toBe(1);
    });

    it("exits nonzero on a malformed CSV", () => {
        const dir = tmp();
        const csv = join(dir, "bad.csv");
        writeFileSync(csv, "C,n\n1,2,3\n");
        expect(main(["--csv", csv, "--out", join(dir, "fig.svg")])).toBe(1);
    });

    it("exits nonzero when a requested column is missing", () => {
        const dir = tmp();
        const csv = join(dir, "cols.csv");
        writeFileSync(csv, GOOD);
        expect(main(["--csv", csv, "--out", join(dir, "fig.svg"), "--y", "no_such"])).toBe(1);
    });

    it("exits nonzero when the CSV does not exist", () => {
        const dir = tmp();
        expect(main(["--csv", join(dir, "missing.csv"), "--out", join(dir, "fig.svg")])).toBe(1);
    });

    it("is idempotent and never alters the input", () => {
        const dir = tmp();
        const csv = join(dir, "results.csv");
        const out = join(dir, "fig.svg");
        writeFileSync(csv, GOOD);
        // chart instance ids leak into class names and differ per in-process
        // init; normalize them (separate CLI runs are byte-identical)
        const normalize = (svg: string) =>
            svg.replace(/zr\d+-cls-\d+/g, "zr-cls").replace(/zr\d+-c\d+/g, "zr-c");
        expect(main(["--csv", csv, "--out", out])).toBe(0);
        const first = normalize(readFileSync(out, "utf8"));
        expect(main(["--csv", csv, "--out", out])).toBe(0);
        expect(normalize(readFileSync(out, "utf8"))).toBe(first);
        expect(readFileSync(csv, "utf8")).toBe(GOOD);
    });
});
