#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { CsvFormatError, parseSweepCsv } from "./csv.js";
import { CurveSpec, renderSweepSvg } from "./plot.js";

const USAGE =
    "usage: plot-sweep --csv results.csv --out fig.svg " +
    "[--x C] [--y success_rate] [--group n] [--title TEXT]";

interface Args extends CurveSpec {
    csv: string;
    out: string;
}

export function parseArgs(argv: string[]): Args {
    const opts: Record<string, string> = {};
    for (let i = 0; i < argv.length; i += 2) {
        const flag = argv[i];
        if (!flag.startsWith("--") || i + 1 >= argv.length) {
            throw new Error(USAGE);
        }
        opts[flag.slice(2)] = argv[i + 1];
    }
    if (!opts.csv || !opts.out) {
        throw new Error(USAGE);
    }
    if (opts.out.toLowerCase().endsWith(".png")) {
        throw new Error(
            "PNG output needs a canvas backend that is not available; write an .svg file instead",
        );
    }
    return {
        csv: opts.csv,
        out: opts.out,
        x: opts.x ?? "C",
        y: opts.y ?? "success_rate",
        group: opts.group ?? "n",
        title: opts.title,
    };
}

export function main(argv: string[]): number {
    let args: Args;
    try {
        args = parseArgs(argv);
    } catch (err) {
        console.error((err as Error).message);
        return 1;
    }
    let text: string;
    try {
        text = readFileSync(args.csv, "utf8");
    } catch (err) {
        console.error(`cannot read ${args.csv}: ${(err as Error).message}`);
        return 1;
    }
    try {
        const parsed = parseSweepCsv(text);
        const svg = renderSweepSvg(parsed, args);
        writeFileSync(args.out, svg);
        const groups = new Set(parsed.rows.map((r) => r[args.group])).size;
        console.log(`wrote ${args.out}: ${groups} curve(s), ${parsed.rows.length} points`);
        return 0;
    } catch (err) {
        if (err instanceof CsvFormatError) {
            console.error(`malformed CSV: ${err.message}`);
        } else {
            console.error((err as Error).message);
        }
        return 1;
    }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
    process.exit(main(process.argv.slice(2)));
}
