import Papa from "papaparse";

export class CsvFormatError extends Error {}

export interface SweepMeta {
    [key: string]: string;
}

export interface ParsedSweep {
    meta: SweepMeta;
    columns: string[];
    rows: Record<string, number>[];
}

/** Parse a sweep CSV: optional leading `# key=value ...` metadata comment
 *  lines, then a header row and numeric data rows. */
export function parseSweepCsv(text: string): ParsedSweep {
    const meta: SweepMeta = {};
    const lines = text.split(/\r?\n/);
    let body = 0;
    while (body < lines.length && lines[body].startsWith("#")) {
        for (const token of lines[body].slice(1).trim().split(/\s+/)) {
            const eq = token.indexOf("=");
            if (eq > 0) {
                meta[token.slice(0, eq)] = token.slice(eq + 1);
            }
        }
        body += 1;
    }
    const csvText = lines.slice(body).join("\n");
    const result = Papa.parse<Record<string, unknown>>(csvText, {
        header: true,
        dynamicTyping: true,
        skipEmptyLines: true,
    });
    if (result.errors.length > 0) {
        const first = result.errors[0];
        throw new CsvFormatError(`CSV parse error: ${first.message} (row ${first.row})`);
    }
    const columns = result.meta.fields ?? [];
    if (columns.length === 0) {
        throw new CsvFormatError("CSV has no header row");
    }
    if (result.data.length === 0) {
        throw new CsvFormatError("CSV has no data rows");
    }
    const rows: Record<string, number>[] = [];
    for (const raw of result.data) {
        const row: Record<string, number> = {};
        for (const col of columns) {
            const value = raw[col];
            if (typeof value !== "number" || Number.isNaN(value)) {
                throw new CsvFormatError(`non-numeric value ${JSON.stringify(value)} in column ${col}`);
            }
            row[col] = value;
        }
        rows.push(row);
    }
    return { meta, columns, rows };
}

/** Axis label for the C column given the probability scaling rule. */
export function xAxisLabel(x: string, meta: SweepMeta): string {
    if (x !== "C") {
        return x;
    }
    switch (meta.rule) {
        case "logn_over_n":
            return "C  (p = C·log(n)/n)";
        case "one_over_n":
            return "C  (p = C/n)";
        case "fixed":
            return "C  (p = C)";
        default:
            return "C";
    }
}
