/**
 * Figure renderer for benchmark outputs.
 *
 * Usage: node dist/cli.js --input results.csv --metric cumulative_reward --output fig.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import { METRICS, SchemaError, parseResultsCsv } from "./csv.js";
import { buildFigure, isMetric } from "./render.js";

interface Args {
    input: string;
    metric: string;
    output: string;
}

function parseArgs(argv: string[]): Args {
    const args: Partial<Args> = {};
    for (let i = 0; i < argv.length; i += 2) {
        const flag = argv[i];
        const value = argv[i + 1];
        if (value === undefined) {
            throw new SchemaError(`flag ${flag} is missing a value`);
        }
        if (flag === "--input") args.input = value;
        else if (flag === "--metric") args.metric = value;
        else if (flag === "--output") args.output = value;
        else throw new SchemaError(`unknown flag ${flag}`);
    }
    for (const key of ["input", "metric", "output"] as const) {
        if (!args[key]) {
            throw new SchemaError(`--${key} is required`);
        }
    }
    return args as Args;
}

export function run(argv: string[]): number {
    try {
        const args = parseArgs(argv);
        if (!isMetric(args.metric)) {
            throw new SchemaError(`unknown metric '${args.metric}'; expected one of ${METRICS.join(", ")}`);
        }
        if (!args.output.endsWith(".svg")) {
            throw new SchemaError("only SVG output is supported; use a .svg output path");
        }
        const records = parseResultsCsv(readFileSync(args.input, "utf-8"));
        writeFileSync(args.output, buildFigure(records, args.metric));
        process.stderr.write(`wrote ${args.output} (${records.length} records)\n`);
        return 0;
    } catch (error) {
        const message = error instanceof Error ? error.message : String(error);
        process.stderr.write(`error: ${message}\n`);
        return 1;
    }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
    process.exit(run(process.argv.slice(2)));
}
