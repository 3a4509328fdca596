/**
 * Parsers for the harness CSV outputs. The schema is fixed and unquoted, so
 * parsing is a straight comma split with per-column validation.
 */

export class SchemaError extends Error {}

export const METRICS = ["cumulative_reward", "avg_reward_per_play", "plays"] as const;
export type Metric = (typeof METRICS)[number];

export interface ResultRecord {
    policy: string;
    budget: number;
    replicate: number;
    seed: number;
    cumulative_reward: number;
    tau: number;
    plays: number;
    pulls: number[];
    avg_reward_per_play: number;
}

export interface SummaryRow {
    policy: string;
    budget: number;
    median_reward: number;
    q1: number;
    q3: number;
    median_tau: number;
    median_plays: number;
}

const RESULT_COLUMNS = [
    "policy", "budget", "replicate", "seed",
    "cumulative_reward", "tau", "plays", "avg_reward_per_play",
];

const SUMMARY_COLUMNS = [
    "policy", "budget", "median_reward", "q1", "q3", "median_tau", "median_plays",
];

function splitLines(text: string): string[] {
    return text.split(/\r?\n/).filter((line) => line.trim().length > 0);
}

function headerIndex(header: string[], required: string[]): Map<string, number> {
    const index = new Map(header.map((name, i) => [name, i] as const));
    const missing = required.filter((name) => !index.has(name));
    if (missing.length > 0) {
        throw new SchemaError(`missing columns: ${missing.join(", ")}`);
    }
    return index;
}

function numberAt(fields: string[], index: Map<string, number>, column: string, line: number): number {
    const value = Number(fields[index.get(column)!]);
    if (!Number.isFinite(value)) {
        throw new SchemaError(`line ${line}: column ${column} is not a number`);
    }
    return value;
}

export function parseResultsCsv(text: string): ResultRecord[] {
    const lines = splitLines(text);
    if (lines.length === 0) {
        throw new SchemaError("empty CSV");
    }
    const header = lines[0].split(",");
    const index = headerIndex(header, RESULT_COLUMNS);
    const pullColumns = header
        .map((name, i) => ({ name, i }))
        .filter(({ name }) => /^pulls_\d+$/.test(name))
        .sort((a, b) => Number(a.name.slice(6)) - Number(b.name.slice(6)));
    if (lines.length === 1) {
        throw new SchemaError("CSV has a header but no data rows");
    }
    return lines.slice(1).map((line, row) => {
        const fields = line.split(",");
        if (fields.length !== header.length) {
            throw new SchemaError(`line ${row + 2}: expected ${header.length} fields, got ${fields.length}`);
        }
        return {
            policy: fields[index.get("policy")!],
            budget: numberAt(fields, index, "budget", row + 2),
            replicate: numberAt(fields, index, "replicate", row + 2),
            seed: numberAt(fields, index, "seed", row + 2),
            cumulative_reward: numberAt(fields, index, "cumulative_reward", row + 2),
            tau: numberAt(fields, index, "tau", row + 2),
            plays: numberAt(fields, index, "plays", row + 2),
            pulls: pullColumns.map(({ i }) => Number(fields[i])),
            avg_reward_per_play: numberAt(fields, index, "avg_reward_per_play", row + 2),
        };
    });
}

export function parseSummaryCsv(text: string): SummaryRow[] {
    const lines = splitLines(text);
    if (lines.length === 0) {
        throw new SchemaError("empty CSV");
    }
    const header = lines[0].split(",");
    const index = headerIndex(header, SUMMARY_COLUMNS);
    return lines.slice(1).map((line, row) => {
        const fields = line.split(",");
        return {
            policy: fields[index.get("policy")!],
            budget: numberAt(fields, index, "budget", row + 2),
            median_reward: numberAt(fields, index, "median_reward", row + 2),
            q1: numberAt(fields, index, "q1", row + 2),
            q3: numberAt(fields, index, "q3", row + 2),
            median_tau: numberAt(fields, index, "median_tau", row + 2),
            median_plays: numberAt(fields, index, "median_plays", row + 2),
        };
    });
}

export function metricValue(record: ResultRecord, metric: Metric): number {
    return record[metric];
}
