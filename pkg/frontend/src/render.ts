/** Figure assembly: benchmark records in, finished SVG out. */

import { Metric, METRICS, ResultRecord, SchemaError } from "./csv.js";
import { renderChart } from "./chart.js";
import { aggregate } from "./stats.js";

export const METRIC_LABELS: Record<Metric, string> = {
    cumulative_reward: "Cumulative reward",
    avg_reward_per_play: "Average reward per play",
    plays: "Total plays",
};

export function isMetric(name: string): name is Metric {
    return (METRICS as readonly string[]).includes(name);
}

export function buildFigure(records: readonly ResultRecord[], metric: Metric): string {
    if (records.length === 0) {
        throw new SchemaError("no records to plot");
    }
    const series = aggregate(records, metric);
    return renderChart(series, {
        title: `${METRIC_LABELS[metric]} by budget`,
        xLabel: "budget",
        yLabel: METRIC_LABELS[metric],
    });
}
