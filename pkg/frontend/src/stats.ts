/** Aggregation of per-episode records into per-(policy, budget) quartiles. */

import { Metric, ResultRecord, metricValue } from "./csv.js";

/**
 * Quantile with linear interpolation between order statistics: the value at
 * fractional rank (n - 1) * q. Matches the harness's summary computation
 * exactly so the cross-check below machine precision is meaningful.
 */
export function quantile(values: readonly number[], q: number): number {
    if (values.length === 0) {
        throw new Error("quantile of empty sample");
    }
    const sorted = [...values].sort((a, b) => a - b);
    const rank = (sorted.length - 1) * q;
    const lo = Math.floor(rank);
    const hi = Math.min(lo + 1, sorted.length - 1);
    const frac = rank - lo;
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

export interface BudgetPoint {
    budget: number;
    median: number;
    q1: number;
    q3: number;
}

export interface PolicySeries {
    policy: string;
    points: BudgetPoint[];
}

export function aggregate(records: readonly ResultRecord[], metric: Metric): PolicySeries[] {
    const groups = new Map<string, Map<number, number[]>>();
    for (const record of records) {
        let byBudget = groups.get(record.policy);
        if (!byBudget) {
            byBudget = new Map();
            groups.set(record.policy, byBudget);
        }
        let values = byBudget.get(record.budget);
        if (!values) {
            values = [];
            byBudget.set(record.budget, values);
        }
        values.push(metricValue(record, metric));
    }
    return [...groups.keys()].sort().map((policy) => ({
        policy,
        points: [...groups.get(policy)!.entries()]
            .sort((a, b) => a[0] - b[0])
            .map(([budget, values]) => ({
                budget,
                median: quantile(values, 0.5),
                q1: quantile(values, 0.25),
                q3: quantile(values, 0.75),
            })),
    }));
}
