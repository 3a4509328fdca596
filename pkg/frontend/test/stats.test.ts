import { describe, expect, it } from "vitest";

import { quantile, aggregate } from "../src/stats.js";
import { ResultRecord } from "../src/csv.js";

describe("quantile", () => {
    it("interpolates linearly between order statistics", () => {
        expect(quantile([1, 3, 5, 7, 9], 0.25)).toBe(3);
        expect(quantile([1, 3, 5, 7, 9], 0.5)).toBe(5);
        expect(quantile([1, 2, 3, 4], 0.25)).toBe(1.75);
        expect(quantile([1, 2, 3, 4], 0.75)).toBe(3.25);
    });

    it("handles extremes and singletons", () => {
        expect(quantile([4], 0.5)).toBe(4);
        expect(quantile([2, 8], 0)).toBe(2);
        expect(quantile([2, 8], 1)).toBe(8);
    });

    it("does not depend on input order", () => {
        expect(quantile([9, 1, 5, 7, 3], 0.75)).toBe(quantile([1, 3, 5, 7, 9], 0.75));
    });

    it("rejects empty samples", () => {
        expect(() => quantile([], 0.5)).toThrow();
    });
});

function record(policy: string, budget: number, value: number): ResultRecord {
    return {
        policy,
        budget,
        replicate: 0,
        seed: 0,
        cumulative_reward: value,
        tau: 10,
        plays: 9,
        pulls: [9],
        avg_reward_per_play: value / 9,
    };
}

describe("aggregate", () => {
    it("groups by policy and budget with sorted outputs", () => {
        const records = [
            record("b_policy", 20, 5),
            record("a_policy", 10, 1),
            record("a_policy", 10, 3),
            record("a_policy", 20, 7),
        ];
        const series = aggregate(records, "cumulative_reward");
        expect(series.map((s) => s.policy)).toEqual(["a_policy", "b_policy"]);
        expect(series[0].points.map((p) => p.budget)).toEqual([10, 20]);
        expect(series[0].points[0].median).toBe(2);
        expect(series[0].points[0].q1).toBe(1.5);
        expect(series[0].points[0].q3).toBe(2.5);
    });
});
