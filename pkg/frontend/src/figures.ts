import type { EChartsOption, SeriesOption } from "echarts";
import { distinct, Table } from "./csv";
import { FigureKind, SCHEMA } from "./schemas";
import { requireColumns } from "./csv";

const BASE: EChartsOption = {
    backgroundColor: "#ffffff",
    animation: false,
    legend: { top: 24 },
};

function bySchemePoints(table: Table, x: string, y: string): Map<string, [number, number][]> {
    const series = new Map<string, [number, number][]>();
    for (const row of table.rows) {
        const key = row["scheme"];
        if (!series.has(key)) series.set(key, []);
        series.get(key)!.push([Number(row[x]), Number(row[y])]);
    }
    return series;
}

/**
 * Two dashed guide lines with slopes 1/2 and 1 on log-log axes, anchored so
 * both pass through (max x, max y) of the plotted data.
 */
export function referenceLines(xs: number[], ys: number[]): SeriesOption[] {
    const xHi = Math.max(...xs);
    const xLo = Math.min(...xs);
    const yHi = Math.max(...ys);
    return [0.5, 1.0].map(slope => ({
        name: `slope ${slope === 1 ? "1" : "1/2"}`,
        type: "line" as const,
        symbol: "none",
        lineStyle: { type: "dashed" as const, width: 1 },
        color: "#888888",
        data: [
            [xLo, yHi * Math.pow(xLo / xHi, slope)],
            [xHi, yHi],
        ],
    }));
}

function convergenceFigure(table: Table): EChartsOption {
    const series: SeriesOption[] = [];
    for (const [scheme, points] of bySchemePoints(table, "h_mean", "rmse")) {
        series.push({ name: scheme, type: "line", symbolSize: 7, data: points });
    }
    series.push(...referenceLines(
        table.rows.map(r => Number(r["h_mean"])),
        table.rows.map(r => Number(r["rmse"])),
    ));
    return {
        ...BASE,
        title: { text: "Strong error vs mean step" },
        xAxis: { type: "log", name: "h_mean" },
        yAxis: { type: "log", name: "RMSE" },
        series,
    };
}

function efficiencyFigure(table: Table): EChartsOption {
    const series: SeriesOption[] = [];
    for (const [scheme, points] of bySchemePoints(table, "wall_seconds", "rmse")) {
        series.push({ name: scheme, type: "line", symbolSize: 7, data: points });
    }
    return {
        ...BASE,
        title: { text: "Strong error vs compute time" },
        xAxis: { type: "log", name: "seconds" },
        yAxis: { type: "log", name: "RMSE" },
        series,
    };
}

function orderSweepFigure(table: Table): EChartsOption {
    const series: SeriesOption[] = [];
    let first = true;
    for (const [scheme, points] of bySchemePoints(table, "a", "order")) {
        const entry: SeriesOption = { name: scheme, type: "line", symbolSize: 6, data: points };
        if (first) {
            // regime boundaries: the strict drift condition left of 0.25,
            // the positivity condition left of 1
            entry.markLine = {
                symbol: "none",
                lineStyle: { type: "solid", color: "#333333" },
                label: { formatter: "a = {c}" },
                data: [{ xAxis: 0.25 }, { xAxis: 1.0 }],
            };
            first = false;
        }
        series.push(entry);
    }
    return {
        ...BASE,
        title: { text: "Estimated strong order vs a" },
        xAxis: { type: "value", name: "a" },
        yAxis: { type: "value", name: "order" },
        series,
    };
}

function usageFigure(table: Table): EChartsOption {
    const ea = table.rows.filter(r => r["scheme"] === "EA");
    const categories = ea.map(r => Number(r["a"]).toPrecision(3));
    return {
        ...BASE,
        title: { text: "Backstop usage (adaptive scheme)" },
        xAxis: { type: "category", name: "a", data: categories },
        yAxis: { type: "value", name: "% of steps" },
        series: [
            { name: "retake (avoid negative)", type: "bar", data: ea.map(r => Number(r["pct_retake"])) },
            { name: "floor (h = h_min)", type: "bar", data: ea.map(r => Number(r["pct_floor"])) },
        ],
    };
}

function surfaceFigure(table: Table): EChartsOption {
    const hs = distinct(table, "h_max").sort((p, q) => Number(p) - Number(q));
    const ys = distinct(table, "y").sort((p, q) => Number(p) - Number(q));
    const hIndex = new Map(hs.map((v, i) => [v, i]));
    const yIndex = new Map(ys.map((v, i) => [v, i]));
    const cells = table.rows.map(r => [
        hIndex.get(r["h_max"])!,
        yIndex.get(r["y"])!,
        Number(r["prob"]),
    ]);
    const probs = table.rows.map(r => Number(r["prob"]));
    return {
        ...BASE,
        legend: undefined,
        title: { text: "One-step overshoot probability" },
        grid: { right: 90 },
        xAxis: { type: "category", name: "h_max", data: hs.map(v => Number(v).toPrecision(3)) },
        yAxis: { type: "category", name: "y", data: ys.map(v => Number(v).toPrecision(3)) },
        visualMap: {
            min: 0,
            max: Math.max(...probs, 1e-300),
            calculable: false,
            orient: "vertical",
            right: 0,
            top: "center",
        },
        series: [{ type: "heatmap", data: cells, progressive: 0 }],
    };
}

const BUILDERS: Record<FigureKind, (table: Table) => EChartsOption> = {
    convergence: convergenceFigure,
    efficiency: efficiencyFigure,
    "order-sweep": orderSweepFigure,
    usage: usageFigure,
    surface: surfaceFigure,
};

/** Validate the table against the figure kind's schema and build its chart option. */
export function buildFigure(kind: FigureKind, table: Table): EChartsOption {
    requireColumns(table, SCHEMA[kind], kind);
    if (table.rows.length === 0) {
        throw new Error(`${kind}: input CSV has no data rows`);
    }
    return BUILDERS[kind](table);
}
