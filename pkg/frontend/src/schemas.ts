export type FigureKind = "surface" | "convergence" | "efficiency" | "order-sweep" | "usage";

export const FIGURE_KINDS: FigureKind[] = [
    "surface",
    "convergence",
    "efficiency",
    "order-sweep",
    "usage",
];

const CONVERGENCE_COLUMNS = [
    "scheme", "h_max", "h_mean", "rmse", "wall_seconds",
    "pct_retake", "pct_floor", "M", "seed", "K",
];

const SWEEP_COLUMNS = [
    "a", "sigma", "scheme", "order", "pct_retake", "pct_floor", "M", "seed", "K",
];

/** Required input columns per figure kind. */
export const SCHEMA: Record<FigureKind, string[]> = {
    surface: ["y", "h_max", "prob"],
    convergence: CONVERGENCE_COLUMNS,
    efficiency: CONVERGENCE_COLUMNS,
    "order-sweep": SWEEP_COLUMNS,
    usage: SWEEP_COLUMNS,
};
