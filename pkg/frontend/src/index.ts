export { parseCsv, requireColumns, numeric, distinct } from "./csv";
export type { Table } from "./csv";
export { buildFigure, referenceLines } from "./figures";
export { render, main } from "./render";
export { FIGURE_KINDS, SCHEMA } from "./schemas";
export type { FigureKind } from "./schemas";
