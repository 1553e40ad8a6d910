#!/usr/bin/env node
/**
 * Render one cirsim CSV artifact to a PNG figure:
 *
 *     cirsim-render <kind> <in.csv> <out.png>
 *
 * kinds: surface | convergence | efficiency | order-sweep | usage
 */

import { readFileSync, writeFileSync } from "fs";
import * as echarts from "echarts";
import { Resvg } from "@resvg/resvg-js";
import { parseCsv } from "./csv";
import { buildFigure } from "./figures";
import { FIGURE_KINDS, FigureKind } from "./schemas";

export interface RenderResult {
    width: number;
    height: number;
    bytes: number;
}

/** Build the figure for `kind` from `inPath` and write a PNG to `outPath`. */
export function render(kind: FigureKind, inPath: string, outPath: string): RenderResult {
    const table = parseCsv(readFileSync(inPath, "utf-8"));
    const option = buildFigure(kind, table);

    const width = 800;
    const height = 560;
    const chart = echarts.init(null as never, null, { renderer: "svg", ssr: true, width, height });
    try {
        chart.setOption(option);
        const svg = chart.renderToSVGString();
        const png = new Resvg(svg, { fitTo: { mode: "width", value: width } }).render().asPng();
        writeFileSync(outPath, png);
        return { width, height, bytes: png.length };
    } finally {
        chart.dispose();
    }
}

export function main(argv: string[]): number {
    if (argv.length !== 3) {
        console.error(`usage: cirsim-render <kind> <in.csv> <out.png>\nkinds: ${FIGURE_KINDS.join(" | ")}`);
        return 2;
    }
    const [kind, inPath, outPath] = argv;
    if (!FIGURE_KINDS.includes(kind as FigureKind)) {
        console.error(`unknown figure kind "${kind}"; expected one of ${FIGURE_KINDS.join(", ")}`);
        return 2;
    }
    try {
        const result = render(kind as FigureKind, inPath, outPath);
        console.log(`${outPath}: ${result.width}x${result.height}, ${result.bytes} bytes`);
        return 0;
    } catch (err) {
        console.error(`render failed: ${err instanceof Error ? err.message : err}`);
        return 1;
    }
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}
