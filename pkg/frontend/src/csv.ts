export interface Table {
    columns: string[];
    rows: Record<string, string>[];
}

/**
 * Parse a cirsim CSV artifact. Leading '#' lines carry run provenance and are
 * skipped; the first remaining line is the header.
 */
export function parseCsv(text: string): Table {
    const lines = text.split(/\r?\n/).filter(line => line.length > 0);
    const body = lines.filter(line => !line.startsWith("#"));
    if (body.length === 0) {
        throw new Error("CSV has no header line");
    }
    const columns = body[0].split(",");
    const rows = body.slice(1).map(line => {
        const parts = line.split(",");
        const row: Record<string, string> = {};
        columns.forEach((c, i) => (row[c] = parts[i] ?? ""));
        return row;
    });
    return { columns, rows };
}

/** Throw if the table is missing any expected column; names the first offender. */
export function requireColumns(table: Table, expected: string[], kind: string): void {
    for (const column of expected) {
        if (!table.columns.includes(column)) {
            throw new Error(`${kind}: input CSV is missing column "${column}" (got: ${table.columns.join(",")})`);
        }
    }
}

export function numeric(table: Table, column: string): number[] {
    return table.rows.map(row => {
        const value = Number(row[column]);
        if (!Number.isFinite(value)) {
            throw new Error(`column "${column}" has non-numeric value "${row[column]}"`);
        }
        return value;
    });
}

/** Distinct values of one column, in first-appearance order. */
export function distinct(table: Table, column: string): string[] {
    const seen = new Set<string>();
    const out: string[] = [];
    for (const row of table.rows) {
        if (!seen.has(row[column])) {
            seen.add(row[column]);
            out.push(row[column]);
        }
    }
    return out;
}
