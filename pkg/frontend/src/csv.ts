/**
 * Reader for pilotguard result files: CSV with a `#`-prefixed JSON line
 * carrying the resolved run configuration, then a column header, then
 * data rows. Values stay as strings here; the figure models decide which
 * columns are numeric.
 */

import * as fs from "fs";

export interface ResultFile {
  metadata: Record<string, unknown>;
  columns: string[];
  rows: string[][];
}

export function readResultFile(path: string): ResultFile {
  if (!fs.existsSync(path)) {
    throw new Error(`input file not found: ${path}`);
  }
  const lines = fs
    .readFileSync(path, "utf-8")
    .split(/\r?\n/)
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: file is empty`);
  }
  if (!lines[0].startsWith("# ")) {
    throw new Error(`${path}: missing '# {json}' metadata header`);
  }
  let metadata: Record<string, unknown>;
  try {
    metadata = JSON.parse(lines[0].slice(2));
  } catch (err) {
    throw new Error(`${path}: metadata header is not valid JSON (${err})`);
  }
  if (lines.length < 2) {
    throw new Error(`${path}: missing column header line`);
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((line) => line.split(","));
  if (rows.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new Error(
        `${path}: row has ${row.length} fields, header has ${columns.length}`
      );
    }
  }
  return { metadata, columns, rows };
}

/** Numeric column accessor with a named-column error. */
export function numericColumn(file: ResultFile, name: string): number[] {
  const idx = file.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column '${name}' (have: ${file.columns.join(", ")})`
    );
  }
  return file.rows.map((row, i) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new Error(`column '${name}' row ${i}: not a number: ${row[idx]}`);
    }
    return value;
  });
}

export function stringColumn(file: ResultFile, name: string): string[] {
  const idx = file.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column '${name}' (have: ${file.columns.join(", ")})`
    );
  }
  return file.rows.map((row) => row[idx]);
}
