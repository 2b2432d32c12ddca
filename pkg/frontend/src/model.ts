/**
 * Figure models: map a result file into plottable series after checking
 * that the file really belongs to the requested figure kind.
 */

import { ResultFile, numericColumn, stringColumn } from "./csv.js";

export type FigureKind = "fig1" | "fig2" | "detect";

export const FIGURE_KINDS: FigureKind[] = ["fig1", "fig2", "detect"];

export interface Series {
  label: string;
  x: number[];
  y: number[];
  /** 95% half-widths, same length as y; zeros mean no visible bar. */
  ci: number[];
}

export interface CurveFigure {
  kind: "fig1" | "fig2";
  xLabel: string;
  yLabel: string;
  series: Series[];
  caption: string;
}

export interface BarGroup {
  label: string;
  values: number[];
}

export interface BarFigure {
  kind: "detect";
  yLabel: string;
  barLabels: string[];
  groups: BarGroup[];
  caption: string;
}

export type Figure = CurveFigure | BarFigure;

export function checkKind(file: ResultFile, kind: string): FigureKind {
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(
      `unknown figure kind '${kind}' (expected ${FIGURE_KINDS.join("|")})`
    );
  }
  const actual = file.metadata["experiment"];
  if (actual !== kind) {
    throw new Error(
      `figure kind mismatch: requested '${kind}' but the file was ` +
        `produced by experiment '${actual}'`
    );
  }
  return kind as FigureKind;
}

function caption(file: ResultFile): string {
  const seed = file.metadata["seed"];
  const trials = file.metadata["trials"];
  return `seed ${seed}, ${trials} trials per point`;
}

export function buildFigure(file: ResultFile, kind: string): Figure {
  const checked = checkKind(file, kind);
  if (checked === "fig1") {
    const x = numericColumn(file, "n");
    return {
      kind: "fig1",
      xLabel: "antennas per terminal",
      yLabel: "secrecy outage probability",
      series: [
        {
          label: "passive",
          x,
          y: numericColumn(file, "sop_passive"),
          ci: numericColumn(file, "ci_passive"),
        },
        {
          label: "active",
          x,
          y: numericColumn(file, "sop_active"),
          ci: numericColumn(file, "ci_active"),
        },
      ],
      caption: caption(file),
    };
  }
  if (checked === "fig2") {
    const x = numericColumn(file, "zeta");
    const arms: Array<[string, string, string]> = [
      ["passive", "sop_passive", "ci_passive"],
      ["baseline", "sop_baseline", "ci_baseline"],
      ["steering", "sop_corr_ml", "ci_corr_ml"],
    ];
    return {
      kind: "fig2",
      xLabel: "correlation factor",
      yLabel: "secrecy outage probability",
      series: arms.map(([label, ycol, cicol]) => ({
        label,
        x,
        y: numericColumn(file, ycol),
        ci: numericColumn(file, cicol),
      })),
      caption: caption(file),
    };
  }
  const rateColumns = [
    "keyconf_fail_rate",
    "traceA_fail_rate",
    "traceB_fail_rate",
    "pairing_fail_rate",
  ];
  const modes = stringColumn(file, "mode");
  const gammas = stringColumn(file, "gamma");
  const deltas = stringColumn(file, "delta");
  const rates = rateColumns.map((name) => numericColumn(file, name));
  const manyCells = new Set(gammas).size > 1 || new Set(deltas).size > 1;
  return {
    kind: "detect",
    yLabel: "failure rate",
    barLabels: rateColumns.map((c) => c.replace("_fail_rate", "")),
    groups: modes.map((mode, i) => ({
      label: manyCells ? `${mode} g=${gammas[i]} d=${deltas[i]}` : mode,
      values: rateColumns.map((_, j) => rates[j][i]),
    })),
    caption: caption(file),
  };
}
