export { readResultFile, numericColumn, stringColumn } from "./csv.js";
export type { ResultFile } from "./csv.js";
export { buildFigure, checkKind, FIGURE_KINDS } from "./model.js";
export type { Figure, CurveFigure, BarFigure, FigureKind, Series } from "./model.js";
export { renderSvg } from "./svg.js";
export type { RenderOptions, YScale } from "./svg.js";

import * as fs from "fs";
import { readResultFile } from "./csv.js";
import { buildFigure } from "./model.js";
import { renderSvg, YScale } from "./svg.js";

/** Read a result CSV, build the requested figure, write the SVG. */
export function renderFile(
  input: string,
  kind: string,
  output: string,
  yScale?: YScale
): void {
  const file = readResultFile(input);
  const figure = buildFigure(file, kind);
  fs.writeFileSync(output, renderSvg(figure, { yScale }));
}
