#!/usr/bin/env node
/**
 * plots --in <results.csv> --kind <fig1|fig2|detect> --out <figure.svg>
 *       [--log | --linear]
 *
 * Renders a pilotguard experiment CSV to an SVG figure. The file's
 * embedded metadata must match the requested kind. Outage figures default
 * to a log y-axis, detection bars to linear.
 */

import { parseArgs } from "node:util";
import { renderFile } from "./index.js";
import { FIGURE_KINDS } from "./model.js";
import { YScale } from "./svg.js";

function usage(): string {
  return (
    "usage: plots --in <results.csv> --kind <" +
    FIGURE_KINDS.join("|") +
    "> --out <figure.svg> [--log|--linear]"
  );
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        kind: { type: "string" },
        out: { type: "string" },
        log: { type: "boolean", default: false },
        linear: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    console.error(String(err));
    console.error(usage());
    return 1;
  }
  const { in: input, kind, out } = parsed.values;
  if (!input || !kind || !out) {
    console.error(usage());
    return 1;
  }
  if (parsed.values.log && parsed.values.linear) {
    console.error("--log and --linear are mutually exclusive");
    return 1;
  }
  const yScale: YScale | undefined = parsed.values.log
    ? "log"
    : parsed.values.linear
      ? "linear"
      : undefined;
  try {
    renderFile(input, kind, out, yScale);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
  console.error(`wrote ${out}`);
  return 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("plots")) {
  process.exit(main(process.argv.slice(2)));
}
