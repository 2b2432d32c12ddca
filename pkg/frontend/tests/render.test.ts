import { describe, expect, it } from "vitest";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { fileURLToPath } from "url";

import { readResultFile } from "../src/csv.js";
import { buildFigure } from "../src/model.js";
import { renderSvg } from "../src/svg.js";
import { renderFile } from "../src/index.js";
import { main as cliMain } from "../src/cli.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixture = (name: string) => path.join(here, "fixtures", name);

function countMatches(text: string, pattern: RegExp): number {
  return (text.match(pattern) ?? []).length;
}

function tmpFile(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
  return path.join(dir, name);
}

describe("result file reader", () => {
  it("parses metadata, columns and rows", () => {
    const file = readResultFile(fixture("fig2_golden.csv"));
    expect(file.metadata["experiment"]).toBe("fig2");
    expect(file.columns[0]).toBe("zeta");
    expect(file.rows.length).toBe(4);
  });

  it("rejects a missing metadata header", () => {
    const bad = tmpFile("bad.csv");
    fs.writeFileSync(bad, "zeta,sop\n0,0.1\n");
    expect(() => readResultFile(bad)).toThrow(/metadata header/);
  });

  it("rejects an empty file and a header-only file", () => {
    const empty = tmpFile("empty.csv");
    fs.writeFileSync(empty, "");
    expect(() => readResultFile(empty)).toThrow(/empty/);
    const headerOnly = tmpFile("header.csv");
    fs.writeFileSync(headerOnly, '# {"experiment": "fig2"}\nzeta,sop\n');
    expect(() => readResultFile(headerOnly)).toThrow(/no data rows/);
  });
});

describe("figure building", () => {
  it("rejects a kind/metadata mismatch, naming both kinds", () => {
    const file = readResultFile(fixture("fig2_golden.csv"));
    expect(() => buildFigure(file, "fig1")).toThrow(/fig1.*fig2/);
  });

  it("rejects unknown kinds", () => {
    const file = readResultFile(fixture("fig2_golden.csv"));
    expect(() => buildFigure(file, "fig9")).toThrow(/unknown figure kind/);
  });

  it("reports missing columns by name", () => {
    const crippled = tmpFile("crippled.csv");
    const lines = fs
      .readFileSync(fixture("fig2_golden.csv"), "utf-8")
      .split("\n");
    lines[1] = lines[1].replace("sop_corr_ml", "sop_mystery");
    fs.writeFileSync(crippled, lines.join("\n"));
    const file = readResultFile(crippled);
    expect(() => buildFigure(file, "fig2")).toThrow(/sop_corr_ml/);
  });
});

describe("fig2 rendering", () => {
  const file = readResultFile(fixture("fig2_golden.csv"));
  const svg = renderSvg(buildFigure(file, "fig2"));

  it("produces one curve per arm with one point per row", () => {
    const curves = svg.match(/<polyline class="curve"[^>]*points="([^"]*)"/g)!;
    expect(curves.length).toBe(3);
    for (const curve of curves) {
      const points = curve.match(/points="([^"]*)"/)![1].trim().split(/\s+/);
      expect(points.length).toBe(file.rows.length);
    }
    expect(countMatches(svg, /<circle class="pt"/g)).toBe(
      3 * file.rows.length
    );
  });

  it("labels every curve", () => {
    for (const label of ["passive", "baseline", "steering"]) {
      expect(svg).toContain(`data-series="${label}"`);
    }
  });

  it("draws error bars only for nonzero half-widths", () => {
    const nonzero = file.rows.filter((row) => Number(row[2]) > 0).length +
      file.rows.filter((row) => Number(row[4]) > 0).length +
      file.rows.filter((row) => Number(row[6]) > 0).length;
    expect(countMatches(svg, /<line class="errbar"/g)).toBe(nonzero);
  });

  it("prints the run provenance in the caption", () => {
    expect(svg).toContain("seed 99");
    expect(svg).toContain("400 trials");
  });

  it("omits error bars when the confidence columns are zero", () => {
    const flat = tmpFile("flat.csv");
    const lines = fs
      .readFileSync(fixture("fig2_golden.csv"), "utf-8")
      .split("\n");
    const cols = lines[1].split(",");
    const zeroed = lines.slice(2).filter(Boolean).map((line) => {
      const parts = line.split(",");
      for (const name of ["ci_passive", "ci_baseline", "ci_corr_ml"]) {
        parts[cols.indexOf(name)] = "0";
      }
      return parts.join(",");
    });
    fs.writeFileSync(flat, [lines[0], lines[1], ...zeroed].join("\n") + "\n");
    const flatSvg = renderSvg(buildFigure(readResultFile(flat), "fig2"));
    expect(countMatches(flatSvg, /<line class="errbar"/g)).toBe(0);
  });
});

describe("fig1 rendering", () => {
  it("produces two curves with the row count as point count", () => {
    const file = readResultFile(fixture("fig1_golden.csv"));
    const svg = renderSvg(buildFigure(file, "fig1"));
    expect(countMatches(svg, /<polyline class="curve"/g)).toBe(2);
    expect(countMatches(svg, /<circle class="pt"/g)).toBe(
      2 * file.rows.length
    );
    expect(svg).toContain('data-series="passive"');
    expect(svg).toContain('data-series="active"');
  });

  it("supports a linear axis override", () => {
    const file = readResultFile(fixture("fig1_golden.csv"));
    const log = renderSvg(buildFigure(file, "fig1"), { yScale: "log" });
    const linear = renderSvg(buildFigure(file, "fig1"), {
      yScale: "linear",
    });
    expect(log).not.toBe(linear);
  });
});

describe("detect rendering", () => {
  it("draws one bar per mode per rate column", () => {
    const file = readResultFile(fixture("detect_golden.csv"));
    const svg = renderSvg(buildFigure(file, "detect"));
    expect(countMatches(svg, /<rect class="bar"/g)).toBe(
      4 * file.rows.length
    );
    for (const label of ["keyconf", "traceA", "traceB", "pairing"]) {
      expect(svg).toContain(`data-bar="${label}"`);
    }
  });
});

describe("cli", () => {
  it("renders a file end to end", () => {
    const out = tmpFile("fig2.svg");
    const code = cliMain([
      "--in", fixture("fig2_golden.csv"), "--kind", "fig2", "--out", out,
    ]);
    expect(code).toBe(0);
    const svg = fs.readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(countMatches(svg, /<polyline class="curve"/g)).toBe(3);
  });

  it("fails with exit code 1 on kind mismatch", () => {
    const out = tmpFile("never.svg");
    const code = cliMain([
      "--in", fixture("fig2_golden.csv"), "--kind", "detect", "--out", out,
    ]);
    expect(code).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("fails on missing flags and on conflicting scales", () => {
    expect(cliMain(["--kind", "fig2"])).toBe(1);
    expect(
      cliMain([
        "--in", fixture("fig2_golden.csv"), "--kind", "fig2",
        "--out", tmpFile("x.svg"), "--log", "--linear",
      ])
    ).toBe(1);
  });

  it("renderFile writes through the library entry point", () => {
    const out = tmpFile("detect.svg");
    renderFile(fixture("detect_golden.csv"), "detect", out);
    expect(fs.readFileSync(out, "utf-8")).toContain('class="bar"');
  });
});
