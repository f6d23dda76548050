import { readFileSync, writeFileSync } from "fs";
import { arm2Kind, parseResults, ResultRow } from "./csv";
import { buildChart, Series } from "./chart";

export type PlotKind = "vs_n" | "vs_inv_lambda_min";
export type GroupKey = "strategy" | "arm2-kind";

export interface PlotSpec {
  inputCsv: string;
  kind: PlotKind;
  output: string;
  /** defaults to "strategy" for vs_n and "arm2-kind" for vs_inv_lambda_min */
  group?: GroupKey;
}

function toSeries(rows: ResultRow[], key: GroupKey, x: (r: ResultRow) => number): Series[] {
  const order: string[] = [];
  const byLabel = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const label = key === "strategy" ? row.strategy : arm2Kind(row.arms);
    if (!byLabel.has(label)) {
      byLabel.set(label, []);
      order.push(label);
    }
    byLabel.get(label)!.push(row);
  }
  return order.map((label) => ({
    label,
    points: byLabel.get(label)!.map((r) => ({
      x: x(r),
      y: r.rescaledRegret,
      se: r.rescaledStderr,
    })),
  }));
}

/** Build the SVG for a spec without writing anything. */
export function renderToString(spec: PlotSpec): string {
  const text = readFileSync(spec.inputCsv, "utf-8");
  const rows = parseResults(text);
  if (rows.length === 0) throw new Error(`no data rows in ${spec.inputCsv}`);
  const group = spec.group ?? (spec.kind === "vs_n" ? "strategy" : "arm2-kind");
  if (spec.kind === "vs_n") {
    return buildChart(toSeries(rows, group, (r) => r.n), {
      xLabel: "budget n",
      yLabel: "rescaled regret n^(3/2) R_n",
      xScale: "log",
    });
  }
  return buildChart(toSeries(rows, group, (r) => r.invLambdaMin), {
    xLabel: "inverse smallest allocation proportion 1/lambda_min",
    yLabel: "rescaled regret n^(3/2) R_n",
    xScale: "linear",
  });
}

/** Render and write the output file; format is chosen by extension. */
export function render(spec: PlotSpec): string {
  const svg = renderToString(spec);
  const lower = spec.output.toLowerCase();
  if (lower.endsWith(".svg")) {
    writeFileSync(spec.output, svg + "\n", "utf-8");
    return spec.output;
  }
  if (lower.endsWith(".png")) {
    throw new Error("png output needs a rasterizer, which this environment lacks; use an .svg output path");
  }
  throw new Error(`unsupported output extension on ${JSON.stringify(spec.output)}; use .svg`);
}
