import Papa from "papaparse";

/** One data row of a results CSV, numeric fields parsed. */
export interface ResultRow {
  strategy: string;
  n: number;
  runs: number;
  seed: number;
  regretMean: number;
  regretStderr: number;
  rescaledRegret: number;
  /** stderr on the same n^(3/2) scale as rescaledRegret */
  rescaledStderr: number;
  globalLoss: number;
  arms: string;
  invLambdaMin: number;
}

const REQUIRED = [
  "strategy",
  "n",
  "runs",
  "seed",
  "regret_mean",
  "regret_stderr",
  "rescaled_regret",
  "global_loss",
  "arms",
  "inv_lambda_min",
];

function num(raw: Record<string, string>, column: string, line: number): number {
  const v = Number(raw[column]);
  if (!Number.isFinite(v)) {
    throw new Error(`bad numeric value in column "${column}" on data row ${line}: ${JSON.stringify(raw[column])}`);
  }
  return v;
}

/** Parse results-CSV text; throws naming the first missing column. */
export function parseResults(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`csv parse error: ${e.message} (row ${e.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED) {
    if (!fields.includes(column)) {
      throw new Error(`missing column "${column}"`);
    }
  }
  return parsed.data.map((raw, i) => {
    const n = num(raw, "n", i + 1);
    const regretStderr = num(raw, "regret_stderr", i + 1);
    return {
      strategy: raw.strategy,
      n,
      runs: num(raw, "runs", i + 1),
      seed: num(raw, "seed", i + 1),
      regretMean: num(raw, "regret_mean", i + 1),
      regretStderr,
      rescaledRegret: num(raw, "rescaled_regret", i + 1),
      rescaledStderr: Math.pow(n, 1.5) * regretStderr,
      globalLoss: num(raw, "global_loss", i + 1),
      arms: raw.arms,
      invLambdaMin: num(raw, "inv_lambda_min", i + 1),
    };
  });
}

/**
 * Distribution-kind of the last arm literal, e.g.
 * "gaussian(0,4)|rademacher" -> "rademacher".  This is the series key that
 * separates the gaussian-second-arm grid from the rademacher one.
 */
export function arm2Kind(arms: string): string {
  const literals = arms.split("|");
  const last = literals[literals.length - 1].trim();
  const paren = last.indexOf("(");
  return paren < 0 ? last : last.slice(0, paren);
}
