#!/usr/bin/env node
import yargs from "yargs";
import { render, PlotKind, GroupKey } from "./render";

export function main(argv: string[]): number {
  let failed = false;
  yargs(argv)
    .command(
      "plot",
      "render a chart from a results CSV",
      (y) =>
        y
          .option("in", { type: "string", demandOption: true, describe: "results CSV path" })
          .option("kind", {
            choices: ["vs_n", "vs_inv_lambda_min"] as const,
            demandOption: true,
            describe: "x axis: budget or inverse smallest proportion",
          })
          .option("out", { type: "string", demandOption: true, describe: "output image path (.svg)" })
          .option("group", {
            choices: ["strategy", "arm2-kind"] as const,
            describe: "series grouping key (defaults per kind)",
          }),
      (args) => {
        try {
          const written = render({
            inputCsv: args.in,
            kind: args.kind as PlotKind,
            output: args.out,
            group: args.group as GroupKey | undefined,
          });
          console.log(`wrote ${written}`);
        } catch (err) {
          console.error(`error: ${err instanceof Error ? err.message : err}`);
          failed = true;
        }
      }
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      console.error(`error: ${msg}`);
      failed = true;
    })
    .parseSync();
  return failed ? 2 : 0;
}

if (require.main === module) {
  process.exitCode = main(process.argv.slice(2));
}
