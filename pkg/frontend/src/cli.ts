import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { CsvError } from "./csv.js";
import { defaultSpec, KINDS, renderText, type Kind } from "./render.js";

const USAGE = "usage: render --kind fig3|fig4|table --in data.csv --out figure.svg";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
      strict: true,
      allowPositionals: false,
    });
  } catch (err) {
    console.error(`${(err as Error).message}\n${USAGE}`);
    return 2;
  }

  const { kind, in: input, out: output } = args.values;
  if (!kind || !input || !output) {
    console.error(USAGE);
    return 2;
  }
  if (!(KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown kind "${kind}" (expected one of: ${KINDS.join(", ")})\n${USAGE}`);
    return 2;
  }

  let csvText: string;
  try {
    csvText = readFileSync(input, "utf-8");
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 1;
  }

  // Render fully before touching the output path, so a bad CSV never
  // leaves a truncated or empty file behind.
  let document: string;
  try {
    document = renderText(defaultSpec(kind as Kind, input, output), csvText);
  } catch (err) {
    if (err instanceof CsvError || err instanceof Error) {
      console.error(`${input}: ${err.message}`);
      return 1;
    }
    throw err;
  }

  writeFileSync(output, document + "\n", "utf-8");
  console.log(`wrote ${output}`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
