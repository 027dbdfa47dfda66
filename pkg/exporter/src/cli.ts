#!/usr/bin/env node
/**
 * export --model <dir> --layers <a,b,c> --input <dir> --out <dir>
 *        [--limit N] [--batch-size N] [--method activation|gradient-conductance]
 *
 * Exit codes: 0 success, 1 validation/usage error, 2 I/O error.
 * Diagnostics go to standard error.
 */
import { parseArgs } from 'node:util'
import { pathToFileURL } from 'node:url'

import { ValidationError } from './errors.js'
import { METHODS, Method, runExport } from './export.js'

const USAGE =
  'usage: infoplane-export export --model <dir> --layers <a,b,c> --input <dir> ' +
  '--out <dir> [--limit N] [--batch-size N] [--method <m>]'

export async function main(argv: string[]): Promise<number> {
  let parsed
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        model: { type: 'string' },
        layers: { type: 'string' },
        input: { type: 'string' },
        out: { type: 'string' },
        limit: { type: 'string' },
        'batch-size': { type: 'string' },
        method: { type: 'string', default: 'activation' },
        help: { type: 'boolean', default: false },
      },
    })
  } catch (err) {
    console.error(USAGE)
    console.error(String(err instanceof Error ? err.message : err))
    return 1
  }
  if (parsed.values.help) {
    console.log(USAGE)
    return 0
  }

  try {
    if (parsed.positionals.length !== 1 || parsed.positionals[0] !== 'export') {
      throw new ValidationError(`expected the export subcommand; ${USAGE}`)
    }
    const { model, layers, input, out, limit, method } = parsed.values
    if (!model || !layers || !input || !out) {
      throw new ValidationError(`--model, --layers, --input and --out are required; ${USAGE}`)
    }
    if (!METHODS.includes(method as Method)) {
      throw new ValidationError(`--method must be one of ${METHODS.join(', ')}`)
    }
    const batch = parsed.values['batch-size']
    const result = await runExport({
      modelId: model,
      layerNames: layers.split(',').map(s => s.trim()).filter(s => s.length > 0),
      inputDir: input,
      outDir: out,
      sampleLimit: limit === undefined ? undefined : Number(limit),
      batchSize: batch === undefined ? undefined : Number(batch),
      method: method as Method,
    })
    console.error(
      `export: wrote ${result.numSamples} samples, classes [${result.classNames.join(', ')}] to ${out}`,
    )
    return 0
  } catch (err) {
    if (err instanceof ValidationError) {
      console.error(`error: ${err.message}`)
      return 1
    }
    if (err instanceof Error && 'code' in err) {
      console.error(`i/o error: ${err.message}`)
      return 2
    }
    throw err
  }
}

if (process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then(code => {
    process.exitCode = code
  })
}
