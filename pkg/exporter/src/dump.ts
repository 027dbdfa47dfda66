import * as fsSync from 'node:fs'
import * as path from 'node:path'

import { ValidationError } from './errors.js'

/**
 * Version-1 dump writer.
 *
 * Layout contract: manifest.json with keys in the order version,
 * model_name, num_samples, class_count, layers, labels_file; layer
 * entries ordered activations first then conductances, each ascending
 * by index, with keys name, index, dims, kind, file; tensors float32
 * little-endian row-major [N, d]; labels uint32 little-endian.
 */
export interface DumpLayer {
  name: string
  index: number
  kind: 'activation' | 'conductance'
  /** one row per sample, equal lengths */
  rows: Float64Array[]
}

export interface DumpSpec {
  modelName: string
  labels: number[]
  classCount: number
  layers: DumpLayer[]
}

function tensorBytes(rows: Float64Array[]): Buffer {
  const d = rows[0].length
  const buf = Buffer.allocUnsafe(4 * rows.length * d)
  rows.forEach((row, n) => {
    if (row.length !== d) {
      throw new ValidationError('ragged rows in a dump layer')
    }
    for (let i = 0; i < d; i++) {
      buf.writeFloatLE(Math.fround(row[i]), 4 * (n * d + i))
    }
  })
  return buf
}

export function writeDump(outDir: string, spec: DumpSpec): string {
  if (spec.layers.length === 0) {
    throw new ValidationError('nothing to write: no layers')
  }
  const n = spec.labels.length
  for (const layer of spec.layers) {
    if (layer.rows.length !== n) {
      throw new ValidationError(
        `layer ${layer.name} has ${layer.rows.length} rows but there are ${n} labels`,
      )
    }
  }
  fsSync.mkdirSync(outDir, { recursive: true })

  const ordered = [
    ...spec.layers.filter(l => l.kind === 'activation').sort((a, b) => a.index - b.index),
    ...spec.layers.filter(l => l.kind === 'conductance').sort((a, b) => a.index - b.index),
  ]
  const entries = ordered.map(layer => {
    const file = `${layer.kind}_${String(layer.index).padStart(3, '0')}.bin`
    fsSync.writeFileSync(path.join(outDir, file), tensorBytes(layer.rows))
    return {
      name: layer.name,
      index: layer.index,
      dims: [n, layer.rows[0].length],
      kind: layer.kind,
      file,
    }
  })

  const labelBuf = Buffer.allocUnsafe(4 * n)
  spec.labels.forEach((label, i) => labelBuf.writeUInt32LE(label, 4 * i))
  fsSync.writeFileSync(path.join(outDir, 'labels.bin'), labelBuf)

  const manifest = {
    version: 1,
    model_name: spec.modelName,
    num_samples: n,
    class_count: spec.classCount,
    layers: entries,
    labels_file: 'labels.bin',
  }
  const manifestPath = path.join(outDir, 'manifest.json')
  fsSync.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + '\n')
  return manifestPath
}
