import * as fs from 'node:fs'
import * as os from 'node:os'
import * as path from 'node:path'
import { describe, expect, it } from 'vitest'

import { ValidationError } from '../src/errors.js'
import { DumpSpec, writeDump } from '../src/dump.js'

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), 'dump-'))
}

function sampleSpec(): DumpSpec {
  return {
    modelName: 'sample',
    labels: [0, 1, 0],
    classCount: 2,
    layers: [
      {
        name: 'hidden',
        index: 2,
        kind: 'conductance',
        rows: [
          Float64Array.from([0.5, -1.25]),
          Float64Array.from([2.0, 0.75]),
          Float64Array.from([-0.125, 3.5]),
        ],
      },
      {
        name: 'input',
        index: 0,
        kind: 'activation',
        rows: [Float64Array.from([1]), Float64Array.from([2]), Float64Array.from([3])],
      },
    ],
  }
}

describe('writeDump', () => {
  it('writes the manifest with the exact key order', () => {
    const dir = tmpDir()
    writeDump(dir, sampleSpec())
    const manifest = JSON.parse(fs.readFileSync(path.join(dir, 'manifest.json'), 'utf8'))
    expect(Object.keys(manifest)).toEqual([
      'version',
      'model_name',
      'num_samples',
      'class_count',
      'layers',
      'labels_file',
    ])
    expect(manifest.version).toBe(1)
    expect(manifest.num_samples).toBe(3)
    expect(manifest.class_count).toBe(2)
    // activations first, then conductances
    expect(manifest.layers.map((l: { kind: string }) => l.kind)).toEqual([
      'activation',
      'conductance',
    ])
    for (const entry of manifest.layers) {
      expect(Object.keys(entry)).toEqual(['name', 'index', 'dims', 'kind', 'file'])
    }
    expect(manifest.layers[1].dims).toEqual([3, 2])
    expect(manifest.layers[1].file).toBe('conductance_002.bin')
  })

  it('stores float32 little-endian row-major tensors and uint32 labels', () => {
    const dir = tmpDir()
    writeDump(dir, sampleSpec())
    const bytes = fs.readFileSync(path.join(dir, 'conductance_002.bin'))
    expect(bytes.length).toBe(4 * 3 * 2)
    const floats = new Float32Array(bytes.buffer, bytes.byteOffset, 6)
    expect(Array.from(floats)).toEqual([0.5, -1.25, 2.0, 0.75, -0.125, 3.5])
    const labels = fs.readFileSync(path.join(dir, 'labels.bin'))
    expect(labels.readUInt32LE(0)).toBe(0)
    expect(labels.readUInt32LE(4)).toBe(1)
    expect(labels.readUInt32LE(8)).toBe(0)
  })

  it('rewrite is byte-identical', () => {
    const a = tmpDir()
    const b = tmpDir()
    writeDump(a, sampleSpec())
    writeDump(b, sampleSpec())
    for (const file of fs.readdirSync(a).sort()) {
      expect(fs.readFileSync(path.join(a, file))).toEqual(fs.readFileSync(path.join(b, file)))
    }
  })

  it('rejects label/row count mismatches and empty dumps', () => {
    const spec = sampleSpec()
    spec.layers[0].rows.pop()
    expect(() => writeDump(tmpDir(), spec)).toThrowError(ValidationError)
    expect(() => writeDump(tmpDir(), { ...sampleSpec(), layers: [] })).toThrowError(
      /nothing to write/,
    )
  })
})
