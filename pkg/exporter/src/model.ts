import { promises as fs } from 'node:fs'
import * as path from 'node:path'
import * as tf from '@tensorflow/tfjs'

import { ValidationError } from './errors.js'
import { NdArr } from './ndarray.js'

/** One layer of a loaded model, weights widened to float64. */
export interface LayerIR {
  name: string
  className: string
  config: Record<string, unknown>
  weights: NdArr[]
}

export interface ModelIR {
  name: string
  /** input shape without the batch dimension, e.g. [36] or [6, 6, 1] */
  inputShape: number[]
  layers: LayerIR[]
}

interface WeightsManifestGroup {
  paths: string[]
  weights: tf.io.WeightsManifestEntry[]
}

/** IOHandler over a saved LayersModel directory (model.json + shards). */
export function fileHandler(modelDir: string): tf.io.IOHandler {
  return {
    async load(): Promise<tf.io.ModelArtifacts> {
      const raw = await fs.readFile(path.join(modelDir, 'model.json'), 'utf8')
      const json = JSON.parse(raw)
      const groups: WeightsManifestGroup[] = json.weightsManifest ?? []
      const buffers: Buffer[] = []
      for (const group of groups) {
        for (const rel of group.paths) {
          buffers.push(await fs.readFile(path.join(modelDir, rel)))
        }
      }
      const joined = Buffer.concat(buffers)
      return {
        modelTopology: json.modelTopology,
        weightSpecs: groups.flatMap(g => g.weights),
        weightData: joined.buffer.slice(
          joined.byteOffset,
          joined.byteOffset + joined.byteLength,
        ),
      }
    },
  }
}

/**
 * Load a saved model and extract an immutable float64 view of its layers.
 *
 * Only sequential topologies are supported; the compute module decides
 * which layer classes it can forward.  All framework tensors are
 * disposed before returning.
 */
export async function loadModelIR(modelDir: string): Promise<ModelIR> {
  const model = await tf.loadLayersModel(fileHandler(modelDir))
  try {
    if (model.getClassName() !== 'Sequential') {
      throw new ValidationError(
        `model class ${model.getClassName()} is not supported; export needs a sequential stack`,
      )
    }
    const inputShape = (model.inputs[0].shape ?? []).filter(
      (d): d is number => typeof d === 'number' && d > 0,
    )
    const layers: LayerIR[] = []
    for (const layer of model.layers) {
      if (layer.getClassName() === 'InputLayer') {
        continue
      }
      layers.push({
        name: layer.name,
        className: layer.getClassName(),
        config: layer.getConfig() as Record<string, unknown>,
        weights: layer.getWeights().map(t => ({
          shape: [...t.shape],
          data: Float64Array.from(t.dataSync()),
        })),
      })
    }
    return { name: model.name, inputShape, layers }
  } finally {
    model.dispose()
  }
}

export function resolveLayers(model: ModelIR, names: string[]): Map<string, number> {
  /** map of layer name to its 1-based depth position; input is index 0 */
  const positions = new Map(model.layers.map((l, i) => [l.name, i + 1]))
  const picked = new Map<string, number>()
  for (const name of names) {
    const pos = positions.get(name)
    if (pos === undefined) {
      const available = model.layers.map(l => l.name).join(', ')
      throw new ValidationError(
        `layer ${name} not found in model ${model.name}; available layers: ${available}`,
      )
    }
    picked.set(name, pos)
  }
  return picked
}
