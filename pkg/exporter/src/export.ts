import { forwardWithTangent } from './compute.js'
import { ValidationError } from './errors.js'
import { decodeImage, scanImageFolder } from './images.js'
import { loadModelIR, resolveLayers } from './model.js'
import { channelMajorFlatten } from './ndarray.js'
import { DumpLayer, writeDump } from './dump.js'

export const METHODS = ['activation', 'gradient-conductance'] as const
export type Method = (typeof METHODS)[number]

export interface ExportSpec {
  /** path to a saved LayersModel directory (model.json + weight shards) */
  modelId: string
  layerNames: string[]
  inputDir: string
  sampleLimit?: number
  batchSize?: number
  method: Method
  outDir: string
}

export interface ExportResult {
  manifestPath: string
  numSamples: number
  classNames: string[]
}

/**
 * Run the model over an image folder and write a version-1 dump.
 *
 * The preprocessed input batch is always included as activation index 0;
 * selected layers land at their 1-based depth position, either as
 * activations or, with method gradient-conductance, as the JVP of the
 * layer output with the input itself as direction (J_l(x) * x).  Spatial
 * outputs are flattened channel-major.  Samples are processed in file
 * path order, so re-exports are byte-identical.
 */
export async function runExport(spec: ExportSpec): Promise<ExportResult> {
  if (!METHODS.includes(spec.method)) {
    throw new ValidationError(`method must be one of ${METHODS.join(', ')}`)
  }
  if (spec.sampleLimit !== undefined && spec.sampleLimit < 1) {
    throw new ValidationError('sample limit must be >= 1')
  }
  if (spec.layerNames.length === 0) {
    throw new ValidationError('no layers selected')
  }
  const model = await loadModelIR(spec.modelId)
  const picked = resolveLayers(model, spec.layerNames)
  const folder = scanImageFolder(spec.inputDir, spec.sampleLimit)

  const wantTangent = spec.method === 'gradient-conductance'
  const inputRows: Float64Array[] = []
  const layerRows = new Map<string, Float64Array[]>(
    spec.layerNames.map(name => [name, []]),
  )
  const batchSize = spec.batchSize ?? 16
  for (let start = 0; start < folder.samples.length; start += batchSize) {
    for (const sample of folder.samples.slice(start, start + batchSize)) {
      const input = decodeImage(sample.absPath, model.inputShape)
      inputRows.push(channelMajorFlatten(input))
      const outputs = forwardWithTangent(model, input, wantTangent ? input : null)
      for (const name of spec.layerNames) {
        const out = outputs.get(name)
        if (!out) throw new ValidationError(`layer ${name} produced no output`)
        const picked = wantTangent ? out.tangent : out.value
        if (!picked) throw new ValidationError(`layer ${name} has no tangent`)
        layerRows.get(name)!.push(channelMajorFlatten(picked))
      }
    }
  }

  const layers: DumpLayer[] = [
    { name: 'input', index: 0, kind: 'activation', rows: inputRows },
    ...spec.layerNames.map(name => ({
      name,
      index: picked.get(name)!,
      kind: (wantTangent ? 'conductance' : 'activation') as DumpLayer['kind'],
      rows: layerRows.get(name)!,
    })),
  ]
  const manifestPath = writeDump(spec.outDir, {
    modelName: model.name,
    labels: folder.samples.map(s => s.label),
    classCount: folder.classNames.length,
    layers,
  })
  return {
    manifestPath,
    numSamples: folder.samples.length,
    classNames: folder.classNames,
  }
}
