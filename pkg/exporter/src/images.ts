import * as fsSync from 'node:fs'
import * as path from 'node:path'
import { PNG } from 'pngjs'

import { ValidationError } from './errors.js'
import { NdArr } from './ndarray.js'

export interface ImageSample {
  /** path relative to the input root, the sort key */
  relPath: string
  absPath: string
  label: number
}

export interface ImageFolder {
  classNames: string[]
  samples: ImageSample[]
}

/**
 * Scan a class-per-subdirectory image folder.
 *
 * Class ids follow the lexicographic order of the subdirectory names;
 * samples are sorted by their relative path so repeated exports see the
 * same order.
 */
export function scanImageFolder(dir: string, limit?: number): ImageFolder {
  const entries = fsSync.readdirSync(dir, { withFileTypes: true })
  const classNames = entries
    .filter(e => e.isDirectory())
    .map(e => e.name)
    .sort()
  if (classNames.length === 0) {
    throw new ValidationError(`${dir} has no class subdirectories`)
  }
  const samples: ImageSample[] = []
  classNames.forEach((cls, label) => {
    const clsDir = path.join(dir, cls)
    for (const file of fsSync.readdirSync(clsDir).sort()) {
      if (!file.toLowerCase().endsWith('.png')) continue
      samples.push({
        relPath: path.join(cls, file),
        absPath: path.join(clsDir, file),
        label,
      })
    }
  })
  samples.sort((a, b) => (a.relPath < b.relPath ? -1 : a.relPath > b.relPath ? 1 : 0))
  if (samples.length === 0) {
    throw new ValidationError(`${dir} holds no .png images`)
  }
  const kept = limit === undefined ? samples : samples.slice(0, limit)
  if (kept.length === 0) {
    throw new ValidationError('sample limit leaves no images to export')
  }
  return { classNames, samples: kept }
}

/**
 * Decode a PNG into the model's input layout, scaled to [0, 1].
 *
 * 1 channel averages RGB; 3 channels pass RGB through.  The image must
 * already match the model's spatial size: resizing is a modeling choice
 * this tool refuses to make silently.
 */
export function decodeImage(absPath: string, inputShape: number[]): NdArr {
  const png = PNG.sync.read(fsSync.readFileSync(absPath))
  const flat = inputShape.length === 1
  const [h, w, c] = flat
    ? [png.height, png.width, 1]
    : inputShape
  if (inputShape.length !== 1 && inputShape.length !== 3) {
    throw new ValidationError(`unsupported model input shape [${inputShape}]`)
  }
  if (c !== 1 && c !== 3) {
    throw new ValidationError(`model wants ${c} channels; only 1 or 3 are supported`)
  }
  if (png.height !== h || png.width !== w) {
    throw new ValidationError(
      `${absPath} is ${png.height}x${png.width}, the model expects ${h}x${w}`,
    )
  }
  if (flat && png.height * png.width !== inputShape[0]) {
    throw new ValidationError(
      `${absPath} has ${png.height * png.width} pixels, the flat model input wants ${inputShape[0]}`,
    )
  }
  const data = new Float64Array(h * w * c)
  for (let i = 0; i < h * w; i++) {
    const r = png.data[4 * i]
    const g = png.data[4 * i + 1]
    const b = png.data[4 * i + 2]
    if (c === 1) {
      data[i] = (r + g + b) / (3 * 255)
    } else {
      data[3 * i] = r / 255
      data[3 * i + 1] = g / 255
      data[3 * i + 2] = b / 255
    }
  }
  return { shape: [...inputShape], data }
}
