import { ValidationError } from './errors.js'

/** Dense row-major float64 array; shape [] means scalar, [d], [h, w, c], ... */
export interface NdArr {
  shape: number[]
  data: Float64Array
}

export function sizeOf(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1)
}

export function zeros(shape: number[]): NdArr {
  return { shape: [...shape], data: new Float64Array(sizeOf(shape)) }
}

export function fromArray(shape: number[], values: ArrayLike<number>): NdArr {
  if (values.length !== sizeOf(shape)) {
    throw new ValidationError(
      `shape [${shape}] needs ${sizeOf(shape)} values, got ${values.length}`,
    )
  }
  return { shape: [...shape], data: Float64Array.from(values) }
}

export function clone(a: NdArr): NdArr {
  return { shape: [...a.shape], data: a.data.slice() }
}

export function sameShape(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((d, i) => d === b[i])
}

/**
 * Flatten [h, w, c] channel-major: channel varies slowest, so the flat
 * index is ci*h*w + yi*w + xi.  Non-spatial arrays pass through row-major.
 */
export function channelMajorFlatten(a: NdArr): Float64Array {
  if (a.shape.length !== 3) {
    return a.data.slice()
  }
  const [h, w, c] = a.shape
  const out = new Float64Array(h * w * c)
  for (let ci = 0; ci < c; ci++) {
    for (let yi = 0; yi < h; yi++) {
      for (let xi = 0; xi < w; xi++) {
        out[ci * h * w + yi * w + xi] = a.data[(yi * w + xi) * c + ci]
      }
    }
  }
  return out
}
