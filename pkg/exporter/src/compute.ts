import { ValidationError } from './errors.js'
import { LayerIR, ModelIR } from './model.js'
import { NdArr, sameShape, sizeOf, zeros } from './ndarray.js'

/**
 * Float64 forward pass with an optional forward-mode tangent.
 *
 * The tangent follows the standard rules: linear pieces (matmul, conv,
 * pooling, flatten) apply themselves without bias, activations multiply
 * by their derivative at the primal point.  With tangent = input this
 * yields the conductance J_l(x) * x of every layer in a single pass.
 */
export interface LayerOutput {
  value: NdArr
  tangent: NdArr | null
}

const SUPPORTED = [
  'Dense',
  'Conv2D',
  'Flatten',
  'Activation',
  'AveragePooling2D',
  'GlobalAveragePooling2D',
  'ReLU',
]

type Pair = { value: NdArr; tangent: NdArr | null }

function applyActivation(kind: string, pair: Pair, layerName: string): Pair {
  const { value, tangent } = pair
  const a = new Float64Array(value.data.length)
  switch (kind) {
    case 'linear':
      return pair
    case 'relu':
      for (let i = 0; i < a.length; i++) a[i] = Math.max(value.data[i], 0)
      break
    case 'tanh':
      for (let i = 0; i < a.length; i++) a[i] = Math.tanh(value.data[i])
      break
    case 'sigmoid':
      for (let i = 0; i < a.length; i++) a[i] = 1 / (1 + Math.exp(-value.data[i]))
      break
    case 'softmax': {
      if (value.shape.length !== 1) {
        throw new ValidationError(`softmax in layer ${layerName} needs a flat input`)
      }
      let max = -Infinity
      for (const v of value.data) max = Math.max(max, v)
      let sum = 0
      for (let i = 0; i < a.length; i++) {
        a[i] = Math.exp(value.data[i] - max)
        sum += a[i]
      }
      for (let i = 0; i < a.length; i++) a[i] /= sum
      break
    }
    default:
      throw new ValidationError(`activation ${kind} in layer ${layerName} is not supported`)
  }

  let ta: NdArr | null = null
  if (tangent) {
    const t = new Float64Array(tangent.data.length)
    switch (kind) {
      case 'relu':
        for (let i = 0; i < t.length; i++) t[i] = a[i] > 0 ? tangent.data[i] : 0
        break
      case 'tanh':
        for (let i = 0; i < t.length; i++) t[i] = (1 - a[i] * a[i]) * tangent.data[i]
        break
      case 'sigmoid':
        for (let i = 0; i < t.length; i++) t[i] = a[i] * (1 - a[i]) * tangent.data[i]
        break
      case 'softmax': {
        let inner = 0
        for (let i = 0; i < t.length; i++) inner += a[i] * tangent.data[i]
        for (let i = 0; i < t.length; i++) t[i] = a[i] * (tangent.data[i] - inner)
        break
      }
    }
    ta = { shape: [...value.shape], data: t }
  }
  return { value: { shape: [...value.shape], data: a }, tangent: ta }
}

function dense(layer: LayerIR, pair: Pair): Pair {
  const [kernel, bias] = layer.weights
  const [inDim, units] = kernel.shape
  if (pair.value.shape.length !== 1 || pair.value.shape[0] !== inDim) {
    throw new ValidationError(
      `layer ${layer.name} expects a flat input of ${inDim}, got [${pair.value.shape}]`,
    )
  }
  const matmul = (x: Float64Array, withBias: boolean) => {
    const y = new Float64Array(units)
    for (let j = 0; j < units; j++) {
      let acc = withBias && bias ? bias.data[j] : 0
      for (let i = 0; i < inDim; i++) acc += x[i] * kernel.data[i * units + j]
      y[j] = acc
    }
    return y
  }
  const out: Pair = {
    value: { shape: [units], data: matmul(pair.value.data, true) },
    tangent: pair.tangent
      ? { shape: [units], data: matmul(pair.tangent.data, false) }
      : null,
  }
  return applyActivation(String(layer.config.activation ?? 'linear'), out, layer.name)
}

function convPadding(
  size: number,
  kernel: number,
  stride: number,
  padding: string,
): { out: number; before: number } {
  if (padding === 'valid') {
    return { out: Math.floor((size - kernel) / stride) + 1, before: 0 }
  }
  // same: TF pads the deficit, splitting the extra pixel toward the end
  const out = Math.ceil(size / stride)
  const total = Math.max((out - 1) * stride + kernel - size, 0)
  return { out, before: Math.floor(total / 2) }
}

function conv2d(layer: LayerIR, pair: Pair): Pair {
  const [kernel, bias] = layer.weights
  const [kh, kw, inC, outC] = kernel.shape
  const padding = String(layer.config.padding ?? 'valid')
  const strides = layer.config.strides
  const [sh, sw] = Array.isArray(strides)
    ? (strides as number[])
    : [Number(strides ?? 1), Number(strides ?? 1)]
  const dilation = layer.config.dilationRate
  const dil = Array.isArray(dilation) ? (dilation as number[]) : [Number(dilation ?? 1)]
  if (dil.some(d => d !== 1)) {
    throw new ValidationError(`layer ${layer.name}: dilated convolutions are not supported`)
  }
  if (pair.value.shape.length !== 3 || pair.value.shape[2] !== inC) {
    throw new ValidationError(
      `layer ${layer.name} expects [h, w, ${inC}] input, got [${pair.value.shape}]`,
    )
  }
  const [h, w] = pair.value.shape
  const row = convPadding(h, kh, sh, padding)
  const col = convPadding(w, kw, sw, padding)

  const run = (x: Float64Array, withBias: boolean) => {
    const y = new Float64Array(row.out * col.out * outC)
    for (let oy = 0; oy < row.out; oy++) {
      for (let ox = 0; ox < col.out; ox++) {
        for (let oc = 0; oc < outC; oc++) {
          let acc = withBias && bias ? bias.data[oc] : 0
          for (let ky = 0; ky < kh; ky++) {
            const iy = oy * sh + ky - row.before
            if (iy < 0 || iy >= h) continue
            for (let kx = 0; kx < kw; kx++) {
              const ix = ox * sw + kx - col.before
              if (ix < 0 || ix >= w) continue
              for (let ic = 0; ic < inC; ic++) {
                acc +=
                  x[(iy * w + ix) * inC + ic] *
                  kernel.data[((ky * kw + kx) * inC + ic) * outC + oc]
              }
            }
          }
          y[(oy * col.out + ox) * outC + oc] = acc
        }
      }
    }
    return y
  }
  const shape = [row.out, col.out, outC]
  const out: Pair = {
    value: { shape, data: run(pair.value.data, true) },
    tangent: pair.tangent ? { shape: [...shape], data: run(pair.tangent.data, false) } : null,
  }
  return applyActivation(String(layer.config.activation ?? 'linear'), out, layer.name)
}

function averagePool(layer: LayerIR, pair: Pair): Pair {
  const poolSize = layer.config.poolSize
  const [ph, pw] = Array.isArray(poolSize)
    ? (poolSize as number[])
    : [Number(poolSize ?? 2), Number(poolSize ?? 2)]
  const strides = layer.config.strides
  const [sh, sw] =
    strides == null
      ? [ph, pw]
      : Array.isArray(strides)
        ? (strides as number[])
        : [Number(strides), Number(strides)]
  const padding = String(layer.config.padding ?? 'valid')
  if (pair.value.shape.length !== 3) {
    throw new ValidationError(`layer ${layer.name} expects [h, w, c] input`)
  }
  const [h, w, c] = pair.value.shape
  const rowGeom = convPadding(h, ph, sh, padding)
  const colGeom = convPadding(w, pw, sw, padding)

  const run = (x: Float64Array) => {
    const y = new Float64Array(rowGeom.out * colGeom.out * c)
    for (let oy = 0; oy < rowGeom.out; oy++) {
      for (let ox = 0; ox < colGeom.out; ox++) {
        for (let ci = 0; ci < c; ci++) {
          let acc = 0
          let count = 0
          for (let ky = 0; ky < ph; ky++) {
            const iy = oy * sh + ky - rowGeom.before
            if (iy < 0 || iy >= h) continue
            for (let kx = 0; kx < pw; kx++) {
              const ix = ox * sw + kx - colGeom.before
              if (ix < 0 || ix >= w) continue
              acc += x[(iy * w + ix) * c + ci]
              count += 1
            }
          }
          y[(oy * colGeom.out + ox) * c + ci] = count > 0 ? acc / count : 0
        }
      }
    }
    return y
  }
  const shape = [rowGeom.out, colGeom.out, c]
  return {
    value: { shape, data: run(pair.value.data) },
    tangent: pair.tangent ? { shape: [...shape], data: run(pair.tangent.data) } : null,
  }
}

function globalAveragePool(layer: LayerIR, pair: Pair): Pair {
  if (pair.value.shape.length !== 3) {
    throw new ValidationError(`layer ${layer.name} expects [h, w, c] input`)
  }
  const [h, w, c] = pair.value.shape
  const run = (x: Float64Array) => {
    const y = new Float64Array(c)
    for (let ci = 0; ci < c; ci++) {
      let acc = 0
      for (let i = 0; i < h * w; i++) acc += x[i * c + ci]
      y[ci] = acc / (h * w)
    }
    return y
  }
  return {
    value: { shape: [c], data: run(pair.value.data) },
    tangent: pair.tangent ? { shape: [c], data: run(pair.tangent.data) } : null,
  }
}

function flatten(pair: Pair): Pair {
  // framework semantics: row-major, channel fastest
  const d = sizeOf(pair.value.shape)
  return {
    value: { shape: [d], data: pair.value.data.slice() },
    tangent: pair.tangent ? { shape: [d], data: pair.tangent.data.slice() } : null,
  }
}

function applyLayer(layer: LayerIR, pair: Pair): Pair {
  switch (layer.className) {
    case 'Dense':
      return dense(layer, pair)
    case 'Conv2D':
      return conv2d(layer, pair)
    case 'Flatten':
      return flatten(pair)
    case 'Activation':
      return applyActivation(String(layer.config.activation ?? 'linear'), pair, layer.name)
    case 'ReLU':
      if (layer.config.maxValue != null) {
        throw new ValidationError(`layer ${layer.name}: clipped relu is not supported`)
      }
      return applyActivation('relu', pair, layer.name)
    case 'AveragePooling2D':
      return averagePool(layer, pair)
    case 'GlobalAveragePooling2D':
      return globalAveragePool(layer, pair)
    default:
      throw new ValidationError(
        `layer ${layer.name} has unsupported class ${layer.className}; ` +
          `supported: ${SUPPORTED.join(', ')}`,
      )
  }
}

export function forwardWithTangent(
  model: ModelIR,
  input: NdArr,
  tangent: NdArr | null,
): Map<string, LayerOutput> {
  if (!sameShape(input.shape, model.inputShape)) {
    throw new ValidationError(
      `model ${model.name} expects input [${model.inputShape}], got [${input.shape}]`,
    )
  }
  if (tangent && !sameShape(tangent.shape, input.shape)) {
    throw new ValidationError('tangent shape must match the input shape')
  }
  let pair: Pair = { value: input, tangent }
  const outputs = new Map<string, LayerOutput>()
  for (const layer of model.layers) {
    pair = applyLayer(layer, pair)
    outputs.set(layer.name, pair)
  }
  return outputs
}

/** Convenience for tests: forward only, returning the final output. */
export function forward(model: ModelIR, input: NdArr): NdArr {
  const outputs = forwardWithTangent(model, input, null)
  const last = model.layers[model.layers.length - 1]
  const out = outputs.get(last.name)
  if (!out) throw new ValidationError('model has no layers')
  return out.value
}

export { zeros }
